#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "qmeval/cci.hpp"
#include "qmeval/correlation.hpp"
#include "qmeval/errors.hpp"
#include "qmeval/mos.hpp"
#include "qmeval/rng.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace qmeval;
using Catch::Matchers::WithinAbs;
using V = std::vector<double>;

namespace {

struct Instance {
  V mos, half, pred;
};

// Small instances with frequent ties in both columns.
Instance random_instance(RandomStream& rng, std::size_t n) {
  Instance in;
  const double grain = 1.0 + static_cast<double>(rng.below(4));
  for (std::size_t i = 0; i < n; ++i) {
    in.mos.push_back(1.0 + std::round(4.0 * grain * rng.uniform()) / grain);
    in.half.push_back(rng.below(3) == 0 ? 0.0 : 0.4 * rng.uniform());
    in.pred.push_back(static_cast<double>(rng.below(2 + rng.below(8))));
  }
  return in;
}

JoinedEvaluation to_eval(const Instance& in) {
  std::vector<EvaluationItem> items;
  for (std::size_t i = 0; i < in.mos.size(); ++i) {
    items.push_back({"id" + std::to_string(100 + i), in.mos[i], in.half[i], in.pred[i]});
  }
  return JoinedEvaluation(std::move(items), Granularity::file);
}

template <typename F>
std::optional<double> value_or_none(F&& f) {
  try {
    return f().value;
  } catch (const DegenerateStatistic&) {
    return std::nullopt;
  }
}

}  // namespace

TEST_CASE("ktau and cci equal their brute-force oracles") {
  RandomStream rng(20240601);
  for (int trial = 0; trial < 3000; ++trial) {
    const auto in = random_instance(rng, 2 + rng.below(11));
    const auto expected_tau = testing::brute_tau_b(in.mos, in.pred);
    const auto tau = value_or_none([&] { return ktau(in.mos, in.pred); });
    REQUIRE(tau.has_value() == expected_tau.has_value());
    if (tau) CHECK(*tau == *expected_tau);

    const auto count = testing::brute_cci(in.mos, in.half, in.pred);
    if (count.admitted == 0) {
      CHECK_THROWS_AS(cci(in.mos, in.half, in.pred), EmptyConstrainedSet);
      continue;
    }
    const auto value = cci(in.mos, in.half, in.pred);
    CHECK(value.value == static_cast<double>(count.concordant) / static_cast<double>(count.admitted));
    CHECK(value.n_pairs_used == count.admitted);
    const auto set = build_constrained_set(to_eval(in));
    CHECK(set.pairs.size() == count.admitted);
    CHECK(cci(set).value == value.value);
  }
}

TEST_CASE("srcc is pcc of average ranks") {
  RandomStream rng(17);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto in = random_instance(rng, 2 + rng.below(11));
    const auto s = value_or_none([&] { return srcc(in.mos, in.pred); });
    const auto rx = average_ranks(in.mos);
    const auto ry = average_ranks(in.pred);
    const bool constant = std::all_of(rx.begin(), rx.end(), [&](double r) { return r == rx[0]; }) ||
                          std::all_of(ry.begin(), ry.end(), [&](double r) { return r == ry[0]; });
    REQUIRE(s.has_value() == !constant);
    if (s) CHECK_THAT(*s, WithinAbs(testing::brute_pcc(rx, ry), 1e-12));
  }
}

TEST_CASE("pcc matches the two-pass formula") {
  RandomStream rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    V x(3 + rng.below(50)), y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = rng.normal();
      y[i] = 0.5 * x[i] + rng.normal();
    }
    CHECK_THAT(pcc(x, y).value, WithinAbs(testing::brute_pcc(x, y), 1e-12));
  }
}

TEST_CASE("correlation symmetry and transform invariance") {
  RandomStream rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 3 + rng.below(30);
    V x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.normal();
      y[i] = x[i] + rng.normal();
    }
    const double p = pcc(x, y).value;
    const double s = srcc(x, y).value;
    const double k = ktau(x, y).value;
    CHECK_THAT(pcc(y, x).value, WithinAbs(p, 1e-12));
    CHECK_THAT(srcc(y, x).value, WithinAbs(s, 1e-12));
    CHECK_THAT(ktau(y, x).value, WithinAbs(k, 1e-12));

    const double a = 0.1 + 5 * rng.uniform();
    const double b = 10 * rng.uniform() - 5;
    V affine, flipped, increasing;
    for (const double v : y) {
      affine.push_back(a * v + b);
      flipped.push_back(-a * v + b);
      increasing.push_back(std::exp(v) + v * v * v);
    }
    CHECK_THAT(pcc(x, affine).value, WithinAbs(p, 1e-12));
    CHECK_THAT(pcc(x, flipped).value, WithinAbs(-p, 1e-12));
    CHECK_THAT(srcc(x, increasing).value, WithinAbs(s, 1e-12));
    CHECK_THAT(ktau(x, increasing).value, WithinAbs(k, 1e-12));
    CHECK(std::fabs(p) <= 1.0);
    CHECK(std::fabs(s) <= 1.0);
    CHECK(std::fabs(k) <= 1.0);
  }
}

TEST_CASE("cci invariances") {
  RandomStream rng(6);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.below(15);
    Instance in;
    for (std::size_t i = 0; i < n; ++i) {
      in.mos.push_back(1 + 4 * rng.uniform());
      in.half.push_back(0.3 * rng.uniform());
      in.pred.push_back(rng.normal());
    }
    const auto count = testing::brute_cci(in.mos, in.half, in.pred);
    if (count.admitted == 0) continue;
    ++checked;
    const double base = cci(in.mos, in.half, in.pred).value;
    CHECK(base >= 0.0);
    CHECK(base <= 1.0);

    V monotone, negated;
    for (const double v : in.pred) {
      monotone.push_back(std::atan(v) * 3 + 1);
      negated.push_back(-v);
    }
    CHECK(cci(in.mos, in.half, monotone).value == base);
    // predictions are continuous: no ties on the admitted pairs
    CHECK_THAT(base + cci(in.mos, in.half, negated).value, WithinAbs(1.0, 1e-12));

    // dyadic scale and shift keep the arithmetic exact
    V mos2, half2;
    for (std::size_t i = 0; i < n; ++i) {
      mos2.push_back(in.mos[i] * 4 + 8);
      half2.push_back(in.half[i] * 4);
    }
    CHECK(cci(mos2, half2, in.pred).value == base);

    // inflating every interval can only remove pairs
    V wider;
    for (const double h : in.half) wider.push_back(h * 1.5 + 0.01);
    const auto narrow_set = build_constrained_set(to_eval(in));
    const auto wide_set = build_constrained_set(to_eval({in.mos, wider, in.pred}));
    for (const auto& p : wide_set.pairs) {
      const bool present = std::any_of(narrow_set.pairs.begin(), narrow_set.pairs.end(), [&](const ConstrainedPair& q) {
        return q.id_a == p.id_a && q.id_b == p.id_b;
      });
      CHECK(present);
    }
    CHECK(wide_set.pairs.size() <= narrow_set.pairs.size());

    // item order never matters
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    Instance shuffled;
    for (const auto i : perm) {
      shuffled.mos.push_back(in.mos[i]);
      shuffled.half.push_back(in.half[i]);
      shuffled.pred.push_back(in.pred[i]);
    }
    CHECK(cci(shuffled.mos, shuffled.half, shuffled.pred).value == base);
  }
  CHECK(checked > 500);
}

TEST_CASE("row order never changes loaded statistics") {
  RandomStream rng(7);
  std::vector<std::string> rows;
  for (int s = 0; s < 12; ++s) {
    for (int r = 0; r < 5; ++r) {
      if (rng.below(6) == 0 && r > 1) continue;  // sparse panels
      rows.push_back("c" + std::to_string(s / 3) + ",s" + std::to_string(s) + ",r" + std::to_string(r) + "," +
                     std::to_string(1 + rng.below(5)));
    }
  }
  const auto render = [&](const std::vector<std::string>& lines) {
    std::string text = "# scale: 1,5,discrete\ncondition_id,stimulus_id,rater_id,score\n";
    for (const auto& l : lines) text += l + "\n";
    return text;
  };
  const auto base = testing::ratings_from(render(rows));
  std::ostringstream base_mos;
  write_mos_csv(base_mos, mos_per_condition(base));
  for (int trial = 0; trial < 20; ++trial) {
    auto shuffled = rows;
    for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
    const auto again = testing::ratings_from(render(shuffled));
    CHECK(again == base);
    std::ostringstream mos;
    write_mos_csv(mos, mos_per_condition(again));
    CHECK(mos.str() == base_mos.str());
  }
}
