#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "qmeval/parallel.hpp"
#include "qmeval/rng.hpp"

using namespace qmeval;

TEST_CASE("mix64 is the SplitMix64 output function") {
  // first two outputs of SplitMix64 started from state 0
  CHECK(mix64(0) == 0xE220A8397B1DCDAFULL);
  CHECK(mix64(0x9E3779B97F4A7C15ULL) == 0x6E789E6AA1B965F4ULL);
}

TEST_CASE("streams are mt19937_64 seeded through mix64") {
  RandomStream s(42);
  std::mt19937_64 reference(mix64(42));
  for (int i = 0; i < 1000; ++i) CHECK(s.next() == reference());

  auto c = RandomStream::child(7, 3, 5);
  std::mt19937_64 child_ref(mix64(mix64(mix64(7) ^ 3) + 5));
  CHECK(c.next() == child_ref());
}

TEST_CASE("child streams differ") {
  std::set<std::uint64_t> first;
  for (std::uint64_t a = 0; a < 20; ++a) {
    for (std::uint64_t b = 0; b < 20; ++b) first.insert(RandomStream::child(1, a, b).next());
  }
  CHECK(first.size() == 400);
}

TEST_CASE("uniform and bounded draws") {
  RandomStream s(1);
  std::vector<int> counts(7, 0);
  const int draws = 70000;
  for (int i = 0; i < draws; ++i) {
    const double u = s.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    ++counts[s.below(7)];
  }
  double chi2 = 0;
  for (const int c : counts) chi2 += (c - draws / 7.0) * (c - draws / 7.0) / (draws / 7.0);
  CHECK(chi2 < 22.46);  // chi-square, 6 df, p = 0.001
  CHECK_THROWS(s.below(0));
}

TEST_CASE("normal draws have unit moments") {
  RandomStream s(2);
  const int n = 200000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = s.normal();
    sum += z;
    sum2 += z * z;
  }
  const double mean = sum / n;
  CHECK(std::fabs(mean) < 4.0 / std::sqrt(n));
  CHECK(std::fabs(sum2 / n - mean * mean - 1.0) < 0.02);
}

TEST_CASE("sampling without replacement is uniform") {
  RandomStream s(3);
  const std::size_t population = 20, k = 5, reps = 20000;
  std::vector<int> hits(population, 0);
  for (std::size_t r = 0; r < reps; ++r) {
    const auto picked = sample_without_replacement(s, population, k);
    REQUIRE(picked.size() == k);
    REQUIRE(std::is_sorted(picked.begin(), picked.end()));
    REQUIRE(std::adjacent_find(picked.begin(), picked.end()) == picked.end());
    for (const auto i : picked) ++hits[i];
  }
  const double expected = static_cast<double>(reps * k) / population;
  const double sigma = std::sqrt(reps * (static_cast<double>(k) / population) * (1 - static_cast<double>(k) / population));
  double chi2 = 0;
  for (const int h : hits) {
    CHECK(std::fabs(h - expected) < 3 * sigma);
    chi2 += (h - expected) * (h - expected) / expected;
  }
  CHECK(chi2 < 43.82);  // 19 df, p = 0.001
  CHECK(sample_without_replacement(s, 4, 4) == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK_THROWS(sample_without_replacement(s, 3, 4));
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  for (const std::size_t threads : {1u, 2u, 8u}) {
    std::vector<int> seen(1000, 0);
    parallel_for(seen.size(), threads, [&](std::size_t i) { ++seen[i]; });
    CHECK(std::all_of(seen.begin(), seen.end(), [](int v) { return v == 1; }));
    CHECK_THROWS_AS(parallel_for(100, threads,
                                 [](std::size_t i) {
                                   if (i == 37) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
  }
  CHECK(resolve_threads(0) >= 1);
  CHECK(resolve_threads(3) == 3);
}
