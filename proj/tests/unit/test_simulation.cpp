#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <vector>

#include "qmeval/correlation.hpp"
#include "qmeval/mos.hpp"
#include "qmeval/simulation.hpp"
#include "support/oracles.hpp"

using namespace qmeval;

TEST_CASE("simulated pairs reach the target correlation") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto eval = simulate_correlated_pairs(1000, 0.8, seed);
    REQUIRE(eval.size() == 1000);
    // about three Fisher-z standard errors, (1 - r^2) / sqrt(n - 3)
    CHECK(std::fabs(pcc(eval.mos(), eval.predictions()).value - 0.8) < 0.03);
    const auto zero = simulate_correlated_pairs(1000, 0.0, seed);
    CHECK(std::fabs(pcc(zero.mos(), zero.predictions()).value) < 0.10);
    const auto high = simulate_correlated_pairs(1000, 0.9999, seed);
    CHECK(pcc(high.mos(), high.predictions()).value > 0.99);
  }
  const auto eval = simulate_correlated_pairs(50, 0.5, 1);
  for (const double h : eval.ci_halfwidths()) CHECK(h == 0.0);
  CHECK(eval.items().front().id == "p00");
  CHECK(eval.items().back().id == "p49");
  CHECK_THROWS(simulate_correlated_pairs(10, 1.0, 1));
  CHECK_THROWS(simulate_correlated_pairs(2, 0.5, 1));
}

TEST_CASE("simulation is reproducible") {
  const auto a = simulate_correlated_pairs(100, 0.8, 9);
  const auto b = simulate_correlated_pairs(100, 0.8, 9);
  const auto c = simulate_correlated_pairs(100, 0.8, 10);
  CHECK(std::equal(a.mos().begin(), a.mos().end(), b.mos().begin()));
  CHECK_FALSE(std::equal(a.mos().begin(), a.mos().end(), c.mos().begin()));
}

TEST_CASE("equal-count bounds") {
  const auto three = equal_count_bounds(1000, 3);
  CHECK(three == std::vector<std::size_t>{0, 334, 667, 1000});
  CHECK(equal_count_bounds(8, 4) == std::vector<std::size_t>{0, 2, 4, 6, 8});
  CHECK(equal_count_bounds(8, 2) == std::vector<std::size_t>{0, 4, 8});
  CHECK(equal_count_bounds(9, 2) == std::vector<std::size_t>{0, 5, 9});
}

TEST_CASE("restricted range regions") {
  const auto table = simulate_restricted_range_regions(1000, 0.8, 3, 4);
  REQUIRE(table.regions.size() == 3);
  CHECK(table.regions[0].size == 334);
  CHECK(table.regions[1].size == 333);
  CHECK(table.regions[2].size == 333);
  CHECK(table.regions[0].mos_max <= table.regions[1].mos_min);
  CHECK(table.regions[1].mos_max <= table.regions[2].mos_min);
  for (const auto& r : table.regions) CHECK(r.metrics[0]->value < table.full[0]->value);

  const auto whole = restricted_range_regions(simulate_correlated_pairs(200, 0.8, 4), 1);
  for (std::size_t m = 0; m < whole.metrics.size(); ++m) {
    CHECK_THAT(whole.regions[0].metrics[m]->value, Catch::Matchers::WithinAbs(whole.full[m]->value, 1e-12));
  }
}

TEST_CASE("noise-free raters vote the rounded latent quality") {
  RaterSimulationConfig cfg;
  cfg.n_stimuli = 40;
  cfg.n_raters = 5;
  cfg.seed = 3;
  const auto sim = simulate_rater_dataset(cfg);
  const auto table = mos_per_file(sim.dataset);
  for (std::size_t s = 0; s < sim.latent.size(); ++s) {
    const auto* row = table.find(sim.stimulus_ids[s]);
    REQUIRE(row);
    CHECK(row->mos == std::round(sim.latent[s]));
    CHECK(row->ci95 == 0.0);
    CHECK(sim.latent[s] >= 1.0);
    CHECK(sim.latent[s] <= 5.0);
  }
}

TEST_CASE("rater bias alone sets the per-stimulus spread") {
  RaterSimulationConfig cfg;
  cfg.n_stimuli = 30;
  cfg.n_raters = 12;
  cfg.rater_bias_sd = 0.5;
  cfg.scale = Scale{0, 100, ScaleKind::continuous};
  cfg.seed = 5;
  const auto sim = simulate_rater_dataset(cfg);
  const auto bias_spread = summarize_votes(sim.rater_bias).std_dev;
  const auto table = mos_per_file(sim.dataset);
  for (std::size_t s = 0; s < sim.latent.size(); ++s) {
    if (sim.latent[s] < 5 || sim.latent[s] > 95) continue;
    CHECK_THAT(table.find(sim.stimulus_ids[s])->std_dev, Catch::Matchers::WithinAbs(bias_spread, 1e-9));
  }
}

TEST_CASE("MOS converges on latent quality plus the mean bias") {
  RaterSimulationConfig cfg;
  cfg.n_stimuli = 20;
  cfg.n_raters = 2000;
  cfg.rater_bias_sd = 0.2;
  cfg.rater_noise_sd = 0.5;
  cfg.scale = Scale{0, 100, ScaleKind::continuous};
  cfg.seed = 6;
  const auto sim = simulate_rater_dataset(cfg);
  const double mean_bias = std::accumulate(sim.rater_bias.begin(), sim.rater_bias.end(), 0.0) / cfg.n_raters;
  const auto table = mos_per_file(sim.dataset);
  for (std::size_t s = 0; s < sim.latent.size(); ++s) {
    if (sim.latent[s] < 5 || sim.latent[s] > 95) continue;
    const double gap = table.find(sim.stimulus_ids[s])->mos - sim.latent[s] - mean_bias;
    CHECK(std::fabs(gap) < 3 * cfg.rater_noise_sd / std::sqrt(static_cast<double>(cfg.n_raters)));
  }
}

TEST_CASE("conditions group consecutive stimuli") {
  RaterSimulationConfig cfg;
  cfg.n_stimuli = 10;
  cfg.n_raters = 3;
  cfg.rater_noise_sd = 0.5;
  cfg.files_per_condition = 4;
  const auto sim = simulate_rater_dataset(cfg);
  REQUIRE(sim.dataset.conditions().size() == 3);
  CHECK(sim.dataset.conditions()[0].stimuli.size() == 4);
  CHECK(sim.dataset.conditions()[2].stimuli.size() == 2);
}

TEST_CASE("simulated predictions") {
  RaterSimulationConfig cfg;
  cfg.n_stimuli = 10;
  cfg.n_raters = 3;
  const auto sim = simulate_rater_dataset(cfg);
  const auto exact = simulate_predictions(sim, 0.0, 1);
  for (std::size_t s = 0; s < sim.latent.size(); ++s) CHECK(*exact.find(sim.stimulus_ids[s]) == sim.latent[s]);
  CHECK_THROWS(simulate_predictions(sim, -1.0, 1));

  RaterSimulationConfig bad = cfg;
  bad.n_raters = 1;
  CHECK_THROWS(simulate_rater_dataset(bad));
}
