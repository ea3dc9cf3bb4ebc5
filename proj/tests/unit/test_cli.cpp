#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmeval/cli/app.hpp"
#include "qmeval/cli/manifest.hpp"
#include "support/fixtures.hpp"

using namespace qmeval::cli;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

const fs::path kData = QMEVAL_TEST_DATA;

std::string data(const std::string& name) { return (kData / name).string(); }

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

json load_json(const fs::path& p) { return json::parse(qmeval::testing::slurp(p)); }

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

const json& metric_row(const json& model, const std::string& name) {
  for (const auto& row : model.at("metrics")) {
    if (row.at("metric") == name) return row;
  }
  throw std::runtime_error("metric " + name + " missing");
}

}  // namespace

TEST_CASE("evaluate two models") {
  qmeval::testing::TempDir dir("cli-eval");
  const auto r = run({"--out-dir", dir.path().string(), "evaluate", "--ratings", data("ratings_small.csv"),
                      "--predictions", data("model_a.csv"), "--predictions", "second=" + data("model_b.csv")});
  REQUIRE(r.code == kExitOk);
  // model_b scores an id nobody rated
  CHECK_THAT(r.err, ContainsSubstring("second: 1 ids dropped"));

  const auto report = load_json(dir / "metrics.json");
  REQUIRE(report.at("models").size() == 2);
  const auto& a = report["models"][0];
  const auto& b = report["models"][1];
  CHECK(a.at("model") == "model_a");
  CHECK(b.at("model") == "second");
  CHECK(b.at("unknown_prediction_ids") == 1);
  REQUIRE(a.at("metrics").size() == 4);

  // Reference values from scipy.stats and a hand count of the admitted pairs.
  CHECK_THAT(metric_row(a, "PCC").at("value").get<double>(), WithinAbs(0.9872514103940908, 1e-12));
  CHECK_THAT(metric_row(a, "SRCC").at("value").get<double>(), WithinAbs(0.9761904761904763, 1e-12));
  CHECK_THAT(metric_row(a, "KTAU").at("value").get<double>(), WithinAbs(0.9285714285714285, 1e-12));
  CHECK(metric_row(a, "CCI").at("value").get<double>() == 1.0);
  CHECK(metric_row(a, "CCI").at("n_pairs_used") == 19);
  CHECK_THAT(metric_row(b, "PCC").at("value").get<double>(), WithinAbs(0.8973492561006451, 1e-12));
  CHECK_THAT(metric_row(b, "SRCC").at("value").get<double>(), WithinAbs(0.8333333333333335, 1e-12));
  CHECK_THAT(metric_row(b, "KTAU").at("value").get<double>(), WithinAbs(0.6428571428571428, 1e-12));
  CHECK_THAT(metric_row(b, "CCI").at("value").get<double>(), WithinAbs(18.0 / 19.0, 1e-15));
  CHECK(metric_row(b, "PCC").at("n_items") == 8);
  CHECK(metric_row(b, "PCC").at("n_pairs_used") == 28);

  const auto mos = qmeval::testing::slurp(dir / "mos.csv");
  CHECK(mos.find("s1,") != std::string::npos);
  CHECK(report.at("granularity") == "file");
}

TEST_CASE("report schema") {
  qmeval::testing::TempDir dir("cli-schema");
  REQUIRE(run({"--out-dir", dir.path().string(), "evaluate", "--ratings", data("ratings_small.csv"), "--predictions",
               data("model_a.csv")})
              .code == kExitOk);
  const auto report = load_json(dir / "metrics.json");
  std::vector<std::string> keys;
  for (const auto& [k, v] : report.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"manifest", "granularity", "models"});
  const auto& m = report.at("manifest");
  keys.clear();
  for (const auto& [k, v] : m.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"tool", "version", "subcommand", "config", "inputs", "seed", "timestamp"});
  CHECK(m.at("timestamp") == "2023-11-14T22:13:20Z");
  CHECK(m.at("subcommand") == "evaluate");
  CHECK(first_line(qmeval::testing::slurp(dir / "mos.csv")).rfind("id,", 0) == 0);

  qmeval::testing::TempDir csv_dir("cli-csv");
  REQUIRE(run({"--out-dir", csv_dir.path().string(), "--format", "csv", "evaluate", "--ratings",
               data("ratings_small.csv"), "--predictions", data("model_a.csv")})
              .code == kExitOk);
  const auto csv = qmeval::testing::slurp(csv_dir / "metrics.csv");
  CHECK(first_line(csv) == "model,metric,value,n_items,n_pairs_used");
  CHECK_THAT(csv, ContainsSubstring("model_a,CCI,1,8,19"));
  CHECK(fs::exists(csv_dir / "manifest.json"));
  CHECK_FALSE(fs::exists(csv_dir / "metrics.json"));
}

TEST_CASE("manifest digests are the sha256 of the inputs") {
  qmeval::testing::TempDir dir("cli-digest");
  const auto abc = dir.write("abc.txt", "abc");
  CHECK(sha256_file(abc) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const auto empty = dir.write("empty.txt", "");
  CHECK(sha256_file(empty) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");

  REQUIRE(run({"--out-dir", dir.path().string(), "evaluate", "--ratings", data("ratings_small.csv"), "--predictions",
               data("model_a.csv")})
              .code == kExitOk);
  const auto inputs = load_json(dir / "metrics.json").at("manifest").at("inputs");
  REQUIRE(inputs.size() == 2);
  CHECK(inputs[0].at("role") == "ratings");
  CHECK(inputs[0].at("sha256") == sha256_file(data("ratings_small.csv")));
  CHECK(inputs[1].at("role") == "predictions");
  CHECK(inputs[1].at("sha256") == sha256_file(data("model_a.csv")));
}

TEST_CASE("input errors exit 2") {
  qmeval::testing::TempDir dir("cli-errors");
  const std::string out = dir.path().string();

  SECTION("prediction ids that match nothing") {
    const auto r = run({"--out-dir", out, "evaluate", "--ratings", data("ratings_small.csv"), "--predictions",
                        data("model_unknown.csv")});
    CHECK(r.code == kExitInputError);
    CHECK_THAT(r.err, ContainsSubstring("model_unknown.csv"));
  }
  SECTION("score outside the scale carries line and column") {
    const auto r = run({"--out-dir", out, "evaluate", "--ratings", data("ratings_bad.csv"), "--predictions",
                        data("model_a.csv")});
    CHECK(r.code == kExitInputError);
    CHECK_THAT(r.err, ContainsSubstring("ratings_bad.csv:5:4:"));
  }
  SECTION("granularity mismatch") {
    const auto r = run({"--out-dir", out, "evaluate", "--ratings", data("ratings_small.csv"), "--predictions",
                        data("model_condition.csv")});
    CHECK(r.code == kExitInputError);
  }
  SECTION("missing file") {
    const auto r = run({"--out-dir", out, "evaluate", "--ratings", data("nope.csv"), "--predictions",
                        data("model_a.csv")});
    CHECK(r.code == kExitInputError);
    CHECK_THAT(r.err, ContainsSubstring("nope.csv"));
  }
  SECTION("command line problems") {
    CHECK(run({}).code == kExitInputError);
    CHECK(run({"evaluate"}).code == kExitInputError);
    CHECK(run({"frobnicate"}).code == kExitInputError);
    CHECK(run({"--format", "xml", "evaluate", "--ratings", "a", "--predictions", "b"}).code == kExitInputError);
    CHECK(run({"experiment", "-k", "sideways"}).code == kExitInputError);
    CHECK(run({"--help"}).code == kExitOk);
  }
  CHECK_FALSE(fs::exists(dir / "metrics.json"));
}

TEST_CASE("condition granularity") {
  qmeval::testing::TempDir dir("cli-cond");
  const auto r = run({"--out-dir", dir.path().string(), "evaluate", "--granularity", "condition", "--ratings",
                      data("ratings_small.csv"), "--predictions", data("model_condition.csv"), "--metrics",
                      "PCC,KTAU"});
  REQUIRE(r.code == kExitOk);
  const auto report = load_json(dir / "metrics.json");
  const auto& model = report.at("models").at(0);
  CHECK(model.at("n_items") == 4);
  CHECK(model.at("metrics").size() == 2);
  CHECK_THAT(metric_row(model, "KTAU").at("value").get<double>(), WithinAbs(1.0, 1e-15));
}

TEST_CASE("empty constrained set exits 3") {
  qmeval::testing::TempDir dir("cli-empty");
  const auto r = run({"--out-dir", dir.path().string(), "evaluate", "--ratings", data("ratings_overlap.csv"),
                      "--predictions", data("model_overlap.csv")});
  CHECK(r.code == kExitDegenerate);
  CHECK_THAT(r.err, ContainsSubstring("no statistically distinguishable pairs"));
  // the other metrics are still reported
  const auto model = load_json(dir / "metrics.json").at("models").at(0);
  CHECK(metric_row(model, "CCI").at("value").is_null());
  CHECK(metric_row(model, "PCC").at("value").is_number());

  const auto s = run({"--out-dir", dir.path().string(), "slope-plot", "--ratings", data("ratings_overlap.csv"),
                      "--predictions", data("model_overlap.csv")});
  CHECK(s.code == kExitDegenerate);
  CHECK_FALSE(fs::exists(dir / "slope.csv"));
}

TEST_CASE("slope plot of perfect and reversed predictors") {
  qmeval::testing::TempDir dir("cli-slope");
  // MOS itself as prediction
  std::string perfect = "id,score\n";
  std::string reversed = "id,score\n";
  const auto mos_run = run({"--out-dir", dir.path().string(), "evaluate", "--ratings", data("ratings_small.csv"),
                            "--predictions", data("model_a.csv")});
  REQUIRE(mos_run.code == kExitOk);
  std::istringstream mos(qmeval::testing::slurp(dir / "mos.csv"));
  std::string line;
  std::getline(mos, line);
  while (std::getline(mos, line)) {
    const auto id = line.substr(0, line.find(','));
    const auto rest = line.substr(line.find(',') + 1);
    const auto value = rest.substr(0, rest.find(','));
    perfect += id + "," + value + "\n";
    reversed += id + ",-" + value + "\n";
  }
  const auto p = dir.write("perfect.csv", perfect);
  const auto q = dir.write("reversed.csv", reversed);

  for (const auto& [file, expect] : {std::pair{p, std::string("true")}, std::pair{q, std::string("false")}}) {
    qmeval::testing::TempDir out("cli-slope-out");
    const auto r = run({"--out-dir", out.path().string(), "slope-plot", "--ratings", data("ratings_small.csv"),
                        "--predictions", file.string()});
    REQUIRE(r.code == kExitOk);
    std::istringstream csv(qmeval::testing::slurp(out / "slope.csv"));
    std::getline(csv, line);
    CHECK(line == "id_a,id_b,mos_distance,slope,concordant");
    int rows = 0;
    while (std::getline(csv, line)) {
      ++rows;
      CHECK(line.substr(line.rfind(',') + 1) == expect);
      const auto slope = std::stod(line.substr(0, line.rfind(',')).substr(line.substr(0, line.rfind(',')).rfind(',') + 1));
      CHECK_THAT(slope, WithinAbs(expect == "true" ? 1.0 : -1.0, 1e-12));
    }
    CHECK(rows == 19);
    CHECK(fs::exists(out / "slope.svg"));
    CHECK(fs::exists(out / "manifest.json"));
  }
}

TEST_CASE("experiments are reproducible") {
  qmeval::testing::TempDir one("cli-exp1"), eight("cli-exp8"), again("cli-exp-again");
  const std::vector<std::string> common = {"experiment",     "-k",     "sample-size",   "--ratings",
                                           data("ratings_small.csv"),  "--predictions", data("model_a.csv"),
                                           "--replicates", "50", "--grid", "3,5,8"};
  auto args1 = std::vector<std::string>{"--seed", "11", "--threads", "1", "--out-dir", one.path().string()};
  auto args8 = std::vector<std::string>{"--seed", "11", "--threads", "8", "--out-dir", eight.path().string()};
  args1.insert(args1.end(), common.begin(), common.end());
  args8.insert(args8.end(), common.begin(), common.end());
  REQUIRE(run(args1).code == kExitOk);
  REQUIRE(run(args8).code == kExitOk);
  for (const auto* name : {"report.json", "replicates.csv"}) {
    CHECK(qmeval::testing::slurp(one / name) == qmeval::testing::slurp(eight / name));
  }

  // rerun from the written report alone
  REQUIRE(run({"--out-dir", again.path().string(), "experiment", "--config", (one / "report.json").string()}).code ==
          kExitOk);
  for (const auto* name : {"report.json", "replicates.csv"}) {
    CHECK(qmeval::testing::slurp(one / name) == qmeval::testing::slurp(again / name));
  }

  const auto report = load_json(one / "report.json");
  CHECK(report.at("population_size") == 8);
  REQUIRE(report.at("points").size() == 3);
  const auto& last = report["points"][2];
  CHECK(last.at("size") == 8);
  // the whole population at every replicate
  for (const auto& s : last.at("metrics")) {
    CHECK(s.at("mean_abs_deviation").get<double>() == 0.0);
    CHECK(s.at("valid") == 50);
  }
  const auto replicates = qmeval::testing::slurp(one / "replicates.csv");
  CHECK(first_line(replicates) == "grid,metric,replicate,value");
  CHECK(std::count(replicates.begin(), replicates.end(), '\n') == 1 + 3 * 4 * 50);

  qmeval::testing::TempDir other("cli-exp-seed");
  args1[1] = "12";
  args1[5] = other.path().string();
  REQUIRE(run(args1).code == kExitOk);
  CHECK(qmeval::testing::slurp(one / "replicates.csv") != qmeval::testing::slurp(other / "replicates.csv"));
}

TEST_CASE("config file drives an experiment") {
  qmeval::testing::TempDir dir("cli-config");
  const auto config = dir.write("config.json", R"({"experiment": "restricted-range", "split": 4, "metrics": ["PCC"]})");
  const auto r = run({"--out-dir", dir.path().string(), "experiment", "--config", config.string(), "--ratings",
                      data("ratings_small.csv"), "--predictions", data("model_a.csv")});
  REQUIRE(r.code == kExitOk);
  const auto report = load_json(dir / "report.json");
  CHECK(report.at("experiment") == "restricted-range");
  REQUIRE(report.at("points").size() == 2);
  CHECK(report["points"][0].at("label") == "bad");
  CHECK(report["points"][0].at("size") == 2);
  CHECK(report["points"][0].at("metrics").size() == 1);

  const auto bad = dir.write("bad.json", R"({"experiment": "sample-size", "replicates": 0})");
  CHECK(run({"--out-dir", dir.path().string(), "experiment", "--config", bad.string(), "--ratings",
             data("ratings_small.csv"), "--predictions", data("model_a.csv")})
            .code == kExitInputError);
  const auto broken = dir.write("broken.json", "{");
  CHECK(run({"--out-dir", dir.path().string(), "experiment", "--config", broken.string()}).code == kExitInputError);
}

TEST_CASE("plots with no data are skipped with a warning") {
  qmeval::testing::TempDir dir("cli-plot");
  const auto r = run({"--out-dir", dir.path().string(), "experiment", "-k", "sample-size", "--ratings",
                      data("ratings_flat.csv"), "--predictions", data("model_flat.csv"), "--grid", "4,8",
                      "--replicates", "5", "--plot"});
  CHECK(r.code == kExitOk);
  CHECK_THAT(r.err, ContainsSubstring("every replicate is missing"));
  CHECK_THAT(r.err, ContainsSubstring("plot not written"));
  CHECK(fs::exists(dir / "report.json"));
  for (const auto& entry : fs::directory_iterator(dir.path())) CHECK(entry.path().extension() != ".svg");

  qmeval::testing::TempDir ok("cli-plot-ok");
  REQUIRE(run({"--out-dir", ok.path().string(), "experiment", "-k", "sample-size", "--ratings",
               data("ratings_small.csv"), "--predictions", data("model_a.csv"), "--grid", "4,8", "--replicates", "5",
               "--plot"})
              .code == kExitOk);
  CHECK(fs::exists(ok / "deviation.svg"));
  CHECK(qmeval::testing::slurp(ok / "deviation.svg").rfind("<svg", 0) == 0);
}

TEST_CASE("significance outputs") {
  qmeval::testing::TempDir dir("cli-sig");
  const auto r = run({"--out-dir", dir.path().string(), "significance", "--ratings", data("ratings_small.csv"),
                      "--all-pairs", "--correction", "none"});
  REQUIRE(r.code == kExitOk);
  const auto matrix = qmeval::testing::slurp(dir / "significance_matrix.csv");
  CHECK(first_line(matrix) == "condition_id,c1,c2,c3,c4");
  CHECK(std::count(matrix.begin(), matrix.end(), '\n') == 5);
  const auto report = load_json(dir / "neighborhoods.json");
  for (const auto* key : {"manifest", "alpha", "correction", "pairing", "conditions", "neighborhoods", "anchors"}) {
    CHECK(report.contains(key));
  }
  CHECK(report.at("pairing") == "auto");
  CHECK(report.at("conditions").size() == 4);

  CHECK(run({"--out-dir", dir.path().string(), "significance", "--ratings", data("ratings_small.csv"), "--anchor",
             "c9"})
            .code == kExitInputError);
  CHECK(run({"--out-dir", dir.path().string(), "significance", "--ratings", data("ratings_small.csv"), "--alpha",
             "1.5"})
            .code == kExitInputError);
}

TEST_CASE("simulated data feeds back into evaluate") {
  qmeval::testing::TempDir dir("cli-sim");
  REQUIRE(run({"--seed", "3", "--out-dir", dir.path().string(), "simulate", "--kind", "ratings", "--stimuli", "40",
               "--raters", "12"})
              .code == kExitOk);
  for (const auto* name : {"ratings.csv", "predictions.csv", "latent.csv", "manifest.json"}) {
    CHECK(fs::exists(dir / name));
  }
  qmeval::testing::TempDir eval("cli-sim-eval");
  const auto r = run({"--out-dir", eval.path().string(), "evaluate", "--ratings", (dir / "ratings.csv").string(),
                      "--predictions", (dir / "predictions.csv").string()});
  CHECK(r.code == kExitOk);
  CHECK(load_json(eval / "metrics.json").at("models").at(0).at("n_items") == 40);

  qmeval::testing::TempDir pairs("cli-sim-pairs");
  REQUIRE(run({"--seed", "3", "--out-dir", pairs.path().string(), "simulate", "--kind", "pairs", "--n", "100"}).code ==
          kExitOk);
  const auto text = qmeval::testing::slurp(pairs / "pairs.csv");
  CHECK(std::count(text.begin(), text.end(), '\n') == 101);

  qmeval::testing::TempDir regions("cli-sim-regions");
  REQUIRE(run({"--seed", "3", "--out-dir", regions.path().string(), "simulate", "--kind", "regions", "--n", "300",
               "--plot"})
              .code == kExitOk);
  CHECK(load_json(regions / "regions.json").is_object());
  CHECK(fs::exists(regions / "regions.svg"));
}
