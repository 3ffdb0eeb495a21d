#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "dpbandit/harness.hpp"
#include "dpbandit/text.hpp"

using namespace dpbandit;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "dpbandit_test_harness";
  fs::create_directories(dir);
  return (dir / name).string();
}

ExperimentConfig small(Algorithm algo, SettingKind setting) {
  ExperimentConfig cfg;
  cfg.algorithm = algo;
  cfg.setting = setting;
  cfg.horizon = 3000;
  cfg.repetitions = 4;
  cfg.base_seed = 17;
  cfg.geometric_checkpoints = 25;
  return cfg;
}

}  // namespace

TEST_CASE("setting names and instances") {
  for (auto s : {SettingKind::kS1, SettingKind::kS2, SettingKind::kS3,
                 SettingKind::kTwoArmHard, SettingKind::kKArmHard}) {
    CHECK(parse_setting_kind(to_string(s)) == s);
  }
  CHECK_THROWS_AS(parse_setting_kind("S4"), std::invalid_argument);
  CHECK(make_instance(SettingKind::kTwoArmHard, 1.0).size() == 2);
  CHECK(make_instance(SettingKind::kKArmHard, 0.5).size() == 5);
  CHECK(make_instance(SettingKind::kS2, 0.5).means()[1] ==
        doctest::Approx(0.55).epsilon(1e-14));
}

TEST_CASE("config validation") {
  ExperimentConfig cfg;
  CHECK_NOTHROW(cfg.validate(5));
  cfg.horizon = 4;
  CHECK_THROWS_AS(cfg.validate(5), std::invalid_argument);
  cfg = {};
  cfg.repetitions = 0;
  CHECK_THROWS_AS(cfg.validate(5), std::invalid_argument);
  cfg = {};
  cfg.eps = 0.0;
  CHECK_THROWS_AS(cfg.validate(5), std::invalid_argument);
  cfg = {};
  cfg.v = 1.2;
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}

TEST_CASE("checkpoint grids") {
  ExperimentConfig cfg;
  cfg.horizon = 1000;
  cfg.checkpoint_stride = 300;
  CHECK(checkpoint_rounds(cfg) ==
        std::vector<std::uint64_t>{0, 300, 600, 900, 1000});
  cfg.checkpoint_stride = 0;
  cfg.geometric_checkpoints = 50;
  const auto geo = checkpoint_rounds(cfg);
  CHECK(geo.front() == 0);
  CHECK(geo[1] == 1);
  CHECK(geo.back() == 1000);
  CHECK(std::is_sorted(geo.begin(), geo.end()));
  CHECK(std::adjacent_find(geo.begin(), geo.end()) == geo.end());
}

TEST_CASE("run_single: single-arm instance has zero regret") {
  const BanditInstance one("one", {make_pareto_instance(Setting::kS1, 0.9).arm(2)},
                           0.9);
  PolicyConfig pc;
  pc.moments = MomentParams(one.u(), one.v());
  pc.horizon = 500;
  pc.arms = 1;
  for (auto algo : {Algorithm::kDprucb, Algorithm::kDprse, Algorithm::kLdprse,
                    Algorithm::kRucb}) {
    auto policy = make_policy(algo, pc);
    const std::uint64_t rounds[] = {0, 1, 100, 500};
    const auto trace = run_policy(*policy, one, 500, 5, 0, rounds);
    for (double r : trace.cum_regret) CHECK(r == 0.0);
    CHECK(trace.pull_counts == std::vector<std::uint64_t>{500});
  }
}

TEST_CASE("run_single: deterministic, monotone, and equal to sum of gap times pulls") {
  for (auto algo : {Algorithm::kDprucb, Algorithm::kDprse, Algorithm::kLdprse,
                    Algorithm::kRucb}) {
    for (auto setting : {SettingKind::kS3, SettingKind::kTwoArmHard}) {
      auto cfg = small(algo, setting);
      cfg.eps = 50.0;
      CAPTURE(to_string(algo));
      const auto a = run_single(cfg, 2);
      const auto b = run_single(cfg, 2);
      CHECK(a.cum_regret == b.cum_regret);
      CHECK(a.pull_counts == b.pull_counts);
      CHECK(a.rounds == checkpoint_rounds(cfg));
      CHECK(a.cum_regret.front() == 0.0);
      CHECK(std::is_sorted(a.cum_regret.begin(), a.cum_regret.end()));

      const auto inst = make_instance(setting, cfg.v);
      double expected = 0.0;
      std::uint64_t total = 0;
      for (std::size_t arm = 0; arm < inst.size(); ++arm) {
        expected += inst.gaps()[arm] * static_cast<double>(a.pull_counts[arm]);
        total += a.pull_counts[arm];
      }
      CHECK(total == cfg.horizon);
      CHECK(a.cum_regret.back() == expected);
    }
  }
}

TEST_CASE("run_single: errors carry the repetition and round") {
  auto cfg = small(Algorithm::kDprucb, SettingKind::kS1);
  cfg.noise_mode = NoiseMode::kZero;
  const auto inst = make_instance(cfg.setting, cfg.v);
  auto pc = policy_config(cfg, inst, 3);
  pc.faults.skip_truncation = true;
  auto policy = make_policy(cfg.algorithm, pc);
  const auto rounds = checkpoint_rounds(cfg);
  try {
    run_policy(*policy, inst, cfg.horizon, cfg.base_seed, 3, rounds);
    FAIL("expected a sensitivity error");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("rep 3") != std::string::npos);
    CHECK(msg.find("round") != std::string::npos);
  }
}

TEST_CASE("summarize") {
  RegretTrace a{{0, 10}, {0.0, 3.0}, {}};
  RegretTrace b{{0, 10}, {0.0, 5.0}, {}};
  const RegretTrace one[] = {a};
  const auto s1 = summarize(one);
  CHECK(s1.n_reps == 1);
  CHECK(s1.stddev == std::vector<double>{0.0, 0.0});

  const RegretTrace two[] = {a, b};
  const auto s2 = summarize(two);
  CHECK(s2.mean[1] == 4.0);
  CHECK(s2.stddev[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

  std::vector<RegretTrace> same(7, RegretTrace{{0, 5, 9}, {0.0, 0.1, 0.7}, {}});
  const auto s3 = summarize(same);
  CHECK(s3.mean == std::vector<double>{0.0, 0.1, 0.7});
  for (double sd : s3.stddev) CHECK(sd == 0.0);

  RegretTrace off{{0, 11}, {0.0, 1.0}, {}};
  const RegretTrace mismatched[] = {a, off};
  CHECK_THROWS_AS(summarize(mismatched), std::invalid_argument);
}

TEST_CASE("run_experiment: one repetition has zero spread") {
  auto cfg = small(Algorithm::kDprucb, SettingKind::kS1);
  cfg.repetitions = 1;
  const auto res = run_experiment(cfg);
  CHECK(res.summary.n_reps == 1);
  for (double sd : res.summary.stddev) CHECK(sd == 0.0);
  CHECK(res.summary.mean == res.traces[0].cum_regret);
}

TEST_CASE("run_experiment: threaded equals sequential bit for bit") {
  for (auto algo : {Algorithm::kDprucb, Algorithm::kLdprse}) {
    auto cfg = small(algo, SettingKind::kS2);
    cfg.eps = 1e5;
    cfg.repetitions = 6;
    cfg.threads = 1;
    const auto seq = run_experiment(cfg);
    cfg.threads = 3;
    const auto par = run_experiment(cfg);
    REQUIRE(seq.traces.size() == par.traces.size());
    for (std::size_t r = 0; r < seq.traces.size(); ++r) {
      CHECK(seq.traces[r].cum_regret == par.traces[r].cum_regret);
      CHECK(seq.traces[r].cum_regret == run_single(cfg, r).cum_regret);
    }
    CHECK(seq.summary.mean == par.summary.mean);
    CHECK(seq.summary.stddev == par.summary.stddev);
  }
}

TEST_CASE("write_csv: header-only and single-row files") {
  const auto cfg = small(Algorithm::kDprse, SettingKind::kS1);

  const ExperimentResult empty{{RegretTrace{}}, SummaryStats{{}, {}, {}, 1}};
  const auto p0 = scratch("empty");
  write_csv(empty, cfg, p0);
  CHECK(slurp(p0 + ".runs.csv") == std::string(kRunsHeader) + "\n");
  CHECK(slurp(p0 + ".summary.csv") == std::string(kSummaryHeader) + "\n");

  const RegretTrace t{{7}, {0.25}, {}};
  const RegretTrace one[] = {t};
  const ExperimentResult single{{t}, summarize(one)};
  const auto p1 = scratch("single");
  write_csv(single, cfg, p1);
  const auto runs = lines_of(slurp(p1 + ".runs.csv"));
  const auto summary = lines_of(slurp(p1 + ".summary.csv"));
  REQUIRE(runs.size() == 2);
  REQUIRE(summary.size() == 2);
  CHECK(runs[1] == "dprse,S1,1,0.90000000000000002,0,7,0.25");
  CHECK(summary[1] == "dprse,S1,1,0.90000000000000002,7,0.25,0,1");

  CHECK_THROWS_AS(write_csv(single, cfg, "/nonexistent-dir/x"), std::runtime_error);
}

TEST_CASE("write_csv: runs round-trip to the summary and meta records the config") {
  auto cfg = small(Algorithm::kDprucb, SettingKind::kS3);
  cfg.repetitions = 5;
  const auto res = run_experiment(cfg);
  const auto path = scratch("roundtrip");
  write_csv(res, cfg, path);

  std::ifstream runs_in(path + ".runs.csv");
  const auto rows = read_runs_csv(runs_in);
  std::map<std::uint64_t, RegretTrace> by_rep;
  for (const auto& r : rows) {
    CHECK(r.algo == "dprucb");
    CHECK(r.setting == "S3");
    by_rep[r.rep].rounds.push_back(r.t);
    by_rep[r.rep].cum_regret.push_back(r.cum_regret);
  }
  std::vector<RegretTrace> traces;
  for (auto& [rep, tr] : by_rep) {
    CHECK(tr.cum_regret == res.traces[rep].cum_regret);
    traces.push_back(std::move(tr));
  }
  const auto again = summarize(traces);

  const auto summary = lines_of(slurp(path + ".summary.csv"));
  REQUIRE(summary.size() == again.rounds.size() + 1);
  for (std::size_t i = 0; i < again.rounds.size(); ++i) {
    const auto f = text::split(summary[i + 1], ',');
    REQUIRE(f.size() == 8);
    CHECK(text::parse_u64(f[4]) == again.rounds[i]);
    CHECK(std::abs(text::parse_double(f[5]) - again.mean[i]) <=
          1e-12 * std::max(1.0, again.mean[i]));
    CHECK(std::abs(text::parse_double(f[6]) - again.stddev[i]) <=
          1e-12 * std::max(1.0, again.stddev[i]));
    CHECK(text::parse_u64(f[7]) == 5);
  }

  const auto meta = slurp(path + ".meta");
  CHECK(meta.find(std::string("version=") + DPBANDIT_VERSION) != std::string::npos);
  CHECK(meta.find("algo=dprucb\n") != std::string::npos);
  CHECK(meta.find("horizon=3000\n") != std::string::npos);
  CHECK(meta.find("base_seed=17\n") != std::string::npos);
  CHECK(meta.find("log_base=e\n") != std::string::npos);
  CHECK(meta.find("instance.K=5\n") != std::string::npos);
}

TEST_CASE("read_runs_csv rejects malformed input") {
  std::istringstream bad_header("a,b,c\n");
  CHECK_THROWS_AS(read_runs_csv(bad_header), std::invalid_argument);
  std::istringstream short_row(std::string(kRunsHeader) + "\ndprse,S1,1,0.9,0\n");
  CHECK_THROWS_AS(read_runs_csv(short_row), std::invalid_argument);
}

TEST_CASE("transcript output") {
  auto cfg = small(Algorithm::kDprse, SettingKind::kTwoArmHard);
  cfg.horizon = 20;
  std::vector<TranscriptRow> rows;
  run_single(cfg, 0, &rows);
  REQUIRE(rows.size() == 20);
  std::ostringstream out;
  write_transcript(out, rows);
  const auto lines = lines_of(out.str());
  CHECK(lines.front().find(kTranscriptSchema) != std::string::npos);
  CHECK(lines.size() >= 21);
}
