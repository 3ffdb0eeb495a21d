// Command-line driver: runs one experiment cell and writes its CSV files.
//
//   dpbandit --algo dprse --setting S1 --v 0.9 --eps 1.0 --horizon 100000
//            --reps 90 --seed 7 --out results/s1_dprse

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "dpbandit/harness.hpp"
#include "dpbandit/text.hpp"

namespace {

void parse_checkpoints(const std::string& arg, dpbandit::ExperimentConfig& cfg) {
  constexpr std::string_view kStride = "stride:";
  if (arg.rfind(kStride, 0) == 0) {
    cfg.checkpoint_stride =
        dpbandit::text::parse_u64(std::string_view(arg).substr(kStride.size()));
    if (cfg.checkpoint_stride == 0) {
      throw std::invalid_argument("checkpoint stride must be positive");
    }
  } else {
    cfg.checkpoint_stride = 0;
    cfg.geometric_checkpoints = dpbandit::text::parse_u64(arg);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Private heavy-tailed bandit simulator"};

  std::string algo = "dprse";
  std::string setting = "S1";
  std::string checkpoints = "200";
  std::string transcript_path;
  bool zero_noise = false;
  dpbandit::ExperimentConfig cfg;

  app.add_option("--algo", algo, "dprucb | dprse | ldprse | rucb")
      ->capture_default_str();
  app.add_option("--setting", setting,
                 "S1 | S2 | S3 | two_arm_hard | k_arm_hard")
      ->capture_default_str();
  app.add_option("--v", cfg.v, "moment order minus one, in (0, 1]")
      ->capture_default_str();
  app.add_option("--eps", cfg.eps, "privacy budget")->capture_default_str();
  app.add_option("--horizon", cfg.horizon, "rounds T")->capture_default_str();
  app.add_option("--reps", cfg.repetitions, "independent repetitions")
      ->capture_default_str();
  app.add_option("--seed", cfg.base_seed, "base seed")->capture_default_str();
  app.add_option("--out", cfg.output_path,
                 "output prefix for .runs.csv/.summary.csv/.meta")
      ->required();
  app.add_option("--checkpoints", checkpoints,
                 "N geometric checkpoints, or stride:K")
      ->capture_default_str();
  app.add_option("--beta", cfg.beta,
                 "elimination confidence (default 1/horizon)");
  app.add_option("--threads", cfg.threads, "worker threads (0 = all cores)")
      ->capture_default_str();
  app.add_option("--transcript", transcript_path,
                 "write the rep-0 arm/reward transcript to this file");
#ifdef DPBANDIT_TEST_HOOKS
  app.add_flag("--zero-noise", zero_noise,
               "replace every Laplace draw by 0 (test builds only)");
#endif

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.algorithm = dpbandit::parse_algorithm(algo);
    cfg.setting = dpbandit::parse_setting_kind(setting);
    parse_checkpoints(checkpoints, cfg);
    if (zero_noise) cfg.noise_mode = dpbandit::NoiseMode::kZero;

    const auto result = dpbandit::run_experiment(cfg);
    dpbandit::write_csv(result, cfg, cfg.output_path);

    if (!transcript_path.empty()) {
      std::vector<dpbandit::TranscriptRow> rows;
      dpbandit::run_single(cfg, 0, &rows);
      std::ofstream out(transcript_path);
      if (!out) throw std::runtime_error("cannot open '" + transcript_path + "'");
      dpbandit::write_transcript(out, rows);
    }

    const auto& s = result.summary;
    std::cout << algo << ' ' << setting << " v=" << cfg.v << " eps=" << cfg.eps
              << " T=" << cfg.horizon << " reps=" << s.n_reps
              << ": final regret mean=" << s.mean.back()
              << " std=" << s.stddev.back() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "dpbandit: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
