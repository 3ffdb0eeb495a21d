#include "dpbandit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dpbandit/text.hpp"

namespace dpbandit {

namespace {

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::out | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

void close_output(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace

std::string_view to_string(SettingKind s) {
  switch (s) {
    case SettingKind::kS1:
      return "S1";
    case SettingKind::kS2:
      return "S2";
    case SettingKind::kS3:
      return "S3";
    case SettingKind::kTwoArmHard:
      return "two_arm_hard";
    case SettingKind::kKArmHard:
      return "k_arm_hard";
  }
  return "?";
}

SettingKind parse_setting_kind(std::string_view name) {
  if (name == "S1") return SettingKind::kS1;
  if (name == "S2") return SettingKind::kS2;
  if (name == "S3") return SettingKind::kS3;
  if (name == "two_arm_hard") return SettingKind::kTwoArmHard;
  if (name == "k_arm_hard") return SettingKind::kKArmHard;
  throw std::invalid_argument("unknown setting '" + std::string(name) + "'");
}

BanditInstance make_instance(SettingKind setting, double v) {
  switch (setting) {
    case SettingKind::kS1:
      return make_pareto_instance(Setting::kS1, v);
    case SettingKind::kS2:
      return make_pareto_instance(Setting::kS2, v);
    case SettingKind::kS3:
      return make_pareto_instance(Setting::kS3, v);
    case SettingKind::kTwoArmHard:
      return make_two_arm_hard_instance(0.1, v, HardFlavor::kPBar);
    case SettingKind::kKArmHard: {
      const double means[] = {0.5, 0.4, 0.3, 0.2, 0.1};
      return make_central_hard_instance(means, v);
    }
  }
  throw std::invalid_argument("unknown setting");
}

void ExperimentConfig::validate(std::size_t arms) const {
  if (!(v > 0.0 && v <= 1.0)) throw std::invalid_argument("v must lie in (0, 1]");
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("eps must be positive");
  }
  if (horizon < arms || horizon < 2) {
    throw std::invalid_argument("horizon must be >= max(2, number of arms)");
  }
  if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  if (checkpoint_stride == 0 && geometric_checkpoints < 2) {
    throw std::invalid_argument("need at least 2 geometric checkpoints");
  }
  if (beta < 0.0 || beta >= 1.0) throw std::invalid_argument("beta must lie in [0, 1)");
}

std::vector<std::uint64_t> checkpoint_rounds(const ExperimentConfig& config) {
  std::vector<std::uint64_t> rounds{0};
  const auto horizon = config.horizon;
  if (config.checkpoint_stride > 0) {
    for (std::uint64_t t = config.checkpoint_stride; t < horizon;
         t += config.checkpoint_stride) {
      rounds.push_back(t);
    }
  } else {
    const double log_h = std::log(static_cast<double>(horizon));
    const auto n = config.geometric_checkpoints;
    for (std::size_t k = 0; k < n; ++k) {
      const double frac = static_cast<double>(k) / static_cast<double>(n - 1);
      const auto t = static_cast<std::uint64_t>(std::llround(std::exp(frac * log_h)));
      rounds.push_back(std::clamp<std::uint64_t>(t, 1, horizon));
    }
  }
  rounds.push_back(horizon);
  std::sort(rounds.begin(), rounds.end());
  rounds.erase(std::unique(rounds.begin(), rounds.end()), rounds.end());
  return rounds;
}

void write_transcript(std::ostream& out, std::span<const TranscriptRow> rows) {
  out << "# " << kTranscriptSchema << '\n'
      << "round,arm,reward,truncated,committed\n";
  for (const auto& r : rows) {
    out << r.round << ',' << r.arm + 1 << ',' << text::format_double(r.reward)
        << ',' << (r.truncated ? text::format_double(*r.truncated) : "") << ','
        << (r.committed ? 1 : 0) << '\n';
  }
}

PolicyConfig policy_config(const ExperimentConfig& config,
                           const BanditInstance& instance, std::uint64_t rep) {
  PolicyConfig pc;
  pc.moments = MomentParams(instance.u(), instance.v());
  pc.eps = config.eps;
  pc.horizon = config.horizon;
  pc.beta = config.beta;
  pc.arms = instance.size();
  pc.seed = config.base_seed;
  pc.rep = rep;
  pc.noise_mode = config.noise_mode;
  return pc;
}

RegretTrace run_policy(Policy& policy, const BanditInstance& instance,
                       std::uint64_t horizon, std::uint64_t base_seed,
                       std::uint64_t rep, std::span<const std::uint64_t> rounds,
                       std::vector<TranscriptRow>* transcript) {
  const auto k = instance.size();
  std::vector<RandomStream> reward_streams;
  reward_streams.reserve(k);
  for (std::size_t a = 0; a < k; ++a) {
    reward_streams.emplace_back(
        StreamKey{base_seed, rep, a, StreamPurpose::kReward});
  }
  const auto gaps = instance.gaps();

  RegretTrace trace;
  trace.pull_counts.assign(k, 0);
  auto record = [&](std::uint64_t t) {
    double regret = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
      regret += gaps[a] * static_cast<double>(trace.pull_counts[a]);
    }
    trace.rounds.push_back(t);
    trace.cum_regret.push_back(regret);
  };

  std::size_t next = 0;
  while (next < rounds.size() && rounds[next] == 0) {
    record(0);
    ++next;
  }
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    try {
      const auto arm = policy.select_arm(t);
      const double reward = sample(instance.arm(arm), reward_streams[arm]);
      const auto used = policy.observe(arm, reward);
      ++trace.pull_counts[arm];
      if (transcript != nullptr) {
        transcript->push_back(
            {t, arm, reward, used, policy.committed().has_value()});
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("rep " + std::to_string(rep) + ", round " +
                               std::to_string(t) + ": " + e.what());
    }
    while (next < rounds.size() && rounds[next] == t) {
      record(t);
      ++next;
    }
  }
  return trace;
}

RegretTrace run_single(const ExperimentConfig& config, std::uint64_t rep,
                       std::vector<TranscriptRow>* transcript) {
  const auto instance = make_instance(config.setting, config.v);
  config.validate(instance.size());
  auto policy = make_policy(config.algorithm, policy_config(config, instance, rep));
  const auto rounds = checkpoint_rounds(config);
  return run_policy(*policy, instance, config.horizon, config.base_seed, rep,
                    rounds, transcript);
}

SummaryStats summarize(std::span<const RegretTrace> traces) {
  SummaryStats stats;
  stats.n_reps = traces.size();
  if (traces.empty()) return stats;
  stats.rounds = traces.front().rounds;
  for (const auto& tr : traces) {
    if (tr.rounds != stats.rounds) {
      throw std::invalid_argument("traces have different checkpoints");
    }
  }
  const double n = static_cast<double>(traces.size());
  for (std::size_t c = 0; c < stats.rounds.size(); ++c) {
    CompensatedSum sum;
    double lo = traces.front().cum_regret[c];
    double hi = lo;
    for (const auto& tr : traces) {
      sum.add(tr.cum_regret[c]);
      lo = std::min(lo, tr.cum_regret[c]);
      hi = std::max(hi, tr.cum_regret[c]);
    }
    const double m = std::clamp(sum.value() / n, lo, hi);
    CompensatedSum sq;
    for (const auto& tr : traces) {
      const double d = tr.cum_regret[c] - m;
      sq.add(d * d);
    }
    stats.mean.push_back(m);
    stats.stddev.push_back(traces.size() > 1 ? std::sqrt(sq.value() / (n - 1.0))
                                             : 0.0);
  }
  return stats;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const auto instance = make_instance(config.setting, config.v);
  config.validate(instance.size());

  ExperimentResult result;
  const auto reps = config.repetitions;
  result.traces.resize(reps);
  std::vector<std::exception_ptr> errors(reps);

  unsigned workers = config.threads == 0 ? std::thread::hardware_concurrency()
                                         : config.threads;
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(reps)));

  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  auto work = [&] {
    while (!failed.load()) {
      const auto rep = next.fetch_add(1);
      if (rep >= reps) return;
      try {
        result.traces[rep] = run_single(config, rep);
      } catch (...) {
        errors[rep] = std::current_exception();
        failed.store(true);
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
  }
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
  result.summary = summarize(result.traces);
  return result;
}

void write_csv(const ExperimentResult& result, const ExperimentConfig& config,
               const std::string& path) {
  using text::format_double;
  const auto algo = to_string(config.algorithm);
  const auto setting = to_string(config.setting);
  const auto eps = format_double(config.eps);
  const auto v = format_double(config.v);

  {
    const auto file = path + ".runs.csv";
    auto out = open_output(file);
    out << kRunsHeader << '\n';
    for (std::size_t rep = 0; rep < result.traces.size(); ++rep) {
      const auto& tr = result.traces[rep];
      for (std::size_t c = 0; c < tr.rounds.size(); ++c) {
        out << algo << ',' << setting << ',' << eps << ',' << v << ',' << rep
            << ',' << tr.rounds[c] << ',' << format_double(tr.cum_regret[c])
            << '\n';
      }
    }
    close_output(out, file);
  }
  {
    const auto file = path + ".summary.csv";
    auto out = open_output(file);
    out << kSummaryHeader << '\n';
    const auto& s = result.summary;
    for (std::size_t c = 0; c < s.rounds.size(); ++c) {
      out << algo << ',' << setting << ',' << eps << ',' << v << ','
          << s.rounds[c] << ',' << format_double(s.mean[c]) << ','
          << format_double(s.stddev[c]) << ',' << s.n_reps << '\n';
    }
    close_output(out, file);
  }
  {
    const auto file = path + ".meta";
    auto out = open_output(file);
    const auto instance = make_instance(config.setting, config.v);
    out << "version=" << DPBANDIT_VERSION << '\n'
        << "algo=" << algo << '\n'
        << "setting=" << setting << '\n'
        << "v=" << v << '\n'
        << "epsilon=" << eps << '\n'
        << "horizon=" << config.horizon << '\n'
        << "repetitions=" << config.repetitions << '\n'
        << "base_seed=" << config.base_seed << '\n'
        << "beta=" << format_double(config.beta > 0.0
                                        ? config.beta
                                        : 1.0 / static_cast<double>(config.horizon))
        << '\n'
        << "checkpoint_stride=" << config.checkpoint_stride << '\n'
        << "geometric_checkpoints=" << config.geometric_checkpoints << '\n'
        << "noise="
        << (config.noise_mode == NoiseMode::kLaplace ? "laplace"
            : config.noise_mode == NoiseMode::kZero  ? "zero"
                                                      : "unit")
        << '\n'
        << "log_base=e\n";
    std::istringstream desc(to_key_value(instance));
    for (std::string line; std::getline(desc, line);) {
      out << "instance." << line << '\n';
    }
    close_output(out, file);
  }
}

std::vector<RunRow> read_runs_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRunsHeader) {
    throw std::invalid_argument("runs csv: unexpected header");
  }
  std::vector<RunRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = text::split(line, ',');
    if (f.size() != 7) throw std::invalid_argument("runs csv: bad row '" + line + "'");
    rows.push_back({std::string(f[0]), std::string(f[1]),
                    text::parse_double(f[2]), text::parse_double(f[3]),
                    text::parse_u64(f[4]), text::parse_u64(f[5]),
                    text::parse_double(f[6])});
  }
  return rows;
}

}  // namespace dpbandit
