#include "dpbandit/audit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dpbandit {

namespace {

constexpr double kRelTol = 1e-12;

bool close(double actual, double expected) {
  return std::abs(actual - expected) <= kRelTol * std::abs(expected);
}

class Auditor {
 public:
  explicit Auditor(AuditReport& report) : report_(report) {}

  void flag(MechanismSite site, std::size_t arm, std::uint64_t index,
            std::string message) {
    report_.findings.push_back({site, arm, index, std::move(message)});
  }

  void check_input(const MechanismInput& in, MechanismSite site,
                   double expected_bound) {
    ++report_.inputs_checked;
    if (in.site != site) {
      flag(in.site, in.mechanism_arm, in.index, "input at unexpected site");
    }
    if (in.source_arm != in.mechanism_arm) {
      flag(in.site, in.mechanism_arm, in.index,
           "reward of arm " + std::to_string(in.source_arm) +
               " entered another arm's mechanism");
    }
    if (!close(in.bound, expected_bound)) {
      flag(in.site, in.mechanism_arm, in.index,
           "declared bound " + std::to_string(in.bound) + " != expected " +
               std::to_string(expected_bound));
    }
    if (!(std::abs(in.value) <= in.bound)) {
      flag(in.site, in.mechanism_arm, in.index,
           "value " + std::to_string(in.value) + " exceeds bound " +
               std::to_string(in.bound));
    }
    if (!rounds_.insert(in.round).second) {
      flag(in.site, in.mechanism_arm, in.index,
           "round " + std::to_string(in.round) + " used by two mechanisms");
    }
  }

  void check_draw(const NoiseDraw& d, MechanismSite site, double expected_bound,
                  double expected_scale) {
    ++report_.draws_checked;
    if (d.site != site) flag(d.site, d.arm, d.index, "draw at unexpected site");
    if (!close(d.bound, expected_bound)) {
      flag(d.site, d.arm, d.index,
           "draw calibrated for bound " + std::to_string(d.bound) +
               " != expected " + std::to_string(expected_bound));
    }
    if (!close(d.scale, expected_scale)) {
      flag(d.site, d.arm, d.index,
           "noise scale " + std::to_string(d.scale) + " != mandated " +
               std::to_string(expected_scale));
    }
  }

 private:
  AuditReport& report_;
  std::set<std::uint64_t> rounds_;
};

void audit_tree_policy(const DpRobustUcb& policy, const MechanismLedger& ledger,
                       AuditReport& report) {
  const auto& cfg = policy.config();
  const double horizon = static_cast<double>(cfg.horizon);
  const double eps_prime = cfg.eps / std::log(horizon);
  Auditor audit(report);

  std::vector<std::uint64_t> inserted(cfg.arms, 0);
  for (const auto& in : ledger.inputs) {
    if (in.mechanism_arm >= cfg.arms) {
      audit.flag(in.site, in.mechanism_arm, in.index, "unknown arm");
      continue;
    }
    if (in.index != ++inserted[in.mechanism_arm]) {
      audit.flag(in.site, in.mechanism_arm, in.index,
                 "tree insertions out of sequence");
    }
    audit.check_input(in, MechanismSite::kTreePsum,
                      ucb_trunc_threshold(cfg.moments, cfg.eps, in.index, horizon));
  }

  std::vector<std::uint64_t> drawn(cfg.arms, 0);
  for (const auto& d : ledger.draws) {
    if (d.arm >= cfg.arms) {
      audit.flag(d.site, d.arm, d.index, "unknown arm");
      continue;
    }
    ++drawn[d.arm];
    const double bound =
        ucb_trunc_threshold(cfg.moments, cfg.eps, d.index, horizon);
    audit.check_draw(d, MechanismSite::kTreePsum, bound,
                     2.0 * bound / eps_prime);
  }
  for (std::size_t a = 0; a < cfg.arms; ++a) {
    if (drawn[a] != inserted[a]) {
      audit.flag(MechanismSite::kTreePsum, a, 0,
                 "tree drew " + std::to_string(drawn[a]) + " noises for " +
                     std::to_string(inserted[a]) + " insertions");
    }
  }
}

void audit_elimination_policy(const SuccessiveElimination& policy,
                              const MechanismLedger& ledger,
                              AuditReport& report) {
  const auto& cfg = policy.config();
  const bool central =
      policy.model() == SuccessiveElimination::Model::kCentral;
  const auto site =
      central ? MechanismSite::kEliminationMean : MechanismSite::kLocalReward;
  const double beta = cfg.effective_beta();
  Auditor audit(report);

  // Expected schedule per epoch, recomputed from the viable-set size.
  std::map<std::uint64_t, const EpochRecord*> epochs;
  std::map<std::uint64_t, EpochSchedule> expected;
  for (const auto& rec : policy.epochs()) {
    epochs[rec.tau] = &rec;
    expected.emplace(rec.tau,
                     central ? dpse_schedule(cfg.moments, cfg.eps, beta, rec.tau,
                                             rec.viable.size())
                             : ldpse_schedule(cfg.moments, cfg.eps, beta,
                                              rec.tau, rec.viable.size()));
  }

  std::map<std::pair<std::uint64_t, std::size_t>, std::uint64_t> inputs_per;
  for (const auto& in : ledger.inputs) {
    const auto it = expected.find(in.index);
    if (it == expected.end()) {
      audit.flag(in.site, in.mechanism_arm, in.index, "input outside any epoch");
      continue;
    }
    const auto& viable = epochs[in.index]->viable;
    if (std::find(viable.begin(), viable.end(), in.mechanism_arm) ==
        viable.end()) {
      audit.flag(in.site, in.mechanism_arm, in.index, "arm not viable in epoch");
    }
    ++inputs_per[{in.index, in.mechanism_arm}];
    audit.check_input(in, site, it->second.trunc_bound);
  }

  std::map<std::pair<std::uint64_t, std::size_t>, std::uint64_t> draws_per;
  for (const auto& d : ledger.draws) {
    const auto it = expected.find(d.index);
    if (it == expected.end()) {
      audit.flag(d.site, d.arm, d.index, "draw outside any epoch");
      continue;
    }
    const auto& sch = it->second;
    const double scale =
        central ? 2.0 * sch.trunc_bound /
                      (static_cast<double>(sch.pulls) * cfg.eps)
                : 2.0 * sch.trunc_bound / cfg.eps;
    ++draws_per[{d.index, d.arm}];
    audit.check_draw(d, site, sch.trunc_bound, scale);
  }

  for (const auto& [tau, rec] : epochs) {
    const bool complete = !rec->survivors.empty();
    const auto& sch = expected.at(tau);
    if (sch.pulls != rec->schedule.pulls) {
      audit.flag(site, 0, tau, "epoch length differs from schedule");
    }
    for (auto arm : rec->viable) {
      const auto n_in = inputs_per[{tau, arm}];
      const auto n_draw = draws_per[{tau, arm}];
      if (complete && n_in != sch.pulls) {
        audit.flag(site, arm, tau,
                   std::to_string(n_in) + " inputs in a completed epoch of " +
                       std::to_string(sch.pulls));
      }
      const std::uint64_t want_draws = central ? (complete ? 1 : 0) : n_in;
      if (n_draw != want_draws) {
        audit.flag(site, arm, tau,
                   std::to_string(n_draw) + " draws, expected " +
                       std::to_string(want_draws));
      }
    }
  }
}

}  // namespace

std::string AuditReport::summary() const {
  std::ostringstream out;
  out << (passed() ? "PASS" : "FAIL") << ": " << inputs_checked
      << " inputs, " << draws_checked << " draws checked";
  for (const auto& f : findings) {
    out << "\n  [" << to_string(f.site) << " arm=" << f.arm
        << " index=" << f.index << "] " << f.message;
  }
  return out.str();
}

AuditReport privacy_audit(const Policy& policy) {
  const auto* ledger = policy.ledger();
  if (ledger == nullptr) {
    throw std::logic_error("privacy audit needs a run with record_ledger set");
  }
  AuditReport report;
  if (const auto* ucb = dynamic_cast<const DpRobustUcb*>(&policy)) {
    audit_tree_policy(*ucb, *ledger, report);
  } else if (const auto* se =
                 dynamic_cast<const SuccessiveElimination*>(&policy)) {
    audit_elimination_policy(*se, *ledger, report);
  } else {
    report.findings.push_back({MechanismSite::kTreePsum, 0, 0,
                               "policy " +
                                   std::string(to_string(policy.algorithm())) +
                                   " is not differentially private"});
  }
  return report;
}

}  // namespace dpbandit
