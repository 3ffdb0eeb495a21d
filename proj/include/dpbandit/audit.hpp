#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dpbandit/laplace.hpp"
#include "dpbandit/policies.hpp"

namespace dpbandit {

struct AuditFinding {
  MechanismSite site;
  std::size_t arm;
  std::uint64_t index;
  std::string message;
};

struct AuditReport {
  std::vector<AuditFinding> findings;
  std::uint64_t inputs_checked = 0;
  std::uint64_t draws_checked = 0;

  bool passed() const { return findings.empty(); }
  std::string summary() const;
};

/// Structural privacy check of a completed run. Recomputes, from the policy's
/// configuration alone, the bound and Laplace scale every mechanism site must
/// have used, and checks the ledger against them:
///   - tree draws: 2 B_n / (eps / ln T) with B_n the truncation level at the
///     arm's n-th insertion
///   - central elimination draws: 2 B_tau / (R_tau eps), one per viable arm
///     per completed epoch
///   - local draws: 2 B_tau / eps, one per truncated reward
///   - every mechanism input respected its bound
///   - every reward entered exactly one mechanism, the one of its own arm
/// Throws std::logic_error if the policy ran without a ledger.
AuditReport privacy_audit(const Policy& policy);

}  // namespace dpbandit
