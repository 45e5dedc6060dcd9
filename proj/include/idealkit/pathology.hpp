#ifndef IDEALKIT_PATHOLOGY_HPP
#define IDEALKIT_PATHOLOGY_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "idealkit/expr.hpp"

namespace idealkit {

/// Nonpathological-envelope report. The contractual value is the certified
/// rational lower bound: the carried witness measure is exactly feasible
/// (checked on every nonempty subset of the support in rational arithmetic).
/// The float LP optimum is reported alongside as a search result.
struct PathologyReport {
  ExprPtr expr;
  AnySet target;
  AnySet support;
  Rat certified;            // exact, certified lower bound on the envelope at the target
  double lp_value = 0.0;    // float LP optimum
  QValue target_value;      // eval(expr, target)
  QValue gap;               // target_value - certified
  std::vector<Rat> witness; // weights aligned with the support's points
  int lp_status = 0;        // 0 optimal, 1 infeasible, 2 unbounded
};

/// Solves max sum_{i in A} eta(i) over measures eta >= 0 with
/// sum_{i in V} eta(i) <= eval(expr, V) for every nonempty V of the support,
/// then rounds the float solution to rationals and scales it down minimally
/// until it is exactly feasible.
PathologyReport envelope(const ExprPtr& expr, const AnySet& target,
                         const AnySet& support, double tolerance,
                         std::size_t support_cap = 14);

struct TransferredMeasure {
  std::vector<std::pair<Nat, Rat>> weights;  // point -> mass
  Rat total_on_target;                       // psi(A) = eta(M)
};

/// Pushes a measure on rows through the pairing decode: psi gives each row's
/// mass to the code of (row, minimal column of the row's trace in A).
/// Requires eta dominated by phi on every subset of its support; asserts the
/// output is dominated by hat(phi) on every subset of its own support.
TransferredMeasure hat_measure_transfer(const std::vector<std::pair<Nat, Rat>>& eta_rows,
                                        const ExprPtr& phi_context, const NatSet& a);

struct PathologyScan {
  QValue worst_gap;
  AnySet worst_target;
  std::size_t samples = 0;
};

/// Seeded batch of envelope solves over pseudorandom nonempty targets.
PathologyScan pathology_scan(const ExprPtr& expr, const AnySet& support,
                             std::size_t sample_count, double tolerance,
                             std::uint64_t seed);

}  // namespace idealkit

#endif
