#ifndef IDEALKIT_WITNESS_HPP
#define IDEALKIT_WITNESS_HPP

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "idealkit/expr.hpp"

namespace idealkit {

/// Finite t-uniform evidence against the density-like clause on one family:
/// every member value is below delta, yet no selection of t or more members
/// has union value below epsilon.
template <class SetT>
struct ObstructionCertificate {
  ExprPtr expr;
  std::vector<SetT> family;
  QValue epsilon;
  QValue delta;
  std::size_t t = 0;
  std::vector<QValue> member_values;
  QValue min_union_value;
};

template <class SetT>
struct FailureWitness {
  enum class Reason { MemberNotSmall, SubsetUnionSmall };
  Reason reason = Reason::MemberNotSmall;
  std::vector<std::size_t> indices;  // the offending member or subset
  QValue value;
};

template <class SetT>
using ObstructionResult =
    std::variant<ObstructionCertificate<SetT>, FailureWitness<SetT>>;

/// Certificate iff all member values < delta and every t-subset union >= epsilon.
template <class SetT>
ObstructionResult<SetT> obstruction_check(const ExprPtr& expr,
                                          const DisjointFamily<SetT>& family,
                                          const QValue& epsilon, const QValue& delta,
                                          std::size_t t);

/// Re-runs obstruction_check on a certificate's own family and parameters.
template <class SetT>
bool revalidate(const ObstructionCertificate<SetT>& cert);

/// Deterministic bounded search over candidate families drawn from singletons
/// and atomic blocks of the expression, in lexicographic candidate order.
/// Budget caps the number of families submitted to the full check.
template <class SetT>
std::optional<ObstructionCertificate<SetT>> search_obstruction(
    const ExprPtr& expr, const QValue& epsilon, const QValue& delta, std::size_t m,
    std::size_t t, std::size_t budget);

enum class SdlStatus { Pass, Fail, PreconditionViolation };

struct SdlResult {
  SdlStatus status = SdlStatus::Fail;
  std::vector<std::size_t> selected;
  QValue union_value;
  std::size_t offending_member = 0;  // set on precondition violation
  QValue offending_value;
};

/// Greedy selection test for the strongly-density-like clause at constant c:
/// members must satisfy value < c * epsilon (else PreconditionViolation);
/// pass when a greedy selection of at least min(budget, |family|) members
/// keeps the union value below epsilon.
SdlResult sdl_check(const ExprPtr& expr, const Rat& c, const QValue& epsilon,
                    const DisjointFamily<NatSet>& family, std::size_t budget);

/// Runs search_obstruction per indexed submeasure with one shared (epsilon,
/// delta, m, t); any hit is finite evidence against a uniform delta.
std::vector<std::optional<ObstructionCertificate<NatSet>>> equi_dl_scan(
    const std::vector<ExprPtr>& exprs, const QValue& epsilon, const QValue& delta,
    std::size_t m, std::size_t t, std::size_t budget);

struct SelectionStep {
  std::size_t chosen = 0;                 // i_j
  std::vector<std::size_t> pool;          // X_j before the step
  std::vector<std::size_t> touched;       // T^(j), indices of touched submeasures
  std::vector<std::pair<std::size_t, QValue>> bounds;  // per t in T^(j): the step bound
};

struct SelectionTrace {
  std::vector<SelectionStep> steps;
  std::vector<std::size_t> selected;  // the i_j in order
  NatSet selected_union;
  bool exhausted = false;        // thinning emptied the pool before the family ran out
  std::size_t blocking_mu = 0;   // valid when exhausted
};

/// Thinning oracle: given the remaining candidate indices and the newly
/// touched submeasure indices, returns the kept subset.
using ThinningPolicy = std::function<std::vector<std::size_t>(
    const std::vector<std::size_t>&, const std::vector<std::size_t>&)>;

/// Recursive selection of the sup-theorem proof at finite scale. Every step
/// asserts the three trace invariants; requires every member value under
/// every submeasure to be below epsilon/4.
SelectionTrace greedy_extract(const DisjointFamily<NatSet>& family,
                              const QValue& epsilon, const std::vector<ExprPtr>& mus,
                              const ThinningPolicy& policy = nullptr);

/// Separation predicate: consecutive picks k_n < k_{n+1} admit a cut s_m with
/// max F_{k_n} <= s_m < min F_{k_{n+1}}.
bool ksf_member(const std::vector<Nat>& cuts, const DisjointFamily<NatSet>& family,
                const std::vector<std::size_t>& selection);

/// All strictly increasing selections of length 1..maxlen satisfying the
/// separation predicate, in lexicographic order.
std::vector<std::vector<std::size_t>> ksf_enumerate(const std::vector<Nat>& cuts,
                                                    const DisjointFamily<NatSet>& family,
                                                    std::size_t maxlen);

struct KsfViolation {
  std::vector<std::size_t> selection;
  QValue value;
};

/// Evaluates the expression on each enumerated selection's union (or on the
/// even-position subsequence) and reports the ones with value >= epsilon.
std::vector<KsfViolation> ksf_condition_check(const ExprPtr& expr,
                                              const std::vector<Nat>& cuts,
                                              const DisjointFamily<NatSet>& family,
                                              const QValue& epsilon, std::size_t maxlen,
                                              bool even_subsequence);

struct NonGdiWitness {
  std::vector<NatSet> row_sets;  // F_n, increasing
  GridSet lifted;                // X = union of {n} x F_n
  bool complete = false;
};

/// Greedy increasing F_n with phi_n(F_n) >= bound/2, each lifted row kept
/// clear of every constraint support that already meets the earlier rows.
NonGdiWitness nongdi_witness(const std::vector<ExprPtr>& phis,
                             const QValue& norm_lower_bound,
                             const std::vector<GridSet>& mu_supports, Nat window);

extern template struct ObstructionCertificate<NatSet>;
extern template struct ObstructionCertificate<GridSet>;

}  // namespace idealkit

#endif
