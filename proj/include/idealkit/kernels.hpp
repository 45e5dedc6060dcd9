#ifndef IDEALKIT_KERNELS_HPP
#define IDEALKIT_KERNELS_HPP

#include <cstdint>
#include <vector>

#include "idealkit/expr.hpp"

namespace idealkit {

/// Worker count for the parallel kernels; 1 disables threading. Results are
/// identical for every setting, only wall time changes.
void set_threads(int n);
int threads();

/// Subset of the support selected by the bits of `mask` (bit i picks the
/// i-th point in canonical order).
AnySet subset_of(const AnySet& support, std::uint64_t mask);

/// values[mask] = eval(expr, subset_of(support, mask)) for every mask in
/// [0, 2^|support|). The serial variant is the reference implementation;
/// the parallel one fans the masks out across OpenMP workers.
std::vector<QValue> subset_values_serial(const ExprPtr& expr, const AnySet& support);
std::vector<QValue> subset_values_parallel(const ExprPtr& expr, const AnySet& support);
std::vector<QValue> subset_values(const ExprPtr& expr, const AnySet& support);

/// Pointwise evaluation over a list of targets.
std::vector<QValue> batch_eval_serial(const ExprPtr& expr,
                                      const std::vector<AnySet>& targets);
std::vector<QValue> batch_eval_parallel(const ExprPtr& expr,
                                        const std::vector<AnySet>& targets);
std::vector<QValue> batch_eval(const ExprPtr& expr, const std::vector<AnySet>& targets);

}  // namespace idealkit

#endif
