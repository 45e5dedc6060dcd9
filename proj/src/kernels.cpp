#include "idealkit/kernels.hpp"

#include <atomic>

#ifdef IDEALKIT_HAVE_OPENMP
#include <omp.h>
#endif

namespace idealkit {

namespace {
std::atomic<int> g_threads{1};
}

void set_threads(int n) { g_threads.store(n < 1 ? 1 : n); }
int threads() { return g_threads.load(); }

AnySet subset_of(const AnySet& support, std::uint64_t mask) {
  if (sort_of(support) == SetSort::Nat) {
    const NatSet& s = std::get<NatSet>(support);
    std::vector<Nat> pts;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (mask & (1ull << i)) pts.push_back(s[i]);
    return NatSet(std::move(pts));
  }
  const GridSet& s = std::get<GridSet>(support);
  std::vector<GridPoint> pts;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (mask & (1ull << i)) pts.push_back(s[i]);
  return GridSet(std::move(pts));
}

std::vector<QValue> subset_values_serial(const ExprPtr& expr, const AnySet& support) {
  std::size_t n = set_size(support);
  if (n >= 30) throw Error(ErrorKind::Resource, "subset kernel: support too large");
  std::size_t count = std::size_t(1) << n;
  std::vector<QValue> values(count);
  for (std::uint64_t mask = 1; mask < count; ++mask)
    values[mask] = expr->eval(subset_of(support, mask));
  return values;
}

std::vector<QValue> subset_values_parallel(const ExprPtr& expr, const AnySet& support) {
#ifdef IDEALKIT_HAVE_OPENMP
  std::size_t n = set_size(support);
  if (n >= 30) throw Error(ErrorKind::Resource, "subset kernel: support too large");
  std::int64_t count = std::int64_t(1) << n;
  std::vector<QValue> values(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic, 64) num_threads(threads())
  for (std::int64_t mask = 1; mask < count; ++mask)
    values[static_cast<std::size_t>(mask)] =
        expr->eval(subset_of(support, static_cast<std::uint64_t>(mask)));
  return values;
#else
  return subset_values_serial(expr, support);
#endif
}

std::vector<QValue> subset_values(const ExprPtr& expr, const AnySet& support) {
  return threads() > 1 ? subset_values_parallel(expr, support)
                       : subset_values_serial(expr, support);
}

std::vector<QValue> batch_eval_serial(const ExprPtr& expr,
                                      const std::vector<AnySet>& targets) {
  std::vector<QValue> values(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) values[i] = expr->eval(targets[i]);
  return values;
}

std::vector<QValue> batch_eval_parallel(const ExprPtr& expr,
                                        const std::vector<AnySet>& targets) {
#ifdef IDEALKIT_HAVE_OPENMP
  std::vector<QValue> values(targets.size());
  std::int64_t count = static_cast<std::int64_t>(targets.size());
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads())
  for (std::int64_t i = 0; i < count; ++i)
    values[static_cast<std::size_t>(i)] = expr->eval(targets[static_cast<std::size_t>(i)]);
  return values;
#else
  return batch_eval_serial(expr, targets);
#endif
}

std::vector<QValue> batch_eval(const ExprPtr& expr, const std::vector<AnySet>& targets) {
  return threads() > 1 ? batch_eval_parallel(expr, targets)
                       : batch_eval_serial(expr, targets);
}

}  // namespace idealkit
