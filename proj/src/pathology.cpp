#include "idealkit/pathology.hpp"

#include <algorithm>
#include <cmath>

#include "idealkit/kernels.hpp"
#include "simplex.hpp"

namespace idealkit {

namespace {

double to_double(const Rat& r) {
  return numerator(r).convert_to<double>() / denominator(r).convert_to<double>();
}

// best rational approximation by continued fractions, denominator-capped
Rat rationalize(double x) {
  if (!(x > 0)) return Rat(0);
  const double kDenCap = 1e12;
  long double rem = x;
  Int p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int step = 0; step < 64; ++step) {
    long double fl = floorl(rem);
    if (fl > 1e18L) break;
    Int a = static_cast<long long>(fl);
    Int p2 = a * p1 + p0;
    Int q2 = a * q1 + q0;
    if (q2.convert_to<double>() > kDenCap) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    long double frac = rem - fl;
    Rat approx(p1, q1);
    if (frac < 1e-15L || fabsl(static_cast<long double>(to_double(approx)) -
                               static_cast<long double>(x)) < 1e-14L * (1 + fabsl(x)))
      break;
    rem = 1.0L / frac;
  }
  if (q1 == 0) return Rat(0);
  Rat r(p1, q1);
  return r < 0 ? Rat(0) : r;
}

struct EnvelopeContext {
  AnySet support;
  std::vector<Rat> values;  // eval on each mask-subset, rational
  std::vector<std::vector<double>> a;
  std::vector<double> b;

  std::size_t points() const { return set_size(support); }
};

EnvelopeContext make_context(const ExprPtr& expr, const AnySet& support,
                             std::size_t support_cap) {
  if (!expr) throw Error(ErrorKind::Usage, "envelope: null expression");
  if (sort_of(support) != expr->sort())
    throw Error(ErrorKind::SortMismatch, "envelope: support sort differs from expression");
  std::size_t n = set_size(support);
  if (n == 0) throw Error(ErrorKind::Usage, "envelope: empty support");
  if (n > support_cap)
    throw Error(ErrorKind::Resource, "envelope: support size " + std::to_string(n) +
                                         " exceeds cap " + std::to_string(support_cap));

  EnvelopeContext ctx;
  ctx.support = support;
  std::vector<QValue> raw = subset_values(expr, support);
  ctx.values.resize(raw.size());
  for (std::size_t i = 1; i < raw.size(); ++i) ctx.values[i] = raw[i].rat();

  std::size_t m = raw.size() - 1;
  ctx.a.assign(m, std::vector<double>(n, 0.0));
  ctx.b.assign(m, 0.0);
  for (std::size_t mask = 1; mask <= m; ++mask) {
    for (std::size_t j = 0; j < n; ++j)
      if (mask & (std::size_t(1) << j)) ctx.a[mask - 1][j] = 1.0;
    ctx.b[mask - 1] = to_double(ctx.values[mask]);
  }
  return ctx;
}

std::uint64_t mask_of_target(const AnySet& support, const AnySet& target) {
  std::uint64_t mask = 0;
  if (sort_of(support) == SetSort::Nat) {
    const NatSet& s = std::get<NatSet>(support);
    const NatSet& t = std::get<NatSet>(target);
    std::size_t j = 0;
    for (Nat x : t) {
      while (j < s.size() && s[j] < x) ++j;
      if (j == s.size() || s[j] != x)
        throw Error(ErrorKind::Usage, "envelope: target is not inside the support");
      mask |= 1ull << j;
    }
  } else {
    const GridSet& s = std::get<GridSet>(support);
    const GridSet& t = std::get<GridSet>(target);
    std::size_t j = 0;
    for (const GridPoint& x : t) {
      while (j < s.size() && s[j] < x) ++j;
      if (j == s.size() || !(s[j] == x))
        throw Error(ErrorKind::Usage, "envelope: target is not inside the support");
      mask |= 1ull << j;
    }
  }
  return mask;
}

PathologyReport solve_envelope(const EnvelopeContext& ctx, std::uint64_t target_mask) {
  std::size_t n = ctx.points();
  std::vector<double> objective(n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    if (target_mask & (std::size_t(1) << j)) objective[j] = 1.0;

  SimplexSolver solver(ctx.a, ctx.b, objective);
  std::vector<double> x;
  double lp_value = 0.0;
  SimplexSolver::Status status = solver.solve(x, lp_value);

  PathologyReport report;
  report.support = ctx.support;
  report.target = subset_of(ctx.support, target_mask);
  report.lp_value = lp_value;
  report.lp_status = status == SimplexSolver::Status::Optimal      ? 0
                     : status == SimplexSolver::Status::Infeasible ? 1
                                                                   : 2;

  // round to rationals, then scale down to exact feasibility
  std::vector<Rat> weights(n, Rat(0));
  if (status == SimplexSolver::Status::Optimal)
    for (std::size_t j = 0; j < n; ++j) weights[j] = rationalize(x[j]);

  std::vector<Rat> sums(ctx.values.size(), Rat(0));
  Rat theta(1);
  for (std::size_t mask = 1; mask < sums.size(); ++mask) {
    std::size_t low = mask & (mask - 1);
    std::size_t bit = mask ^ low;
    std::size_t j = 0;
    while ((std::size_t(1) << j) != bit) ++j;
    sums[mask] = sums[low] + weights[j];
    if (sums[mask] > ctx.values[mask]) {
      Rat ratio = ctx.values[mask] / sums[mask];
      if (ratio < theta) theta = ratio;
    }
  }
  if (theta < 1)
    for (Rat& w : weights) w *= theta;

  // exact feasibility re-check on every constraint
  for (std::size_t mask = 1; mask < sums.size(); ++mask) {
    sums[mask] = 0;
  }
  for (std::size_t mask = 1; mask < sums.size(); ++mask) {
    std::size_t low = mask & (mask - 1);
    std::size_t bit = mask ^ low;
    std::size_t j = 0;
    while ((std::size_t(1) << j) != bit) ++j;
    sums[mask] = sums[low] + weights[j];
    if (sums[mask] > ctx.values[mask])
      throw Error(ErrorKind::Invariant, "envelope: scaled witness is not feasible");
  }

  report.witness = std::move(weights);
  report.certified = sums[target_mask];
  report.target_value = QValue::rational(ctx.values[target_mask]);
  report.gap = QValue::rational(ctx.values[target_mask] - report.certified);
  return report;
}

}  // namespace

PathologyReport envelope(const ExprPtr& expr, const AnySet& target, const AnySet& support,
                         double tolerance, std::size_t support_cap) {
  (void)tolerance;  // the certified value is exact; tolerance applies to the LP side
  EnvelopeContext ctx = make_context(expr, support, support_cap);
  std::uint64_t mask = mask_of_target(support, target);
  if (mask == 0) throw Error(ErrorKind::Usage, "envelope: empty target");
  PathologyReport report = solve_envelope(ctx, mask);
  report.expr = expr;
  return report;
}

TransferredMeasure hat_measure_transfer(const std::vector<std::pair<Nat, Rat>>& eta_rows,
                                        const ExprPtr& phi_context, const NatSet& a) {
  if (!phi_context || phi_context->sort() != SetSort::Nat)
    throw Error(ErrorKind::SortMismatch, "transfer: context must be over NatSet");
  if (a.empty())
    throw Error(ErrorKind::Usage, "transfer: target with no rows (empty set excluded)");

  std::vector<Nat> eta_support;
  for (const auto& [row, w] : eta_rows) {
    if (w <= 0) throw Error(ErrorKind::Invariant, "transfer: measure weights must be positive");
    eta_support.push_back(row);
  }
  NatSet eta_rows_set = NatSet::from_unsorted(eta_support);
  if (eta_rows_set.size() != eta_rows.size())
    throw Error(ErrorKind::Invariant, "transfer: duplicate rows in the measure");
  if (eta_rows_set.size() > 20)
    throw Error(ErrorKind::Resource, "transfer: measure support too large to verify");

  auto eta_of = [&](Nat row) -> Rat {
    for (const auto& [r, w] : eta_rows)
      if (r == row) return w;
    return Rat(0);
  };

  // domination precondition: eta(V) <= phi(V) on every nonempty subset
  std::size_t count = std::size_t(1) << eta_rows_set.size();
  for (std::size_t mask = 1; mask < count; ++mask) {
    std::vector<Nat> rows;
    Rat total = 0;
    for (std::size_t j = 0; j < eta_rows_set.size(); ++j)
      if (mask & (std::size_t(1) << j)) {
        rows.push_back(eta_rows_set[j]);
        total += eta_of(eta_rows_set[j]);
      }
    NatSet v(rows);
    QValue phi_v = phi_context->eval(v);
    if (QValue::rational(total) > phi_v) {
      std::string names;
      for (Nat r : v) names += (names.empty() ? "" : ",") + std::to_string(r);
      throw Error(ErrorKind::Invariant,
                  "transfer: measure is not dominated on rows {" + names + "}");
    }
  }

  // minimal-column representative per nonempty row of the decoded target
  std::vector<std::pair<Nat, Nat>> reps;  // (row, code)
  for (Nat code : a) {
    GridPoint p = pair_decode_u64(code);
    bool seen = false;
    for (auto& [row, rep] : reps)
      if (row == p.row) {
        seen = true;
        if (code < rep) rep = code;  // same row: smaller col has the smaller code
      }
    if (!seen) reps.emplace_back(p.row, code);
  }

  TransferredMeasure out;
  out.total_on_target = 0;
  for (const auto& [row, code] : reps) {
    Rat w = eta_of(row);
    out.total_on_target += w;
    if (w > 0) out.weights.emplace_back(code, w);
  }
  std::sort(out.weights.begin(), out.weights.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });

  // the transferred measure must be dominated by hat(phi) on its support
  ExprPtr hat_phi = SubmeasureExpr::hat(phi_context, a.max() + 1);
  std::size_t k = out.weights.size();
  if (k > 20) throw Error(ErrorKind::Resource, "transfer: output support too large to verify");
  for (std::size_t mask = 1; mask < (std::size_t(1) << k); ++mask) {
    std::vector<Nat> pts;
    Rat total = 0;
    for (std::size_t j = 0; j < k; ++j)
      if (mask & (std::size_t(1) << j)) {
        pts.push_back(out.weights[j].first);
        total += out.weights[j].second;
      }
    QValue bound = hat_phi->eval(NatSet::from_unsorted(pts));
    if (QValue::rational(total) > bound)
      throw Error(ErrorKind::Invariant, "transfer: output measure escaped hat domination");
  }
  return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

PathologyScan pathology_scan(const ExprPtr& expr, const AnySet& support,
                             std::size_t sample_count, double tolerance,
                             std::uint64_t seed) {
  PathologyScan scan;
  scan.worst_target = sort_of(support) == SetSort::Nat ? AnySet(NatSet()) : AnySet(GridSet());
  if (sample_count == 0) return scan;

  EnvelopeContext ctx = make_context(expr, support, 14);
  std::size_t n = ctx.points();
  std::uint64_t full = (std::uint64_t(1) << n) - 1;

  std::uint64_t state = seed;
  std::vector<std::uint64_t> masks(sample_count);
  for (std::size_t i = 0; i < sample_count; ++i)
    masks[i] = 1 + splitmix64(state) % full;

  std::vector<QValue> gaps(sample_count);
#ifdef IDEALKIT_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads())
#endif
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(sample_count); ++i)
    gaps[static_cast<std::size_t>(i)] =
        solve_envelope(ctx, masks[static_cast<std::size_t>(i)]).gap;

  std::size_t worst = 0;
  for (std::size_t i = 1; i < sample_count; ++i)
    if (gaps[i] > gaps[worst]) worst = i;
  scan.worst_gap = gaps[worst];
  scan.worst_target = subset_of(support, masks[worst]);
  scan.samples = sample_count;
  (void)tolerance;
  return scan;
}

}  // namespace idealkit
