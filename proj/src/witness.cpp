#include "idealkit/witness.hpp"

#include <algorithm>

#include "idealkit/kernels.hpp"

namespace idealkit {

namespace {

template <class SetT>
SetT union_of(const std::vector<SetT>& family, const std::vector<std::size_t>& idx) {
  SetT u;
  for (std::size_t i : idx) u = SetT::set_union(u, family[i]);
  return u;
}

// lexicographic candidate order: (size, elements in canonical order)
bool candidate_less(const NatSet& a, const NatSet& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

bool candidate_less(const GridSet& a, const GridSet& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return std::lexicographical_compare(
      a.begin(), a.end(), b.begin(), b.end(),
      [](const GridPoint& x, const GridPoint& y) { return h_compare(x, y) < 0; });
}

template <class SetT>
std::vector<SetT> singleton_candidates(const AnySet& support);

template <>
std::vector<NatSet> singleton_candidates<NatSet>(const AnySet& support) {
  std::vector<NatSet> out;
  for (Nat x : std::get<NatSet>(support)) out.push_back(NatSet::single(x));
  return out;
}

template <>
std::vector<GridSet> singleton_candidates<GridSet>(const AnySet& support) {
  std::vector<GridPoint> pts = std::get<GridSet>(support).points();
  std::sort(pts.begin(), pts.end(),
            [](const GridPoint& a, const GridPoint& b) { return h_compare(a, b) < 0; });
  std::vector<GridSet> out;
  for (const GridPoint& p : pts) out.push_back(GridSet({p}));
  return out;
}

}  // namespace

template <class SetT>
ObstructionResult<SetT> obstruction_check(const ExprPtr& expr,
                                          const DisjointFamily<SetT>& family,
                                          const QValue& epsilon, const QValue& delta,
                                          std::size_t t) {
  if (!expr) throw Error(ErrorKind::Usage, "obstruction: null expression");
  if (t == 0) throw Error(ErrorKind::Usage, "obstruction: t must be positive");
  if (t > family.size())
    throw Error(ErrorKind::Usage, "obstruction: t exceeds the family size");

  std::vector<QValue> member_values;
  member_values.reserve(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    QValue v = expr->eval(family[i]);
    if (!(v < delta))
      return FailureWitness<SetT>{FailureWitness<SetT>::Reason::MemberNotSmall, {i}, v};
    member_values.push_back(std::move(v));
  }

  // every t-subset union must reach epsilon; scan in lexicographic order
  std::vector<std::size_t> subset(t);
  for (std::size_t i = 0; i < t; ++i) subset[i] = i;
  std::optional<QValue> min_union;
  while (true) {
    QValue v = expr->eval(union_of(family.members(), subset));
    if (v < epsilon)
      return FailureWitness<SetT>{FailureWitness<SetT>::Reason::SubsetUnionSmall, subset,
                                  v};
    if (!min_union || v < *min_union) min_union = v;
    // next combination
    std::size_t i = t;
    while (i > 0 && subset[i - 1] == family.size() - t + i - 1) --i;
    if (i == 0) break;
    ++subset[i - 1];
    for (std::size_t j = i; j < t; ++j) subset[j] = subset[j - 1] + 1;
  }

  ObstructionCertificate<SetT> cert;
  cert.expr = expr;
  cert.family = family.members();
  cert.epsilon = epsilon;
  cert.delta = delta;
  cert.t = t;
  cert.member_values = std::move(member_values);
  cert.min_union_value = *min_union;
  return cert;
}

template <class SetT>
bool revalidate(const ObstructionCertificate<SetT>& cert) {
  DisjointFamily<SetT> family(cert.family, FamilyFlavor::Disj);
  auto result = obstruction_check<SetT>(cert.expr, family, cert.epsilon, cert.delta,
                                        cert.t);
  const auto* again = std::get_if<ObstructionCertificate<SetT>>(&result);
  if (!again) return false;
  if (again->member_values.size() != cert.member_values.size()) return false;
  for (std::size_t i = 0; i < cert.member_values.size(); ++i)
    if (again->member_values[i] != cert.member_values[i]) return false;
  return again->min_union_value == cert.min_union_value;
}

template <class SetT>
std::optional<ObstructionCertificate<SetT>> search_obstruction(
    const ExprPtr& expr, const QValue& epsilon, const QValue& delta, std::size_t m,
    std::size_t t, std::size_t budget) {
  if (!expr) throw Error(ErrorKind::Usage, "search: null expression");
  if (budget == 0) throw Error(ErrorKind::Budget, "search: budget must be positive");
  if (t == 0 || m < t) throw Error(ErrorKind::Usage, "search: need m >= t >= 1");

  // candidate pool: support singletons, then atomic blocks, ordered by
  // (size, canonical element order); keep the delta-small nonempty ones
  std::vector<SetT> candidates = singleton_candidates<SetT>(expr->support());
  for (const AnySet& block : expr->atomic_blocks()) {
    const SetT& b = std::get<SetT>(block);
    if (b.size() > 1) candidates.push_back(b);
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const SetT& a, const SetT& b) { return candidate_less(a, b); });
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::vector<AnySet> targets;
  targets.reserve(candidates.size());
  for (const SetT& c : candidates) targets.push_back(c);
  std::vector<QValue> values = batch_eval(expr, targets);

  std::vector<SetT> pool;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (!candidates[i].empty() && values[i] < delta)
      pool.push_back(std::move(candidates[i]));
  if (pool.size() < m) return std::nullopt;

  // lexicographic scan over m-combinations of pairwise disjoint pool members
  std::vector<std::size_t> chosen;
  std::size_t checked = 0;
  std::optional<ObstructionCertificate<SetT>> found;

  auto disjoint_from_chosen = [&](std::size_t cand) {
    for (std::size_t i : chosen)
      if (pool[i].intersects(pool[cand])) return false;
    return true;
  };

  std::function<bool(std::size_t)> descend = [&](std::size_t from) -> bool {
    if (chosen.size() == m) {
      if (checked == budget) return true;  // budget exhausted
      ++checked;
      std::vector<SetT> members;
      for (std::size_t i : chosen) members.push_back(pool[i]);
      auto result = obstruction_check<SetT>(expr, DisjointFamily<SetT>(members,
                                                                       FamilyFlavor::Disj),
                                            epsilon, delta, t);
      if (auto* cert = std::get_if<ObstructionCertificate<SetT>>(&result)) {
        found = std::move(*cert);
        return true;
      }
      return false;
    }
    for (std::size_t cand = from; cand < pool.size(); ++cand) {
      if (pool.size() - cand < m - chosen.size()) break;
      if (!disjoint_from_chosen(cand)) continue;
      chosen.push_back(cand);
      bool stop = descend(cand + 1);
      chosen.pop_back();
      if (stop) return true;
    }
    return false;
  };
  descend(0);
  return found;
}

SdlResult sdl_check(const ExprPtr& expr, const Rat& c, const QValue& epsilon,
                    const DisjointFamily<NatSet>& family, std::size_t budget) {
  if (!expr) throw Error(ErrorKind::Usage, "sdl: null expression");
  if (budget == 0) throw Error(ErrorKind::Budget, "sdl: budget must be positive");
  if (c <= 0) throw Error(ErrorKind::Usage, "sdl: constant must be positive");
  QValue threshold = epsilon.scaled(c);

  SdlResult res;
  for (std::size_t i = 0; i < family.size(); ++i) {
    QValue v = expr->eval(family[i]);
    if (!(v < threshold)) {
      res.status = SdlStatus::PreconditionViolation;
      res.offending_member = i;
      res.offending_value = std::move(v);
      return res;
    }
  }

  NatSet selected_union;
  QValue current;
  for (std::size_t i = 0; i < family.size(); ++i) {
    NatSet candidate = NatSet::set_union(selected_union, family[i]);
    QValue v = expr->eval(candidate);
    if (v < epsilon) {
      selected_union = std::move(candidate);
      current = std::move(v);
      res.selected.push_back(i);
    }
  }
  res.union_value = std::move(current);
  res.status = res.selected.size() >= std::min(budget, family.size()) ? SdlStatus::Pass
                                                                      : SdlStatus::Fail;
  return res;
}

std::vector<std::optional<ObstructionCertificate<NatSet>>> equi_dl_scan(
    const std::vector<ExprPtr>& exprs, const QValue& epsilon, const QValue& delta,
    std::size_t m, std::size_t t, std::size_t budget) {
  std::vector<std::optional<ObstructionCertificate<NatSet>>> out;
  out.reserve(exprs.size());
  for (const ExprPtr& e : exprs)
    out.push_back(search_obstruction<NatSet>(e, epsilon, delta, m, t, budget));
  return out;
}

SelectionTrace greedy_extract(const DisjointFamily<NatSet>& family,
                              const QValue& epsilon, const std::vector<ExprPtr>& mus,
                              const ThinningPolicy& policy) {
  if (mus.empty()) throw Error(ErrorKind::Usage, "extract: no submeasures");
  QValue quarter = epsilon.scaled(Rat(1, 4));
  QValue half = epsilon.scaled(Rat(1, 2));

  std::vector<NatSet> supports;
  supports.reserve(mus.size());
  for (const ExprPtr& mu : mus) {
    if (!mu || mu->sort() != SetSort::Nat)
      throw Error(ErrorKind::SortMismatch, "extract: submeasures must be over NatSet");
    supports.push_back(std::get<NatSet>(mu->support()));
  }

  for (std::size_t n = 0; n < mus.size(); ++n)
    for (std::size_t k = 0; k < family.size(); ++k) {
      QValue v = mus[n]->eval(family[k]);
      if (!(v < quarter))
        throw Error(ErrorKind::Invariant,
                    "extract: member " + std::to_string(k) + " has value " +
                        v.to_string() + " >= epsilon/4 under submeasure " +
                        std::to_string(n));
    }

  // touched rows per member
  std::vector<std::vector<std::size_t>> member_rows(family.size());
  for (std::size_t k = 0; k < family.size(); ++k)
    for (std::size_t n = 0; n < mus.size(); ++n)
      if (family[k].intersects(supports[n])) member_rows[k].push_back(n);

  ThinningPolicy thin = policy;
  if (!thin) {
    // default: drop every candidate whose set meets a newly touched support
    thin = [&](const std::vector<std::size_t>& candidates,
               const std::vector<std::size_t>& new_rows) {
      std::vector<std::size_t> kept;
      for (std::size_t i : candidates) {
        bool hits = false;
        for (std::size_t t_row : new_rows)
          if (family[i].intersects(supports[t_row])) {
            hits = true;
            break;
          }
        if (!hits) kept.push_back(i);
      }
      return kept;
    };
  }

  SelectionTrace trace;
  std::vector<std::size_t> pool(family.size());
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
  std::vector<std::size_t> touched;  // sorted
  NatSet selected_union;

  while (!pool.empty()) {
    SelectionStep step;
    step.pool = pool;
    step.chosen = pool.front();  // i_j = min X_j

    selected_union = NatSet::set_union(selected_union, family[step.chosen]);
    trace.selected.push_back(step.chosen);

    std::vector<std::size_t> new_rows;
    for (std::size_t r : member_rows[step.chosen])
      if (!std::binary_search(touched.begin(), touched.end(), r)) new_rows.push_back(r);
    std::vector<std::size_t> merged;
    std::merge(touched.begin(), touched.end(), new_rows.begin(), new_rows.end(),
               std::back_inserter(merged));
    touched = std::move(merged);
    step.touched = touched;

    std::vector<std::size_t> candidates(pool.begin() + 1, pool.end());
    std::vector<std::size_t> next_pool =
        new_rows.empty() ? candidates : thin(candidates, new_rows);
    for (std::size_t i : next_pool)
      if (!std::binary_search(candidates.begin(), candidates.end(), i))
        throw Error(ErrorKind::Invariant, "extract: thinning returned a foreign index");

    NatSet rest;
    for (std::size_t i : next_pool) rest = NatSet::set_union(rest, family[i]);
    NatSet scope = NatSet::set_union(selected_union, rest);

    // the newly touched rows must already satisfy the epsilon/4 bound on the
    // kept tail, and every touched row stays below epsilon/2 on the scope
    for (std::size_t r : new_rows) {
      QValue v = mus[r]->eval(rest);
      if (!(v < quarter))
        throw Error(ErrorKind::Invariant,
                    "extract: thinning left submeasure " + std::to_string(r) +
                        " at value " + v.to_string() + " >= epsilon/4");
    }
    for (std::size_t r : touched) {
      QValue v = mus[r]->eval(scope);
      if (!(v < half))
        throw Error(ErrorKind::Invariant,
                    "extract: step bound failed for submeasure " + std::to_string(r) +
                        " at value " + v.to_string());
      step.bounds.emplace_back(r, std::move(v));
    }

    bool had_candidates = !candidates.empty();
    trace.steps.push_back(std::move(step));
    if (next_pool.empty() && had_candidates) {
      // thinning removed every remaining index
      trace.exhausted = true;
      trace.blocking_mu = new_rows.empty() ? 0 : new_rows.front();
      break;
    }
    pool = std::move(next_pool);
  }

  trace.selected_union = std::move(selected_union);
  return trace;
}

bool ksf_member(const std::vector<Nat>& cuts, const DisjointFamily<NatSet>& family,
                const std::vector<std::size_t>& selection) {
  if (family.flavor() != FamilyFlavor::Incr && family.flavor() != FamilyFlavor::Int)
    throw Error(ErrorKind::Usage, "ksf: family must have flavor incr");
  for (std::size_t i = 1; i < cuts.size(); ++i)
    if (cuts[i] <= cuts[i - 1])
      throw Error(ErrorKind::Usage, "ksf: cuts must be strictly increasing");
  for (std::size_t i = 0; i < selection.size(); ++i) {
    if (selection[i] >= family.size())
      throw Error(ErrorKind::Usage, "ksf: selection index out of range");
    if (i > 0 && selection[i] <= selection[i - 1])
      throw Error(ErrorKind::Usage, "ksf: selection must be strictly increasing");
  }
  for (std::size_t i = 0; i + 1 < selection.size(); ++i) {
    Nat hi = family[selection[i]].max();
    Nat lo_next = family[selection[i + 1]].min();
    auto it = std::lower_bound(cuts.begin(), cuts.end(), hi);
    if (it == cuts.end() || !(*it < lo_next)) return false;
  }
  return true;
}

std::vector<std::vector<std::size_t>> ksf_enumerate(const std::vector<Nat>& cuts,
                                                    const DisjointFamily<NatSet>& family,
                                                    std::size_t maxlen) {
  if (maxlen == 0) throw Error(ErrorKind::Usage, "ksf: maxlen must be positive");
  // separation between two consecutive picks, as in ksf_member
  auto separated = [&](std::size_t a, std::size_t b) {
    Nat hi = family[a].max();
    Nat lo_next = family[b].min();
    auto it = std::lower_bound(cuts.begin(), cuts.end(), hi);
    return it != cuts.end() && *it < lo_next;
  };
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> current;
  std::function<void(std::size_t)> descend = [&](std::size_t from) {
    for (std::size_t i = from; i < family.size(); ++i) {
      if (!current.empty() && !separated(current.back(), i)) continue;
      current.push_back(i);
      out.push_back(current);
      if (current.size() < maxlen) descend(i + 1);
      current.pop_back();
    }
  };
  if (family.flavor() != FamilyFlavor::Incr && family.flavor() != FamilyFlavor::Int)
    throw Error(ErrorKind::Usage, "ksf: family must have flavor incr");
  for (std::size_t i = 1; i < cuts.size(); ++i)
    if (cuts[i] <= cuts[i - 1])
      throw Error(ErrorKind::Usage, "ksf: cuts must be strictly increasing");
  descend(0);
  return out;
}

std::vector<KsfViolation> ksf_condition_check(const ExprPtr& expr,
                                              const std::vector<Nat>& cuts,
                                              const DisjointFamily<NatSet>& family,
                                              const QValue& epsilon, std::size_t maxlen,
                                              bool even_subsequence) {
  if (!expr) throw Error(ErrorKind::Usage, "ksf: null expression");
  std::vector<KsfViolation> out;
  for (const auto& selection : ksf_enumerate(cuts, family, maxlen)) {
    std::vector<std::size_t> used;
    if (even_subsequence) {
      for (std::size_t i = 0; i < selection.size(); i += 2) used.push_back(selection[i]);
    } else {
      used = selection;
    }
    QValue v = expr->eval(union_of(family.members(), used));
    if (!(v < epsilon)) out.push_back(KsfViolation{selection, std::move(v)});
  }
  return out;
}

NonGdiWitness nongdi_witness(const std::vector<ExprPtr>& phis,
                             const QValue& norm_lower_bound,
                             const std::vector<GridSet>& mu_supports, Nat window) {
  if (phis.empty()) throw Error(ErrorKind::Usage, "nongdi: no row submeasures");
  if (!(QValue() < norm_lower_bound))
    throw Error(ErrorKind::Usage, "nongdi: norm bound must be positive");
  QValue target = norm_lower_bound.scaled(Rat(1, 2));

  NonGdiWitness wit;
  std::vector<GridPoint> lifted;
  std::vector<bool> touched(mu_supports.size(), false);
  Nat next_col = 0;

  for (std::size_t n = 0; n < phis.size(); ++n) {
    if (!phis[n] || phis[n]->sort() != SetSort::Nat)
      throw Error(ErrorKind::SortMismatch, "nongdi: row submeasures must be over NatSet");
    std::vector<Nat> cols;
    QValue value;
    Nat row = static_cast<Nat>(n);
    for (Nat c = next_col; c < window && value < target; ++c) {
      bool blocked = false;
      for (std::size_t k = 0; k < mu_supports.size(); ++k)
        if (touched[k] && mu_supports[k].contains(GridPoint{row, c})) {
          blocked = true;
          break;
        }
      if (blocked) continue;
      cols.push_back(c);
      value = phis[n]->eval(NatSet(cols));
    }
    if (value < target) {
      wit.lifted = GridSet::from_unsorted(lifted);
      return wit;  // window exhausted, partial output
    }
    for (Nat c : cols) {
      GridPoint p{row, c};
      lifted.push_back(p);
      for (std::size_t k = 0; k < mu_supports.size(); ++k)
        if (!touched[k] && mu_supports[k].contains(p)) touched[k] = true;
    }
    next_col = cols.back() + 1;
    wit.row_sets.push_back(NatSet(std::move(cols)));
  }
  wit.lifted = GridSet::from_unsorted(std::move(lifted));
  wit.complete = true;
  return wit;
}

template struct ObstructionCertificate<NatSet>;
template struct ObstructionCertificate<GridSet>;

template ObstructionResult<NatSet> obstruction_check<NatSet>(
    const ExprPtr&, const DisjointFamily<NatSet>&, const QValue&, const QValue&,
    std::size_t);
template ObstructionResult<GridSet> obstruction_check<GridSet>(
    const ExprPtr&, const DisjointFamily<GridSet>&, const QValue&, const QValue&,
    std::size_t);
template bool revalidate<NatSet>(const ObstructionCertificate<NatSet>&);
template bool revalidate<GridSet>(const ObstructionCertificate<GridSet>&);
template std::optional<ObstructionCertificate<NatSet>> search_obstruction<NatSet>(
    const ExprPtr&, const QValue&, const QValue&, std::size_t, std::size_t, std::size_t);
template std::optional<ObstructionCertificate<GridSet>> search_obstruction<GridSet>(
    const ExprPtr&, const QValue&, const QValue&, std::size_t, std::size_t, std::size_t);

}  // namespace idealkit
