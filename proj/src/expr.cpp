#include "idealkit/expr.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace idealkit {

SetSort sort_of(const AnySet& s) {
  return std::holds_alternative<NatSet>(s) ? SetSort::Nat : SetSort::Grid;
}

std::size_t set_size(const AnySet& s) {
  return std::visit([](const auto& v) { return v.size(); }, s);
}

bool set_empty(const AnySet& s) { return set_size(s) == 0; }

namespace {

void check_window_nat(const NatSet& s, Nat window, const char* what) {
  if (!s.empty() && s.max() >= window)
    throw Error(ErrorKind::Window, std::string(what) + ": element " +
                                       std::to_string(s.max()) +
                                       " outside window " + std::to_string(window));
}

void check_window_grid(const GridSet& s, Nat window, const char* what) {
  for (const auto& p : s) {
    if (p.row >= window || p.col >= window)
      throw Error(ErrorKind::Window, std::string(what) + ": point (" +
                                         std::to_string(p.row) + "," +
                                         std::to_string(p.col) +
                                         ") outside window " + std::to_string(window));
  }
}

void check_window(const AnySet& s, Nat window, const char* what) {
  if (sort_of(s) == SetSort::Nat) {
    check_window_nat(std::get<NatSet>(s), window, what);
  } else {
    check_window_grid(std::get<GridSet>(s), window, what);
  }
}

AnySet set_union_any(const AnySet& a, const AnySet& b) {
  if (sort_of(a) != sort_of(b))
    throw Error(ErrorKind::SortMismatch, "union of sets of different sorts");
  if (sort_of(a) == SetSort::Nat)
    return NatSet::set_union(std::get<NatSet>(a), std::get<NatSet>(b));
  return GridSet::set_union(std::get<GridSet>(a), std::get<GridSet>(b));
}

AnySet set_intersection_any(const AnySet& a, const AnySet& b) {
  if (sort_of(a) != sort_of(b))
    throw Error(ErrorKind::SortMismatch, "intersection of sets of different sorts");
  if (sort_of(a) == SetSort::Nat)
    return NatSet::intersection(std::get<NatSet>(a), std::get<NatSet>(b));
  return GridSet::intersection(std::get<GridSet>(a), std::get<GridSet>(b));
}

AnySet empty_set(SetSort sort) {
  return sort == SetSort::Nat ? AnySet(NatSet()) : AnySet(GridSet());
}

SetSort common_child_sort(const std::vector<ExprPtr>& children, const char* what) {
  if (children.empty())
    throw Error(ErrorKind::Invariant, std::string(what) + " requires at least one child");
  SetSort sort = children.front()->sort();
  Nat window = children.front()->window();
  for (const auto& c : children) {
    if (!c) throw Error(ErrorKind::Usage, "null child expression");
    if (c->sort() != sort)
      throw Error(ErrorKind::SortMismatch,
                  std::string(what) + " children mix NatSet and GridSet sorts");
    if (c->window() != window)
      throw Error(ErrorKind::Invariant,
                  std::string(what) + " children have different windows");
  }
  return sort;
}

AnySet union_of_supports(const std::vector<ExprPtr>& children, SetSort sort) {
  AnySet acc = empty_set(sort);
  for (const auto& c : children) acc = set_union_any(acc, c->support());
  return acc;
}

}  // namespace

ExprPtr SubmeasureExpr::make(Kind kind, Node node, SetSort sort, Nat window,
                             AnySet support) {
  check_window(support, window, "support");
  return ExprPtr(new SubmeasureExpr(kind, std::move(node), sort, window,
                                    std::move(support)));
}

ExprPtr SubmeasureExpr::measure(AnySet points, std::vector<Rat> weights, Nat window) {
  if (set_size(points) != weights.size())
    throw Error(ErrorKind::Invariant, "measure: points/weights size mismatch");
  for (const Rat& w : weights)
    if (w <= 0) throw Error(ErrorKind::Invariant, "measure: weight must be positive");
  SetSort sort = sort_of(points);
  AnySet support = points;
  return make(Kind::Measure, MeasureNode{std::move(points), std::move(weights)}, sort,
              window, std::move(support));
}

ExprPtr SubmeasureExpr::measure_nat(std::vector<std::pair<Nat, Rat>> weights,
                                    Nat window) {
  std::sort(weights.begin(), weights.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < weights.size(); ++i)
    if (weights[i - 1].first == weights[i].first)
      throw Error(ErrorKind::Invariant, "measure: duplicate point");
  std::vector<Nat> pts;
  std::vector<Rat> ws;
  pts.reserve(weights.size());
  ws.reserve(weights.size());
  for (auto& [p, w] : weights) {
    pts.push_back(p);
    ws.push_back(std::move(w));
  }
  return measure(NatSet(std::move(pts)), std::move(ws), window);
}

ExprPtr SubmeasureExpr::capped_count(Rat unit, std::uint64_t cap, AnySet block,
                                     Nat window) {
  if (unit <= 0) throw Error(ErrorKind::Invariant, "capped: unit must be positive");
  if (cap == 0) throw Error(ErrorKind::Invariant, "capped: cap must be positive");
  AnySet support = block;
  SetSort sort = sort_of(block);
  return make(Kind::CappedCount, CappedCountNode{std::move(unit), cap, std::move(block)},
              sort, window, std::move(support));
}

ExprPtr SubmeasureExpr::ceil_count(Rat unit, std::uint64_t divisor, AnySet block,
                                   Nat window) {
  if (unit <= 0) throw Error(ErrorKind::Invariant, "ceilcount: unit must be positive");
  if (divisor == 0)
    throw Error(ErrorKind::Invariant, "ceilcount: divisor must be positive");
  AnySet support = block;
  SetSort sort = sort_of(block);
  return make(Kind::CeilCount, CeilCountNode{std::move(unit), divisor, std::move(block)},
              sort, window, std::move(support));
}

ExprPtr SubmeasureExpr::scale(Rat factor, ExprPtr child) {
  if (!child) throw Error(ErrorKind::Usage, "scale: null child");
  if (factor <= 0) throw Error(ErrorKind::Invariant, "scale: factor must be positive");
  SetSort sort = child->sort();
  Nat window = child->window();
  AnySet support = child->support();
  return make(Kind::Scale, ScaleNode{std::move(factor), std::move(child)}, sort, window,
              std::move(support));
}

ExprPtr SubmeasureExpr::sum(std::vector<ExprPtr> children) {
  SetSort sort = common_child_sort(children, "sum");
  Nat window = children.front()->window();
  AnySet support = union_of_supports(children, sort);
  return make(Kind::Sum, SumNode{std::move(children)}, sort, window, std::move(support));
}

ExprPtr SubmeasureExpr::sup(std::vector<ExprPtr> children) {
  SetSort sort = common_child_sort(children, "sup");
  Nat window = children.front()->window();
  AnySet support = union_of_supports(children, sort);
  return make(Kind::Sup, SupNode{std::move(children)}, sort, window, std::move(support));
}

ExprPtr SubmeasureExpr::top_k_sum(std::size_t k, std::vector<ExprPtr> children) {
  if (k == 0) throw Error(ErrorKind::Invariant, "topk: k must be positive");
  SetSort sort = common_child_sort(children, "topk");
  Nat window = children.front()->window();
  AnySet support = union_of_supports(children, sort);
  std::size_t total = 0;
  for (const auto& c : children) total += set_size(c->support());
  if (total != set_size(support))
    throw Error(ErrorKind::Invariant, "topk: children supports are not pairwise disjoint");
  return make(Kind::TopKSum, TopKSumNode{k, std::move(children)}, sort, window,
              std::move(support));
}

ExprPtr SubmeasureExpr::q_mix(Rat exponent, std::vector<Rat> weights,
                              std::vector<ExprPtr> children) {
  if (exponent < 1) throw Error(ErrorKind::Invariant, "qmix: exponent must be >= 1");
  if (numerator(exponent) > 1000000 || denominator(exponent) > 1000000)
    throw Error(ErrorKind::Invariant, "qmix: exponent out of supported range");
  SetSort sort = common_child_sort(children, "qmix");
  if (weights.size() != children.size())
    throw Error(ErrorKind::Invariant, "qmix: weights/children size mismatch");
  Rat total = 0;
  for (const Rat& a : weights) {
    if (a < 0 || a > 1)
      throw Error(ErrorKind::Invariant, "qmix: weight outside [0,1]");
    total += a;
  }
  if (total != 1)
    throw Error(ErrorKind::Invariant,
                "qmix: weights sum " + rational_to_string(total) + " != 1");
  Nat window = children.front()->window();
  AnySet support = empty_set(sort);
  for (std::size_t i = 0; i < children.size(); ++i)
    if (weights[i] > 0) support = set_union_any(support, children[i]->support());
  return make(Kind::QMix, QMixNode{std::move(exponent), std::move(weights),
                                   std::move(children)},
              sort, window, std::move(support));
}

ExprPtr SubmeasureExpr::restrict(ExprPtr child, AnySet mask) {
  if (!child) throw Error(ErrorKind::Usage, "restrict: null child");
  if (sort_of(mask) != child->sort())
    throw Error(ErrorKind::SortMismatch, "restrict: mask sort differs from child");
  SetSort sort = child->sort();
  Nat window = child->window();
  AnySet support = set_intersection_any(child->support(), mask);
  return make(Kind::Restrict, RestrictNode{std::move(child), std::move(mask)}, sort,
              window, std::move(support));
}

ExprPtr SubmeasureExpr::row_lift(ExprPtr child, Nat row) {
  if (!child) throw Error(ErrorKind::Usage, "rowlift: null child");
  if (child->sort() != SetSort::Nat)
    throw Error(ErrorKind::SortMismatch, "rowlift: child must be over NatSet");
  Nat window = child->window();
  if (row >= window)
    throw Error(ErrorKind::Window, "rowlift: row outside window");
  std::vector<GridPoint> pts;
  const NatSet& cs = std::get<NatSet>(child->support());
  pts.reserve(cs.size());
  for (Nat c : cs) pts.push_back(GridPoint{row, c});
  return make(Kind::RowLift, RowLiftNode{std::move(child), row}, SetSort::Grid, window,
              GridSet(std::move(pts)));
}

ExprPtr SubmeasureExpr::hat(ExprPtr child, Nat window) {
  if (!child) throw Error(ErrorKind::Usage, "hat: null child");
  if (child->sort() != SetSort::Nat)
    throw Error(ErrorKind::SortMismatch, "hat: child must be over NatSet");
  // rows decodable from [0, window) go up to floor(log2(window))
  Nat max_row = 0;
  while ((1ull << (max_row + 1)) <= window) ++max_row;
  if (child->window() < max_row + 1)
    throw Error(ErrorKind::Window,
                "hat: child window " + std::to_string(child->window()) +
                    " does not cover decodable rows up to " + std::to_string(max_row));
  const NatSet& rows = std::get<NatSet>(child->support());
  std::vector<Nat> pts;
  for (Nat n = 0; n < window; ++n) {
    if (rows.contains(pair_decode_u64(n).row)) pts.push_back(n);
  }
  return make(Kind::Hat, HatNode{std::move(child)}, SetSort::Nat, window,
              NatSet(std::move(pts)));
}

ExprPtr SubmeasureExpr::step_interval(std::vector<Rat> deltas, std::vector<Nat> uppers,
                                      Nat window) {
  if (deltas.empty() || deltas.size() != uppers.size())
    throw Error(ErrorKind::Invariant, "step: need matching nonempty delta/interval lists");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (deltas[i] <= 0) throw Error(ErrorKind::Invariant, "step: delta must be positive");
    if (i > 0 && !(deltas[i] < deltas[i - 1]))
      throw Error(ErrorKind::Invariant, "step: deltas must be strictly decreasing");
    Nat lower = i == 0 ? 0 : uppers[i - 1];
    if (uppers[i] <= lower)
      throw Error(ErrorKind::Invariant, "step: intervals must be nonempty and consecutive");
  }
  NatSet support = NatSet::interval(0, uppers.back());
  return make(Kind::StepInterval, StepIntervalNode{std::move(deltas), std::move(uppers)},
              SetSort::Nat, window, std::move(support));
}

ExprPtr SubmeasureExpr::erdos_ulam(std::vector<Rat> f, Nat window) {
  if (f.empty()) throw Error(ErrorKind::Invariant, "erdos-ulam: empty weight list");
  if (f.size() > window)
    throw Error(ErrorKind::Window, "erdos-ulam: weight list longer than window");
  std::vector<Rat> prefix(f.size());
  Rat run = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] <= 0) throw Error(ErrorKind::Invariant, "erdos-ulam: weights must be positive");
    run += f[i];
    prefix[i] = run;
  }
  NatSet support = NatSet::interval(0, static_cast<Nat>(f.size()));
  return make(Kind::ErdosUlam, ErdosUlamNode{std::move(f), std::move(prefix)},
              SetSort::Nat, window, std::move(support));
}

ExprPtr SubmeasureExpr::simple_density(std::vector<Rat> g, Nat window) {
  if (g.empty()) throw Error(ErrorKind::Invariant, "simple-density: empty list");
  if (g.size() > window)
    throw Error(ErrorKind::Window, "simple-density: list longer than window");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] <= 0)
      throw Error(ErrorKind::Invariant, "simple-density: entries must be positive");
    if (i > 0 && g[i] < g[i - 1])
      throw Error(ErrorKind::Invariant, "simple-density: entries must be nondecreasing");
  }
  NatSet support = NatSet::interval(0, static_cast<Nat>(g.size()));
  return make(Kind::SimpleDensity, SimpleDensityNode{std::move(g)}, SetSort::Nat, window,
              std::move(support));
}

namespace {

template <class SetT>
std::size_t block_intersection_size(const SetT& a, const AnySet& block) {
  return SetT::intersection_size(a, std::get<SetT>(block));
}

template <class SetT>
QValue eval_impl(const SubmeasureExpr& e, const SetT& a);

template <class SetT>
QValue eval_node(const SubmeasureExpr::MeasureNode& n, const SetT& a) {
  const SetT& pts = std::get<SetT>(n.points);
  Rat total = 0;
  std::size_t ia = 0, ip = 0;
  while (ia < a.size() && ip < pts.size()) {
    if (a[ia] < pts[ip]) {
      ++ia;
    } else if (pts[ip] < a[ia]) {
      ++ip;
    } else {
      total += n.weights[ip];
      ++ia;
      ++ip;
    }
  }
  return QValue::rational(std::move(total));
}

template <class SetT>
QValue eval_node(const SubmeasureExpr::CappedCountNode& n, const SetT& a) {
  std::uint64_t hits = block_intersection_size(a, n.block);
  std::uint64_t counted = std::min<std::uint64_t>(n.cap, hits);
  return QValue::rational(n.unit * counted);
}

template <class SetT>
QValue eval_node(const SubmeasureExpr::CeilCountNode& n, const SetT& a) {
  std::uint64_t hits = block_intersection_size(a, n.block);
  std::uint64_t units = (hits + n.divisor - 1) / n.divisor;
  return QValue::rational(n.unit * units);
}

// v^(p/r) where the result must be rational
Rat term_power(const QValue& v, unsigned p, unsigned r) {
  std::optional<Rat> t;
  if (v.is_rational()) {
    t = pow_exact(v.rat(), p, r);
  } else if (v.is_root()) {
    t = pow_exact(v.root_base(), p, r * v.root_index());
  } else {
    throw Error(ErrorKind::Exactness, "q-mix over an infinite value");
  }
  if (!t)
    throw Error(ErrorKind::Exactness,
                "q-mix term " + v.to_string() + "^(" + std::to_string(p) + "/" +
                    std::to_string(r) + ") is not rational");
  return *t;
}

template <class SetT>
QValue eval_impl(const SubmeasureExpr& e, const SetT& a) {
  if (a.empty()) return QValue();
  switch (e.kind()) {
    case SubmeasureExpr::Kind::Measure:
      return eval_node(e.as<SubmeasureExpr::MeasureNode>(), a);
    case SubmeasureExpr::Kind::CappedCount:
      return eval_node(e.as<SubmeasureExpr::CappedCountNode>(), a);
    case SubmeasureExpr::Kind::CeilCount:
      return eval_node(e.as<SubmeasureExpr::CeilCountNode>(), a);
    case SubmeasureExpr::Kind::Scale: {
      const auto& n = e.as<SubmeasureExpr::ScaleNode>();
      return eval_impl(*n.child, a).scaled(n.factor);
    }
    case SubmeasureExpr::Kind::Sum: {
      QValue total;
      for (const auto& c : e.as<SubmeasureExpr::SumNode>().children)
        total += eval_impl(*c, a);
      return total;
    }
    case SubmeasureExpr::Kind::Sup: {
      QValue best;
      for (const auto& c : e.as<SubmeasureExpr::SupNode>().children)
        best = QValue::max(best, eval_impl(*c, a));
      return best;
    }
    case SubmeasureExpr::Kind::TopKSum: {
      const auto& n = e.as<SubmeasureExpr::TopKSumNode>();
      std::vector<QValue> vals;
      vals.reserve(n.children.size());
      for (const auto& c : n.children) vals.push_back(eval_impl(*c, a));
      std::size_t k = std::min(n.k, vals.size());
      std::partial_sort(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(k),
                        vals.end(), [](const QValue& x, const QValue& y) { return y < x; });
      QValue total;
      for (std::size_t i = 0; i < k; ++i) total += vals[i];
      return total;
    }
    case SubmeasureExpr::Kind::QMix: {
      const auto& n = e.as<SubmeasureExpr::QMixNode>();
      if (n.children.size() == 1 && n.weights[0] == 1)
        return eval_impl(*n.children[0], a);
      unsigned p = numerator(n.exponent).convert_to<unsigned>();
      unsigned r = denominator(n.exponent).convert_to<unsigned>();
      Rat s = 0;
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (n.weights[i] == 0) continue;
        QValue v = eval_impl(*n.children[i], a);
        if (n.exponent == 1) {
          s += n.weights[i] * v.rat();
        } else {
          s += n.weights[i] * term_power(v, p, r);
        }
      }
      if (n.exponent == 1) return QValue::rational(std::move(s));
      // (s)^(1/q) = (s^r)^(1/p)
      return QValue::root(pow_rational(s, r), p);
    }
    case SubmeasureExpr::Kind::Restrict: {
      const auto& n = e.as<SubmeasureExpr::RestrictNode>();
      return eval_impl(*n.child, SetT::intersection(a, std::get<SetT>(n.mask)));
    }
    case SubmeasureExpr::Kind::RowLift: {
      if constexpr (std::is_same_v<SetT, GridSet>) {
        const auto& n = e.as<SubmeasureExpr::RowLiftNode>();
        return eval_impl(*n.child, a.row_section(n.row));
      }
      break;
    }
    case SubmeasureExpr::Kind::Hat: {
      if constexpr (std::is_same_v<SetT, NatSet>) {
        const auto& n = e.as<SubmeasureExpr::HatNode>();
        std::vector<Nat> rows;
        rows.reserve(a.size());
        for (Nat x : a) rows.push_back(pair_decode_u64(x).row);
        return eval_impl(*n.child, NatSet::from_unsorted(std::move(rows)));
      }
      break;
    }
    case SubmeasureExpr::Kind::StepInterval: {
      if constexpr (std::is_same_v<SetT, NatSet>) {
        const auto& n = e.as<SubmeasureExpr::StepIntervalNode>();
        Nat first = a.min();
        if (first >= n.uppers.back()) return QValue();
        auto it = std::upper_bound(n.uppers.begin(), n.uppers.end(), first);
        return QValue::rational(n.deltas[static_cast<std::size_t>(it - n.uppers.begin())]);
      }
      break;
    }
    case SubmeasureExpr::Kind::ErdosUlam: {
      if constexpr (std::is_same_v<SetT, NatSet>) {
        const auto& n = e.as<SubmeasureExpr::ErdosUlamNode>();
        Rat best = 0, run = 0;
        std::size_t ia = 0;
        for (std::size_t i = 0; i < n.f.size(); ++i) {
          while (ia < a.size() && a[ia] < i + 1) {
            if (a[ia] == i) run += n.f[i];
            ++ia;
          }
          Rat ratio = run / n.prefix[i];
          if (ratio > best) best = ratio;
        }
        return QValue::rational(std::move(best));
      }
      break;
    }
    case SubmeasureExpr::Kind::SimpleDensity: {
      if constexpr (std::is_same_v<SetT, NatSet>) {
        const auto& n = e.as<SubmeasureExpr::SimpleDensityNode>();
        Rat best = 0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < n.g.size(); ++i) {
          while (count < a.size() && a[count] <= i) ++count;
          Rat ratio = Rat(count) / n.g[i];
          if (ratio > best) best = ratio;
        }
        return QValue::rational(std::move(best));
      }
      break;
    }
  }
  throw Error(ErrorKind::SortMismatch, "node kind incompatible with argument sort");
}

}  // namespace

QValue SubmeasureExpr::eval(const NatSet& a) const {
  if (sort_ != SetSort::Nat)
    throw Error(ErrorKind::SortMismatch, "NatSet argument to GridSet expression");
  check_window_nat(a, window_, "eval argument");
  return eval_impl(*this, a);
}

QValue SubmeasureExpr::eval(const GridSet& a) const {
  if (sort_ != SetSort::Grid)
    throw Error(ErrorKind::SortMismatch, "GridSet argument to NatSet expression");
  check_window_grid(a, window_, "eval argument");
  return eval_impl(*this, a);
}

QValue SubmeasureExpr::eval(const AnySet& a) const {
  return std::visit([this](const auto& s) { return eval(s); }, a);
}

namespace {

std::string set_to_dsl(const AnySet& s) {
  std::ostringstream os;
  if (sort_of(s) == SetSort::Nat) {
    const NatSet& n = std::get<NatSet>(s);
    if (n.is_interval()) {
      os << "(block " << n.min() << " " << (n.max() + 1) << ")";
    } else {
      os << "(set";
      for (Nat x : n) os << " " << x;
      os << ")";
    }
  } else {
    const GridSet& g = std::get<GridSet>(s);
    os << "(grid";
    for (const auto& p : g) os << " (" << p.row << " " << p.col << ")";
    os << ")";
  }
  return os.str();
}

}  // namespace

std::string SubmeasureExpr::to_dsl() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Measure: {
      const auto& n = as<MeasureNode>();
      os << "(measure (";
      for (std::size_t i = 0; i < n.weights.size(); ++i) {
        if (i) os << " ";
        os << "(";
        if (sort_of(n.points) == SetSort::Nat) {
          os << std::get<NatSet>(n.points)[i];
        } else {
          const auto& p = std::get<GridSet>(n.points)[i];
          os << "(" << p.row << " " << p.col << ")";
        }
        os << " " << rational_to_string(n.weights[i]) << ")";
      }
      os << "))";
      break;
    }
    case Kind::CappedCount: {
      const auto& n = as<CappedCountNode>();
      os << "(capped " << rational_to_string(n.unit) << " " << n.cap << " "
         << set_to_dsl(n.block) << ")";
      break;
    }
    case Kind::CeilCount: {
      const auto& n = as<CeilCountNode>();
      os << "(ceilcount " << rational_to_string(n.unit) << " " << n.divisor << " "
         << set_to_dsl(n.block) << ")";
      break;
    }
    case Kind::Scale: {
      const auto& n = as<ScaleNode>();
      os << "(scale " << rational_to_string(n.factor) << " " << n.child->to_dsl() << ")";
      break;
    }
    case Kind::Sum: {
      os << "(sum";
      for (const auto& c : as<SumNode>().children) os << " " << c->to_dsl();
      os << ")";
      break;
    }
    case Kind::Sup: {
      os << "(sup";
      for (const auto& c : as<SupNode>().children) os << " " << c->to_dsl();
      os << ")";
      break;
    }
    case Kind::TopKSum: {
      const auto& n = as<TopKSumNode>();
      os << "(topk " << n.k;
      for (const auto& c : n.children) os << " " << c->to_dsl();
      os << ")";
      break;
    }
    case Kind::QMix: {
      const auto& n = as<QMixNode>();
      os << "(qmix " << rational_to_string(n.exponent) << " (";
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) os << " ";
        os << "(" << rational_to_string(n.weights[i]) << " " << n.children[i]->to_dsl()
           << ")";
      }
      os << "))";
      break;
    }
    case Kind::Restrict: {
      const auto& n = as<RestrictNode>();
      os << "(restrict " << n.child->to_dsl() << " " << set_to_dsl(n.mask) << ")";
      break;
    }
    case Kind::RowLift: {
      const auto& n = as<RowLiftNode>();
      os << "(rowlift " << n.child->to_dsl() << " " << n.row << ")";
      break;
    }
    case Kind::Hat:
      os << "(hat " << as<HatNode>().child->to_dsl() << ")";
      break;
    case Kind::StepInterval: {
      const auto& n = as<StepIntervalNode>();
      os << "(step (";
      for (std::size_t i = 0; i < n.deltas.size(); ++i) {
        if (i) os << " ";
        Nat lo = i == 0 ? 0 : n.uppers[i - 1];
        os << "(" << rational_to_string(n.deltas[i]) << " " << lo << " " << n.uppers[i]
           << ")";
      }
      os << "))";
      break;
    }
    case Kind::ErdosUlam: {
      const auto& n = as<ErdosUlamNode>();
      os << "(erdos-ulam (";
      for (std::size_t i = 0; i < n.f.size(); ++i) {
        if (i) os << " ";
        os << rational_to_string(n.f[i]);
      }
      os << "))";
      break;
    }
    case Kind::SimpleDensity: {
      const auto& n = as<SimpleDensityNode>();
      os << "(simple-density (";
      for (std::size_t i = 0; i < n.g.size(); ++i) {
        if (i) os << " ";
        os << rational_to_string(n.g[i]);
      }
      os << "))";
      break;
    }
  }
  return os.str();
}

std::vector<AnySet> SubmeasureExpr::atomic_blocks() const {
  std::vector<AnySet> out;
  switch (kind_) {
    case Kind::Measure:
    case Kind::CappedCount:
    case Kind::CeilCount:
    case Kind::ErdosUlam:
    case Kind::SimpleDensity:
    case Kind::Hat:
      out.push_back(support_);
      break;
    case Kind::StepInterval: {
      const auto& n = as<StepIntervalNode>();
      for (std::size_t i = 0; i < n.uppers.size(); ++i) {
        Nat lo = i == 0 ? 0 : n.uppers[i - 1];
        out.push_back(NatSet::interval(lo, n.uppers[i]));
      }
      break;
    }
    case Kind::Scale:
      return as<ScaleNode>().child->atomic_blocks();
    case Kind::Restrict: {
      const auto& n = as<RestrictNode>();
      for (AnySet b : n.child->atomic_blocks())
        out.push_back(set_intersection_any(b, n.mask));
      break;
    }
    case Kind::RowLift: {
      const auto& n = as<RowLiftNode>();
      for (const AnySet& b : n.child->atomic_blocks()) {
        std::vector<GridPoint> pts;
        for (Nat c : std::get<NatSet>(b)) pts.push_back(GridPoint{n.row, c});
        out.push_back(GridSet(std::move(pts)));
      }
      break;
    }
    case Kind::Sum:
    case Kind::Sup:
    case Kind::TopKSum:
    case Kind::QMix: {
      auto visit_children = [&](const std::vector<ExprPtr>& cs) {
        for (const auto& c : cs)
          for (AnySet b : c->atomic_blocks()) out.push_back(std::move(b));
      };
      if (kind_ == Kind::Sum) visit_children(as<SumNode>().children);
      if (kind_ == Kind::Sup) visit_children(as<SupNode>().children);
      if (kind_ == Kind::TopKSum) visit_children(as<TopKSumNode>().children);
      if (kind_ == Kind::QMix) visit_children(as<QMixNode>().children);
      break;
    }
  }
  return out;
}

NormProfile norm_profile(const ExprPtr& expr, const AnySet& a, std::size_t depth) {
  if (!expr) throw Error(ErrorKind::Usage, "norm_profile: null expression");
  if (depth > set_size(a))
    throw Error(ErrorKind::Usage, "norm_profile: depth exceeds set size");
  NormProfile profile;
  profile.set = a;
  profile.values.reserve(depth + 1);
  for (std::size_t n = 0; n <= depth; ++n) {
    AnySet rest = std::visit(
        [&](const auto& s) -> AnySet {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, NatSet>) {
            return s.drop_smallest(n);
          } else {
            return s.drop_smallest_h(n);
          }
        },
        a);
    profile.values.push_back(expr->eval(rest));
  }
  return profile;
}

}  // namespace idealkit
