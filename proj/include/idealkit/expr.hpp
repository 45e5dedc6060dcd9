#ifndef IDEALKIT_EXPR_HPP
#define IDEALKIT_EXPR_HPP

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "idealkit/qvalue.hpp"
#include "idealkit/sets.hpp"

namespace idealkit {

enum class SetSort { Nat, Grid };

using AnySet = std::variant<NatSet, GridSet>;

SetSort sort_of(const AnySet& s);
std::size_t set_size(const AnySet& s);
bool set_empty(const AnySet& s);

class SubmeasureExpr;
using ExprPtr = std::shared_ptr<const SubmeasureExpr>;

/// Immutable expression tree denoting a lower semicontinuous submeasure
/// restricted to a finite window. Evaluation is pure and exact; trees are
/// safe to share across threads. Lower semicontinuity is not a runtime
/// check: on a finite window it holds by construction for every node kind.
class SubmeasureExpr : public std::enable_shared_from_this<SubmeasureExpr> {
public:
  enum class Kind {
    Measure,
    CappedCount,
    CeilCount,
    Scale,
    Sum,
    Sup,
    TopKSum,
    QMix,
    Restrict,
    RowLift,
    Hat,
    StepInterval,
    ErdosUlam,
    SimpleDensity,
  };

  struct MeasureNode {
    AnySet points;
    std::vector<Rat> weights;  // aligned with points, all > 0
  };
  struct CappedCountNode {
    Rat unit;           // a > 0
    std::uint64_t cap;  // >= 1
    AnySet block;
  };
  // unit * ceil(|A n block| / divisor); the one non-concave counting shape
  struct CeilCountNode {
    Rat unit;
    std::uint64_t divisor;  // >= 1
    AnySet block;
  };
  struct ScaleNode {
    Rat factor;  // > 0
    ExprPtr child;
  };
  struct SumNode {
    std::vector<ExprPtr> children;  // nonempty
  };
  struct SupNode {
    std::vector<ExprPtr> children;  // nonempty
  };
  struct TopKSumNode {
    std::size_t k;  // >= 1
    std::vector<ExprPtr> children;  // pairwise disjoint supports
  };
  struct QMixNode {
    Rat exponent;               // q >= 1
    std::vector<Rat> weights;   // in [0,1], sum exactly 1
    std::vector<ExprPtr> children;
  };
  struct RestrictNode {
    ExprPtr child;
    AnySet mask;
  };
  struct RowLiftNode {
    ExprPtr child;  // over NatSet
    Nat row;
  };
  struct HatNode {
    ExprPtr child;  // over NatSet, indexed by rows
  };
  struct StepIntervalNode {
    std::vector<Rat> deltas;  // strictly decreasing, positive
    std::vector<Nat> uppers;  // S_k = [lowers[k], uppers[k]) consecutive from 0
  };
  struct ErdosUlamNode {
    std::vector<Rat> f;        // positive
    std::vector<Rat> prefix;   // prefix[n] = sum_{i<=n} f(i)
  };
  struct SimpleDensityNode {
    std::vector<Rat> g;  // positive, nondecreasing
  };

  using Node = std::variant<MeasureNode, CappedCountNode, CeilCountNode, ScaleNode,
                            SumNode, SupNode, TopKSumNode, QMixNode, RestrictNode,
                            RowLiftNode, HatNode, StepIntervalNode, ErdosUlamNode,
                            SimpleDensityNode>;

  static constexpr Nat kDefaultWindow = 4096;

  // factories; every invariant is validated here
  static ExprPtr measure(AnySet points, std::vector<Rat> weights, Nat window);
  static ExprPtr measure_nat(std::vector<std::pair<Nat, Rat>> weights, Nat window);
  static ExprPtr capped_count(Rat unit, std::uint64_t cap, AnySet block, Nat window);
  static ExprPtr ceil_count(Rat unit, std::uint64_t divisor, AnySet block, Nat window);
  static ExprPtr scale(Rat factor, ExprPtr child);
  static ExprPtr sum(std::vector<ExprPtr> children);
  static ExprPtr sup(std::vector<ExprPtr> children);
  static ExprPtr top_k_sum(std::size_t k, std::vector<ExprPtr> children);
  static ExprPtr q_mix(Rat exponent, std::vector<Rat> weights,
                       std::vector<ExprPtr> children);
  static ExprPtr restrict(ExprPtr child, AnySet mask);
  static ExprPtr row_lift(ExprPtr child, Nat row);
  static ExprPtr hat(ExprPtr child, Nat window);
  static ExprPtr step_interval(std::vector<Rat> deltas, std::vector<Nat> uppers,
                               Nat window);
  static ExprPtr erdos_ulam(std::vector<Rat> f, Nat window);
  static ExprPtr simple_density(std::vector<Rat> g, Nat window);

  Kind kind() const { return kind_; }
  SetSort sort() const { return sort_; }
  Nat window() const { return window_; }
  const Node& node() const { return node_; }
  template <class T>
  const T& as() const { return std::get<T>(node_); }

  /// Point support: the set where singletons get positive value.
  const AnySet& support() const { return support_; }

  QValue eval(const NatSet& a) const;
  QValue eval(const GridSet& a) const;
  QValue eval(const AnySet& a) const;

  /// Canonical DSL text of this expression.
  std::string to_dsl() const;

  /// Supports of the atomic counting leaves, used as search candidates.
  std::vector<AnySet> atomic_blocks() const;

private:
  SubmeasureExpr(Kind kind, Node node, SetSort sort, Nat window, AnySet support)
      : kind_(kind), node_(std::move(node)), sort_(sort), window_(window),
        support_(std::move(support)) {}

  static ExprPtr make(Kind kind, Node node, SetSort sort, Nat window, AnySet support);

  Kind kind_;
  Node node_;
  SetSort sort_;
  Nat window_;
  AnySet support_;
};

/// Truncated exhaustive-norm profile: values[n] = eval(expr, A minus its n
/// canonically smallest points); canonical order on GridSet is h-code order.
struct NormProfile {
  AnySet set;
  std::vector<QValue> values;
};

NormProfile norm_profile(const ExprPtr& expr, const AnySet& a, std::size_t depth);

}  // namespace idealkit

#endif
