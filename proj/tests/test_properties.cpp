#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "idealkit/kernels.hpp"
#include "idealkit/parser.hpp"
#include "test_util.hpp"

using namespace idealkit;
using testutil::ExprGen;

namespace {

// one fuzz round: subadditivity, monotonicity, empty set
void fuzz_round(ExprGen& gen, SetSort sort) {
  ExprPtr e = gen.gen(3, sort, false);
  CHECK(e->eval(sort == SetSort::Nat ? AnySet(NatSet()) : AnySet(GridSet())).is_zero());
  if (sort == SetSort::Nat) {
    NatSet a = gen.nat_set(), b = gen.nat_set();
    NatSet u = NatSet::set_union(a, b);
    QValue va = e->eval(a), vb = e->eval(b), vu = e->eval(u);
    CHECK(QValue::leq_sum(vu, va, vb));
    CHECK(va <= vu);
    CHECK(vb <= vu);
  } else {
    GridSet a = gen.grid_set(), b = gen.grid_set();
    GridSet u = GridSet::set_union(a, b);
    QValue va = e->eval(a), vb = e->eval(b), vu = e->eval(u);
    CHECK(QValue::leq_sum(vu, va, vb));
    CHECK(va <= vu);
    CHECK(vb <= vu);
  }
}

}  // namespace

TEST_CASE("submeasure axioms under fuzzing") {
  ExprGen gen(2024, 48);
  for (int i = 0; i < 1500; ++i) fuzz_round(gen, SetSort::Nat);
  ExprGen grid_gen(4048, 24);
  for (int i = 0; i < 500; ++i) fuzz_round(grid_gen, SetSort::Grid);
}

TEST_CASE("sup equals the max over children, re-evaluated independently") {
  ExprGen gen(7, 32);
  for (int i = 0; i < 300; ++i) {
    std::size_t n = 2 + testutil::bounded(gen.state(), 3);
    std::vector<ExprPtr> children;
    for (std::size_t j = 0; j < n; ++j) children.push_back(gen.gen(2, SetSort::Nat, false));
    ExprPtr s = SubmeasureExpr::sup(children);
    NatSet a = gen.nat_set();
    QValue direct = s->eval(a);
    QValue best;
    for (const auto& c : children) best = QValue::max(best, c->eval(a));
    CHECK(direct == best);
  }
}

TEST_CASE("topk with k >= child count equals the plain sum") {
  ExprGen gen(13, 32);
  for (int i = 0; i < 200; ++i) {
    std::size_t n = 2 + testutil::bounded(gen.state(), 3);
    std::vector<ExprPtr> children;
    Nat span = 32 / static_cast<Nat>(n);
    for (std::size_t j = 0; j < n; ++j)
      children.push_back(SubmeasureExpr::restrict(
          gen.gen(2, SetSort::Nat, true),
          NatSet::interval(static_cast<Nat>(j) * span, (static_cast<Nat>(j) + 1) * span)));
    ExprPtr topk = SubmeasureExpr::top_k_sum(n + 1 + testutil::bounded(gen.state(), 3),
                                             children);
    ExprPtr plain = SubmeasureExpr::sum(children);
    NatSet a = gen.nat_set();
    CHECK(topk->eval(a) == plain->eval(a));
  }
}

TEST_CASE("qmix identities") {
  ExprGen gen(29, 32);
  for (int i = 0; i < 200; ++i) {
    std::size_t n = 2 + testutil::bounded(gen.state(), 2);
    std::vector<ExprPtr> children;
    std::vector<Rat> weights(n, Rat(1, Int(n)));
    for (std::size_t j = 0; j < n; ++j) children.push_back(gen.gen(2, SetSort::Nat, true));

    // q = 1 equals the weighted sum of scaled children
    ExprPtr mix = SubmeasureExpr::q_mix(Rat(1), weights, children);
    std::vector<ExprPtr> scaled;
    for (std::size_t j = 0; j < n; ++j)
      scaled.push_back(SubmeasureExpr::scale(weights[j], children[j]));
    ExprPtr summed = SubmeasureExpr::sum(scaled);
    NatSet a = gen.nat_set();
    CHECK(mix->eval(a) == summed->eval(a));

    // a single unit-weight term collapses to its child, for any exponent
    ExprPtr single = SubmeasureExpr::q_mix(Rat(3, 2), {Rat(1)}, {children[0]});
    CHECK(single->eval(a) == children[0]->eval(a));
  }
}

TEST_CASE("duplicated term halves collapse in a q=1 mix") {
  auto phi = parse_expr("(capped 1/2 3 (block 0 16))", 32);
  auto mix = SubmeasureExpr::q_mix(Rat(1), {Rat(1, 2), Rat(1, 2)}, {phi, phi});
  ExprGen gen(31, 32);
  for (int i = 0; i < 50; ++i) {
    NatSet a = gen.nat_set();
    CHECK(mix->eval(a) == phi->eval(a));
  }
}

TEST_CASE("norm profiles never increase") {
  ExprGen gen(17, 32);
  for (int i = 0; i < 200; ++i) {
    ExprPtr e = gen.gen(2, SetSort::Nat, false);
    NatSet a = gen.nat_set();
    NormProfile p = norm_profile(e, a, a.size());
    CHECK(p.values.front() == e->eval(a));
    for (std::size_t n = 1; n < p.values.size(); ++n)
      CHECK(p.values[n] <= p.values[n - 1]);
    CHECK(p.values.back().is_zero());
  }
}

TEST_CASE("parallel kernels match the serial reference") {
  ExprGen gen(55, 32);
  ExprPtr e = gen.gen(3, SetSort::Nat, false);
  AnySet support = NatSet::interval(0, 10);
  auto serial = subset_values_serial(e, support);
  set_threads(4);
  auto parallel = subset_values_parallel(e, support);
  set_threads(1);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) CHECK(serial[i] == parallel[i]);

  std::vector<AnySet> targets;
  for (int i = 0; i < 200; ++i) targets.push_back(gen.nat_set());
  auto bs = batch_eval_serial(e, targets);
  set_threads(4);
  auto bp = batch_eval_parallel(e, targets);
  set_threads(1);
  REQUIRE(bs.size() == bp.size());
  for (std::size_t i = 0; i < bs.size(); ++i) CHECK(bs[i] == bp[i]);
}
