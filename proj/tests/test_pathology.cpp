#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "idealkit/constructions.hpp"
#include "idealkit/json_io.hpp"
#include "idealkit/kernels.hpp"
#include "idealkit/parser.hpp"
#include "idealkit/pathology.hpp"
#include "test_util.hpp"

using namespace idealkit;

TEST_CASE("a measure is its own envelope") {
  auto m = parse_expr("(measure ((0 1/2) (1 1/3) (2 1/6)))", 16);
  AnySet support = NatSet::interval(0, 3);
  PathologyReport rep = envelope(m, support, support, 1e-9);
  CHECK(rep.certified == Rat(1));
  CHECK(rep.gap.is_zero());
  CHECK(rep.witness == std::vector<Rat>{Rat(1, 2), Rat(1, 3), Rat(1, 6)});
  CHECK(std::abs(rep.lp_value - 1.0) < 1e-9);
}

TEST_CASE("the 3-point pathological submeasure has envelope 3/2") {
  ExprPtr expr = SubmeasureExpr::ceil_count(Rat(1), 2, NatSet::interval(0, 3), 8);
  // sanity: singletons 1, pairs 1, triple 2
  CHECK(expr->eval(NatSet::single(0)) == QValue::rational(Rat(1)));
  CHECK(expr->eval(NatSet::from_unsorted({0, 2})) == QValue::rational(Rat(1)));
  CHECK(expr->eval(NatSet::interval(0, 3)) == QValue::rational(Rat(2)));

  AnySet full = NatSet::interval(0, 3);
  PathologyReport rep = envelope(expr, full, full, 1e-9);
  CHECK(rep.certified == Rat(3, 2));
  CHECK(rep.gap == QValue::rational(Rat(1, 2)));
  CHECK(std::abs(rep.lp_value - 1.5) <= 1e-9);

  // brute-force vertex check: eta constant 1/2 is feasible and optimal
  for (const Rat& w : rep.witness) CHECK(w == Rat(1, 2));

  // exhaustive scan over the 7 targets finds the worst gap at the full set
  PathologyScan scan = pathology_scan(expr, full, 64, 1e-9, 7);
  CHECK(scan.worst_gap == QValue::rational(Rat(1, 2)));
}

TEST_CASE("sups of measures have zero gap") {
  std::uint64_t state = 1;
  for (int trial = 0; trial < 25; ++trial) {
    Nat n = 4 + static_cast<Nat>(testutil::bounded(state, 9));
    std::vector<ExprPtr> measures;
    std::size_t k = 1 + testutil::bounded(state, 5);
    for (std::size_t i = 0; i < k; ++i) {
      std::vector<std::pair<Nat, Rat>> w;
      for (Nat p = 0; p < n; ++p)
        if (testutil::bounded(state, 2) == 0)
          w.emplace_back(p, Rat(1 + testutil::bounded(state, 64), 64));
      if (w.empty()) w.emplace_back(0, Rat(1, 2));
      measures.push_back(SubmeasureExpr::measure_nat(std::move(w), 32));
    }
    ExprPtr phi = SubmeasureExpr::sup(std::move(measures));
    AnySet support = NatSet::interval(0, n);
    std::uint64_t mask = 1 + testutil::bounded(state, (1ull << n) - 1);
    AnySet target = subset_of(support, mask);
    PathologyReport rep = envelope(phi, target, support, 1e-9);
    CHECK(rep.gap <= QValue::rational(Rat(1, 1000000000)));
  }
}

TEST_CASE("envelope is monotone in the target") {
  std::uint64_t state = 3;
  ExprPtr expr = SubmeasureExpr::sup(
      {parse_expr("(capped 1/3 2 (block 0 6))", 16),
       parse_expr("(ceilcount 1/2 2 (block 2 9))", 16),
       parse_expr("(measure ((0 1/4) (3 1/4) (7 1/2)))", 16)});
  NatSet support = NatSet::interval(0, 9);
  for (int trial = 0; trial < 40; ++trial) {
    std::uint64_t small = 1 + testutil::bounded(state, (1ull << 9) - 1);
    std::uint64_t extra = testutil::bounded(state, (1ull << 9) - 1);
    std::uint64_t big = small | extra;
    PathologyReport a = envelope(expr, subset_of(support, small), support, 1e-9);
    PathologyReport b = envelope(expr, subset_of(support, big), support, 1e-9);
    CHECK(a.certified <= b.certified + Rat(1, 1000000000));
  }
}

TEST_CASE("dl expressions with unit exponents stay nonpathological") {
  // sup_n sum_{k in S_n} a_k phi_k(A_(k)) with sup-of-measures rows
  const Nat window = 16;
  std::uint64_t state = 8;
  DLSpec spec;
  for (Nat k = 0; k < 4; ++k) {
    std::vector<ExprPtr> ms;
    for (int i = 0; i < 2; ++i) {
      std::vector<std::pair<Nat, Rat>> w;
      for (Nat p = 0; p < 6; ++p)
        if (testutil::bounded(state, 2) == 0)
          w.emplace_back(p, Rat(1 + testutil::bounded(state, 8), 8));
      if (w.empty()) w.emplace_back(0, Rat(1, 2));
      ms.push_back(SubmeasureExpr::measure_nat(std::move(w), window));
    }
    spec.phis.push_back(SubmeasureExpr::sup(std::move(ms)));
    spec.a.emplace_back(1, 2);
  }
  spec.blocks = {NatSet::from_unsorted({0, 1}), NatSet::from_unsorted({2, 3})};
  spec.q = {Rat(1), Rat(1)};
  ExprPtr psi = dl_build(spec, window);

  std::vector<GridPoint> pts;
  for (Nat k = 0; k < 4; ++k)
    for (Nat c = 0; c < 3; ++c) pts.push_back({k, c});
  GridSet support(pts);
  PathologyScan scan = pathology_scan(psi, support, 60, 1e-9, 11);
  CHECK(scan.worst_gap <= QValue::rational(Rat(1, 1000000000)));
}

TEST_CASE("hat measure transfer") {
  auto phi = SubmeasureExpr::measure_nat({{0, Rat(1, 2)}, {2, Rat(1, 2)}}, 16);

  // Dirac at row 0 lands on the code of (0, minimal column)
  NatSet a0 = NatSet::from_unsorted({static_cast<Nat>(pair_encode_u64(0, 5))});
  TransferredMeasure t0 = hat_measure_transfer({{0, Rat(1, 2)}}, phi, a0);
  REQUIRE(t0.weights.size() == 1);
  CHECK(t0.weights[0].first == pair_encode_u64(0, 5));
  CHECK(t0.weights[0].second == Rat(1, 2));
  CHECK(t0.total_on_target == Rat(1, 2));

  // mass splits across the two touched rows; minimal columns picked
  NatSet a = NatSet::from_unsorted({static_cast<Nat>(pair_encode_u64(0, 5)),
                                    static_cast<Nat>(pair_encode_u64(0, 2)),
                                    static_cast<Nat>(pair_encode_u64(2, 9)),
                                    static_cast<Nat>(pair_encode_u64(2, 4))});
  TransferredMeasure t = hat_measure_transfer({{0, Rat(1, 2)}, {2, Rat(1, 2)}}, phi, a);
  REQUIRE(t.weights.size() == 2);
  CHECK(t.total_on_target == Rat(1));
  CHECK(t.weights[0].first == pair_encode_u64(0, 2));
  CHECK(t.weights[1].first == pair_encode_u64(2, 4));

  // empty target is the guarded case
  CHECK_THROWS_AS(hat_measure_transfer({{0, Rat(1, 2)}}, phi, NatSet()), Error);
  // domination precondition names the violation
  CHECK_THROWS_AS(hat_measure_transfer({{0, Rat(2)}}, phi, a0), Error);
}

TEST_CASE("transfer output attains the hat value on random instances") {
  std::uint64_t state = 21;
  for (int trial = 0; trial < 30; ++trial) {
    // random measure eta on rows, dominated by the sup of itself and noise
    std::vector<std::pair<Nat, Rat>> eta;
    for (Nat r = 0; r < 6; ++r)
      if (testutil::bounded(state, 2) == 0)
        eta.emplace_back(r, Rat(1 + testutil::bounded(state, 8), 16));
    if (eta.empty()) eta.emplace_back(0, Rat(1, 4));
    ExprPtr phi = SubmeasureExpr::measure_nat(std::vector<std::pair<Nat, Rat>>(eta), 16);

    std::vector<Nat> codes;
    for (const auto& [r, w] : eta)
      codes.push_back(static_cast<Nat>(
          pair_encode_u64(r, static_cast<Nat>(testutil::bounded(state, 8)))));
    NatSet a = NatSet::from_unsorted(std::move(codes));

    TransferredMeasure t = hat_measure_transfer(eta, phi, a);
    // psi(A) equals eta of the touched rows, which is all of them here
    Rat total = 0;
    for (const auto& [r, w] : eta) total += w;
    CHECK(t.total_on_target == total);
    ExprPtr hat_phi = SubmeasureExpr::hat(phi, a.max() + 1);
    CHECK(hat_phi->eval(a) == QValue::rational(total));
  }
}

TEST_CASE("serialized reports revalidate through the library") {
  ExprPtr expr = SubmeasureExpr::ceil_count(Rat(1), 2, NatSet::interval(0, 3), 8);
  AnySet full = NatSet::interval(0, 3);
  PathologyReport rep = envelope(expr, full, full, 1e-9);
  Json j = pathology_report_to_json(rep);
  CHECK(pathology_report_revalidate(j, 8));
  // a corrupted certified value fails the recheck
  Json bad = j;
  bad["envelope"]["certified"]["num"] = 2;
  CHECK_FALSE(pathology_report_revalidate(bad, 8));
  // an inflated witness weight breaks feasibility
  Json bad2 = j;
  bad2["witness"][0][1]["num"] = 5;
  CHECK_FALSE(pathology_report_revalidate(bad2, 8));
}

TEST_CASE("scan with no samples is empty") {
  auto m = parse_expr("(measure ((0 1)))", 8);
  PathologyScan scan = pathology_scan(m, NatSet::single(0), 0, 1e-9, 1);
  CHECK(scan.samples == 0);
  CHECK(scan.worst_gap.is_zero());
}

TEST_CASE("support cap is enforced") {
  auto m = parse_expr("(capped 1 1 (block 0 20))", 32);
  AnySet big = NatSet::interval(0, 20);
  CHECK_THROWS_AS(envelope(m, big, big, 1e-9), Error);
}
