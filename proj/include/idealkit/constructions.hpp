#ifndef IDEALKIT_CONSTRUCTIONS_HPP
#define IDEALKIT_CONSTRUCTIONS_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "idealkit/expr.hpp"

namespace idealkit {

/// Weighted prefix-ratio submeasure: eval(A) = max over n < |f| of
/// (sum of f(i) for i <= n, i in A) / (sum of f(i) for i <= n).
ExprPtr erdos_ulam(std::vector<Rat> f, Nat window = SubmeasureExpr::kDefaultWindow);

/// eval(A) = max over 1 <= n <= |g| of |A n [0,n)| / g(n).
ExprPtr simple_density(std::vector<Rat> g, Nat window = SubmeasureExpr::kDefaultWindow);

/// eval(hat(phi), A) = eval(phi, {m : some (m,k) decodes from A}).
ExprPtr hat_of(ExprPtr phi, Nat window);

/// Parameters of a DL submeasure sup_n (sum_{k in S_n} a_k phi_k^{q_n}(A_(k)))^(1/q_n).
struct DLSpec {
  std::vector<ExprPtr> phis;       // over NatSet
  std::vector<Rat> q;              // one exponent per block, each >= 1
  std::vector<Rat> a;              // one weight per row index
  std::vector<NatSet> blocks;      // pairwise disjoint row-index blocks S_n
};

/// Builds Sup over n of QMix(q_n, [(a_k, RowLift(phi_k, k)) : k in S_n]).
ExprPtr dl_build(const DLSpec& spec, Nat window);

ExprPtr q_mix(Rat exponent, std::vector<std::pair<Rat, ExprPtr>> terms);

struct NormalizedSupports {
  DisjointFamily<NatSet> intervals;      // the nonempty V_n, consecutive intervals
  std::vector<ExprPtr> nus;              // nu_n = Sup_k Restrict(mu_k, V_n)
  std::vector<std::size_t> cover_index;  // j(n): S_n is inside V_j(n) u V_j(n)+1
};

/// Interval renormalization of a disjoint-support family. Supports must be
/// nonempty and pairwise disjoint; interior gaps are absorbed into the
/// output intervals, which cover [0, max support point].
NormalizedSupports normalize_supports(const std::vector<ExprPtr>& mus);

/// Extends mu_0 by a unit counting measure on the window points missing from
/// every support, making the supports cover [0, window) exactly.
std::vector<ExprPtr> pad_supports(std::vector<ExprPtr> mus, Nat window);

/// mu_n = Restrict(nu, S_n) for S_0 = [0, s_0], S_{n+1} = (s_n, s_{n+1}].
std::vector<ExprPtr> blockize(const ExprPtr& nu, const std::vector<Nat>& cuts);

struct RefineStep {
  Rat epsilon;
  Rat delta;
  std::vector<Nat> cuts;  // the step's own cut sequence s^k, strictly increasing
};

struct RefineResult {
  ExprPtr nu;   // max(phi, psi)
  ExprPtr psi;  // the step submeasure over the merged cuts
  std::vector<Nat> cuts;  // merged cut sequence
};

/// Builds the merged cut sequence of the refinement recursion: s_0 = s^0_0 and
/// each s_{n+1} is minimal so that every schedule m <= n+1 has a cut in
/// [s_n, s_{n+1}). psi takes value delta_k on the minimal touched block.
RefineResult dstrong_refine(const ExprPtr& phi, const std::vector<RefineStep>& schedule);

struct NuExampleRow {
  std::vector<ExprPtr> etas;    // eta_{n,m} for m = 0..mmax
  std::vector<NatSet> blocks;   // I_{n,m}, |I_{n,m}| = 2^m, consecutive
  ExprPtr mu;                   // sup_m eta_{n,m}
  ExprPtr nu;                   // TopKSum(n+1, etas)
};

struct NuExample {
  std::vector<NuExampleRow> rows;  // index n = 0..kmax
};

/// Blocks I_{n,m} of size 2^m packed row-major from offset 0; the usual
/// mu_n / nu_n pair on each row.
NuExample build_nu_example(Nat kmax, Nat mmax, Nat window);
/// One row only; blocks start at window offset 0.
NuExampleRow build_nu_example_row(Nat n, Nat mmax, Nat window);

/// Rows of the pairing bijection restricted to the window:
/// row n = {h(n,y) : h(n,y) < window}; rows beyond the decodable range
/// come back empty.
std::vector<NatSet> h_row_partition(Nat nmax, Nat window);

/// Sup_n CappedCount(1/(n+2)!, n+1, X_n) over the given disjoint rows.
ExprPtr build_capped_example(const std::vector<NatSet>& rows, Nat window);

/// 1/(k+2)!
Rat capped_example_weight(Nat k);

struct ADFamily {
  std::vector<std::string> seeds;
  Nat depth = 0;
  std::vector<NatSet> sets;  // per seed: {enc(b|n) : 1 <= n <= depth}
};

/// Branch sets under the length-then-lex prefix coding
/// enc(s) = 2^|s| - 2 + (s read as a binary numeral). Seeds repeat
/// periodically to form the branch.
ADFamily ad_family(std::vector<std::string> seeds, Nat depth, Nat window);

/// Length of the longest common prefix of the periodic extensions, capped.
std::size_t common_prefix_length(const std::string& a, const std::string& b, Nat depth);

/// union over n < rows of {n} x (B minus [0, n)).
GridSet grid_lift(const NatSet& b, Nat rows);

struct MzPartition {
  std::vector<GridSet> blocks;        // indexed by code n; block M_{decode(n)}
  std::vector<std::uint64_t> sizes;   // m_{decode(n)}
  const GridSet& cell(Nat row, Nat col) const;
};

/// Greedy-minimal partition sizes: m_{h^-1(0)} = 1 and
/// m_{h^-1(n+1)} = (n+2) * sum of all earlier sizes; block of code n sits in
/// row decode(n), columns packed left to right.
MzPartition mz_partition(Nat depth, Nat window);

/// psi_A = Sup_n QMix(1, uniform 1/|S_n| over phi_{A,k}) where
/// phi_{A,k} = Sup over t in A_(k) of the uniform measure on M_{(k,t)}.
ExprPtr build_psi_a(const GridSet& a, const MzPartition& part,
                    const std::vector<NatSet>& index_blocks, Nat window);

struct TransversalResult {
  std::vector<GridPoint> picks;  // x_n, one per completed row
  bool complete = false;
};

/// Greedy transversal: x_n is the minimal point of row n past x_{n-1} in
/// h-order whose addition keeps every constraint set meeting X at most once.
TransversalResult transversal(const std::vector<GridSet>& constraints, Nat rows,
                              Nat window);

/// (sup of Diracs at every window point, sup of Diracs at even points).
std::pair<ExprPtr, ExprPtr> dirac_examples(Nat window);

/// Interval-DL example: cut sequence iota with iota_0 = 0; rows grouped by the
/// same intervals; inner submeasure S -> sup_m |S n I_m| / |I_m|.
ExprPtr interval_dl_example(const std::vector<Nat>& iota, Nat window);
/// Default iota with increments 1, 2, 3, ... while the window allows.
std::vector<Nat> default_interval_cuts(Nat window, Nat max_blocks);

}  // namespace idealkit

#endif
