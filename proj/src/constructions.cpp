#include "idealkit/constructions.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace idealkit {

ExprPtr erdos_ulam(std::vector<Rat> f, Nat window) {
  return SubmeasureExpr::erdos_ulam(std::move(f), window);
}

ExprPtr simple_density(std::vector<Rat> g, Nat window) {
  return SubmeasureExpr::simple_density(std::move(g), window);
}

ExprPtr hat_of(ExprPtr phi, Nat window) {
  return SubmeasureExpr::hat(std::move(phi), window);
}

ExprPtr dl_build(const DLSpec& spec, Nat window) {
  if (spec.blocks.empty()) throw Error(ErrorKind::Invariant, "dl: no index blocks");
  if (spec.q.size() != spec.blocks.size())
    throw Error(ErrorKind::Invariant, "dl: one exponent per block required");
  DisjointFamily<NatSet> check(spec.blocks, FamilyFlavor::Disj);
  for (const auto& phi : spec.phis) {
    if (!phi || phi->sort() != SetSort::Nat)
      throw Error(ErrorKind::SortMismatch, "dl: row submeasures must be over NatSet");
    if (phi->window() != window)
      throw Error(ErrorKind::Invariant, "dl: row submeasure window mismatch");
  }
  std::vector<ExprPtr> per_block;
  per_block.reserve(spec.blocks.size());
  for (std::size_t n = 0; n < spec.blocks.size(); ++n) {
    Rat total = 0;
    std::vector<Rat> weights;
    std::vector<ExprPtr> lifted;
    for (Nat k : spec.blocks[n]) {
      if (k >= spec.a.size())
        throw Error(ErrorKind::Invariant,
                    "dl: no weight for row index " + std::to_string(k));
      if (k >= spec.phis.size())
        throw Error(ErrorKind::Invariant,
                    "dl: row index " + std::to_string(k) + " out of range");
      total += spec.a[k];
      weights.push_back(spec.a[k]);
      lifted.push_back(SubmeasureExpr::row_lift(spec.phis[k], k));
    }
    if (total != 1)
      throw Error(ErrorKind::Invariant, "dl: block " + std::to_string(n) +
                                            " weights sum " + rational_to_string(total) +
                                            " != 1");
    per_block.push_back(
        SubmeasureExpr::q_mix(spec.q[n], std::move(weights), std::move(lifted)));
  }
  return SubmeasureExpr::sup(std::move(per_block));
}

ExprPtr q_mix(Rat exponent, std::vector<std::pair<Rat, ExprPtr>> terms) {
  std::vector<Rat> weights;
  std::vector<ExprPtr> children;
  weights.reserve(terms.size());
  children.reserve(terms.size());
  for (auto& [a, e] : terms) {
    weights.push_back(std::move(a));
    children.push_back(std::move(e));
  }
  return SubmeasureExpr::q_mix(std::move(exponent), std::move(weights),
                               std::move(children));
}

NormalizedSupports normalize_supports(const std::vector<ExprPtr>& mus) {
  if (mus.empty()) throw Error(ErrorKind::Invariant, "normalize: empty family");
  std::vector<NatSet> supports;
  supports.reserve(mus.size());
  std::size_t total = 0;
  NatSet all;
  for (std::size_t i = 0; i < mus.size(); ++i) {
    if (!mus[i] || mus[i]->sort() != SetSort::Nat)
      throw Error(ErrorKind::SortMismatch, "normalize: submeasures must be over NatSet");
    const NatSet& s = std::get<NatSet>(mus[i]->support());
    if (s.empty())
      throw Error(ErrorKind::Invariant,
                  "normalize: submeasure " + std::to_string(i) + " has empty support");
    total += s.size();
    all = NatSet::set_union(all, s);
    supports.push_back(s);
  }
  if (all.size() != total)
    throw Error(ErrorKind::Invariant, "normalize: supports overlap");

  // interval recursion: T_0 = [0, max S_0];
  // T_{n+1} = (max covered, max(S_{n+1} and every S_k reaching into the cover)]
  std::size_t m = mus.size();
  std::vector<std::pair<Nat, Nat>> t_intervals(m);  // closed [lo, hi], empty if hi < lo
  Nat covered = supports[0].max();
  t_intervals[0] = {0, covered};
  for (std::size_t n = 1; n < m; ++n) {
    Nat right = supports[n].max();
    for (std::size_t k = 0; k < m; ++k)
      if (supports[k].min() <= covered) right = std::max(right, supports[k].max());
    if (right > covered) {
      t_intervals[n] = {covered + 1, right};
      covered = right;
    } else {
      t_intervals[n] = {1, 0};  // empty
    }
  }

  std::vector<NatSet> v_intervals;
  for (std::size_t n = 0; n < m; ++n) {
    if (t_intervals[n].second >= t_intervals[n].first) {
      v_intervals.push_back(
          NatSet::interval(t_intervals[n].first, t_intervals[n].second + 1));
    }
  }

  NormalizedSupports out{DisjointFamily<NatSet>(v_intervals, FamilyFlavor::Int), {}, {}};

  out.nus.reserve(v_intervals.size());
  for (const NatSet& v : v_intervals) {
    std::vector<ExprPtr> parts;
    for (std::size_t k = 0; k < m; ++k)
      if (supports[k].intersects(v))
        parts.push_back(SubmeasureExpr::restrict(mus[k], v));
    out.nus.push_back(SubmeasureExpr::sup(std::move(parts)));
  }

  out.cover_index.reserve(m);
  for (std::size_t n = 0; n < m; ++n) {
    std::size_t j = 0;
    while (j < v_intervals.size() && !supports[n].intersects(v_intervals[j])) ++j;
    if (j == v_intervals.size())
      throw Error(ErrorKind::Invariant, "normalize: support escaped the cover");
    out.cover_index.push_back(j);
  }
  return out;
}

std::vector<ExprPtr> pad_supports(std::vector<ExprPtr> mus, Nat window) {
  if (mus.empty()) throw Error(ErrorKind::Invariant, "pad: empty family");
  NatSet all;
  for (const auto& mu : mus)
    all = NatSet::set_union(all, std::get<NatSet>(mu->support()));
  NatSet missing = NatSet::difference(NatSet::interval(0, window), all);
  if (missing.empty()) return mus;
  std::vector<Rat> ones(missing.size(), Rat(1));
  ExprPtr filler = SubmeasureExpr::measure(missing, std::move(ones), mus[0]->window());
  mus[0] = SubmeasureExpr::sum({mus[0], filler});
  return mus;
}

std::vector<ExprPtr> blockize(const ExprPtr& nu, const std::vector<Nat>& cuts) {
  if (!nu) throw Error(ErrorKind::Usage, "blockize: null submeasure");
  if (cuts.empty()) throw Error(ErrorKind::Invariant, "blockize: empty cut list");
  for (std::size_t i = 1; i < cuts.size(); ++i)
    if (cuts[i] <= cuts[i - 1])
      throw Error(ErrorKind::Invariant, "blockize: cuts must be strictly increasing");
  std::vector<ExprPtr> out;
  out.reserve(cuts.size());
  for (std::size_t n = 0; n < cuts.size(); ++n) {
    Nat lo = n == 0 ? 0 : cuts[n - 1] + 1;
    out.push_back(SubmeasureExpr::restrict(nu, NatSet::interval(lo, cuts[n] + 1)));
  }
  return out;
}

RefineResult dstrong_refine(const ExprPtr& phi, const std::vector<RefineStep>& schedule) {
  if (!phi || phi->sort() != SetSort::Nat)
    throw Error(ErrorKind::SortMismatch, "refine: submeasure must be over NatSet");
  if (schedule.empty()) throw Error(ErrorKind::Invariant, "refine: empty schedule");
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const RefineStep& st = schedule[k];
    if (!(st.delta < st.epsilon) || st.delta <= 0)
      throw Error(ErrorKind::Invariant,
                  "refine: need 0 < delta_k < epsilon_k at level " + std::to_string(k));
    if (k > 0 && (!(st.epsilon < schedule[k - 1].epsilon) ||
                  !(st.delta < schedule[k - 1].delta)))
      throw Error(ErrorKind::Invariant,
                  "refine: epsilons and deltas must be strictly decreasing");
    if (st.cuts.empty())
      throw Error(ErrorKind::Invariant, "refine: empty cut list at level " +
                                            std::to_string(k));
    for (std::size_t i = 1; i < st.cuts.size(); ++i)
      if (st.cuts[i] <= st.cuts[i - 1])
        throw Error(ErrorKind::Invariant, "refine: cuts must be strictly increasing");
  }

  Nat window = phi->window();
  std::vector<Nat> merged;
  merged.push_back(schedule[0].cuts[0]);
  // s_{n+1} minimal with a cut of every schedule m <= n+1 inside [s_n, s_{n+1})
  while (merged.size() < schedule.size()) {
    Nat prev = merged.back();
    Nat need = 0;
    bool ok = true;
    std::size_t levels = std::min(merged.size() + 1, schedule.size());
    for (std::size_t mlevel = 0; mlevel < levels; ++mlevel) {
      const auto& cuts = schedule[mlevel].cuts;
      auto it = std::lower_bound(cuts.begin(), cuts.end(), prev);
      if (it == cuts.end()) {
        ok = false;
        break;
      }
      need = std::max(need, *it + 1);
    }
    if (!ok || need >= window) break;
    merged.push_back(need);
  }

  std::vector<Rat> deltas;
  std::vector<Nat> uppers;
  for (std::size_t k = 0; k < merged.size(); ++k) {
    deltas.push_back(schedule[k].delta);
    uppers.push_back(merged[k] + 1);
  }
  ExprPtr psi = SubmeasureExpr::step_interval(std::move(deltas), std::move(uppers), window);
  ExprPtr nu = SubmeasureExpr::sup({phi, psi});
  return RefineResult{std::move(nu), std::move(psi), std::move(merged)};
}

NuExampleRow build_nu_example_row(Nat n, Nat mmax, Nat window) {
  NuExampleRow row;
  std::uint64_t offset = 0;
  for (Nat m = 0; m <= mmax; ++m) {
    std::uint64_t size = 1ull << m;
    if (offset + size > window)
      throw Error(ErrorKind::Resource, "nu-example: window overflow at block size 2^" +
                                           std::to_string(m));
    NatSet block = NatSet::interval(static_cast<Nat>(offset),
                                    static_cast<Nat>(offset + size));
    row.etas.push_back(
        SubmeasureExpr::capped_count(Rat(1, Int(size)), size, block, window));
    row.blocks.push_back(std::move(block));
    offset += size;
  }
  row.mu = SubmeasureExpr::sup(row.etas);
  row.nu = SubmeasureExpr::top_k_sum(static_cast<std::size_t>(n) + 1, row.etas);
  return row;
}

NuExample build_nu_example(Nat kmax, Nat mmax, Nat window) {
  NuExample out;
  std::uint64_t row_span = (1ull << (mmax + 1)) - 1;
  for (Nat n = 0; n <= kmax; ++n) {
    std::uint64_t offset = static_cast<std::uint64_t>(n) * row_span;
    NuExampleRow row;
    for (Nat m = 0; m <= mmax; ++m) {
      std::uint64_t size = 1ull << m;
      if (offset + size > window)
        throw Error(ErrorKind::Resource, "nu-example: window overflow");
      NatSet block = NatSet::interval(static_cast<Nat>(offset),
                                      static_cast<Nat>(offset + size));
      row.etas.push_back(
          SubmeasureExpr::capped_count(Rat(1, Int(size)), size, block, window));
      row.blocks.push_back(std::move(block));
      offset += size;
    }
    row.mu = SubmeasureExpr::sup(row.etas);
    row.nu = SubmeasureExpr::top_k_sum(static_cast<std::size_t>(n) + 1, row.etas);
    out.rows.push_back(std::move(row));
  }
  return out;
}

std::vector<NatSet> h_row_partition(Nat nmax, Nat window) {
  std::vector<NatSet> rows;
  for (Nat n = 0; n < nmax; ++n) {
    std::vector<Nat> pts;
    for (std::uint64_t y = 0;; ++y) {
      if (n >= 63) break;
      std::uint64_t code = ((2 * y + 1) << n) - 1;
      if (code >= window) break;
      pts.push_back(static_cast<Nat>(code));
    }
    rows.push_back(NatSet(std::move(pts)));
  }
  return rows;
}

Rat capped_example_weight(Nat k) {
  Int fact = 1;
  for (Nat i = 2; i <= k + 2; ++i) fact *= i;
  return Rat(1, fact);
}

ExprPtr build_capped_example(const std::vector<NatSet>& rows, Nat window) {
  std::size_t total = 0;
  NatSet all;
  for (const NatSet& r : rows) {
    total += r.size();
    all = NatSet::set_union(all, r);
  }
  if (all.size() != total)
    throw Error(ErrorKind::Invariant, "capped example: rows overlap");
  std::vector<ExprPtr> parts;
  for (std::size_t n = 0; n < rows.size(); ++n) {
    if (rows[n].empty()) continue;
    parts.push_back(SubmeasureExpr::capped_count(
        capped_example_weight(static_cast<Nat>(n)), n + 1, rows[n], window));
  }
  if (parts.empty()) throw Error(ErrorKind::Invariant, "capped example: all rows empty");
  return SubmeasureExpr::sup(std::move(parts));
}

namespace {

char branch_char(const std::string& seed, std::size_t i) {
  return seed[i % seed.size()];
}

Nat branch_prefix_code(const std::string& seed, Nat length, Nat window) {
  // length-then-lex: 2^len - 2 + binary value of the prefix, MSB first
  std::uint64_t value = 0;
  for (Nat i = 0; i < length; ++i)
    value = 2 * value + (branch_char(seed, i) == '1' ? 1 : 0);
  std::uint64_t code = ((1ull << length) - 2) + value;
  if (code >= window)
    throw Error(ErrorKind::Resource, "ad-family: prefix code exceeds window");
  return static_cast<Nat>(code);
}

}  // namespace

std::size_t common_prefix_length(const std::string& a, const std::string& b, Nat depth) {
  for (Nat i = 0; i < depth; ++i)
    if (branch_char(a, i) != branch_char(b, i)) return i;
  return depth;
}

ADFamily ad_family(std::vector<std::string> seeds, Nat depth, Nat window) {
  if (depth == 0) throw Error(ErrorKind::Invariant, "ad-family: depth must be >= 1");
  if (depth >= 31) throw Error(ErrorKind::Resource, "ad-family: depth too large");
  for (const std::string& s : seeds) {
    if (s.empty()) throw Error(ErrorKind::Invariant, "ad-family: empty seed");
    if (s.find_first_not_of("01") != std::string::npos)
      throw Error(ErrorKind::Invariant, "ad-family: seed must be a binary string");
  }
  for (std::size_t i = 0; i < seeds.size(); ++i)
    for (std::size_t j = i + 1; j < seeds.size(); ++j)
      if (seeds[i] == seeds[j])
        throw Error(ErrorKind::Invariant, "ad-family: duplicate seed '" + seeds[i] + "'");
  ADFamily fam;
  fam.depth = depth;
  for (const std::string& s : seeds) {
    std::vector<Nat> pts;
    for (Nat n = 1; n <= depth; ++n) pts.push_back(branch_prefix_code(s, n, window));
    fam.sets.push_back(NatSet::from_unsorted(std::move(pts)));
  }
  fam.seeds = std::move(seeds);
  return fam;
}

GridSet grid_lift(const NatSet& b, Nat rows) {
  std::vector<GridPoint> pts;
  for (Nat n = 0; n < rows; ++n)
    for (Nat x : b)
      if (x >= n) pts.push_back(GridPoint{n, x});
  return GridSet::from_unsorted(std::move(pts));
}

const GridSet& MzPartition::cell(Nat row, Nat col) const {
  std::uint64_t code = pair_encode_u64(row, col);
  if (code >= blocks.size())
    throw Error(ErrorKind::Resource, "mz-partition: cell beyond partition depth");
  return blocks[code];
}

MzPartition mz_partition(Nat depth, Nat window) {
  MzPartition part;
  std::uint64_t running = 0;
  std::map<Nat, std::uint64_t> next_col;
  for (Nat n = 0; n < depth; ++n) {
    std::uint64_t size = n == 0 ? 1 : (n + 1) * running;
    GridPoint z = pair_decode_u64(n);
    std::uint64_t col0 = next_col[z.row];
    if (col0 + size > window)
      throw Error(ErrorKind::Resource,
                  "mz-partition: window overflow at code " + std::to_string(n));
    std::vector<GridPoint> pts;
    pts.reserve(size);
    for (std::uint64_t c = col0; c < col0 + size; ++c)
      pts.push_back(GridPoint{z.row, static_cast<Nat>(c)});
    next_col[z.row] = col0 + size;
    part.blocks.push_back(GridSet(std::move(pts)));
    part.sizes.push_back(size);
    running += size;
  }
  return part;
}

ExprPtr build_psi_a(const GridSet& a, const MzPartition& part,
                    const std::vector<NatSet>& index_blocks, Nat window) {
  if (index_blocks.empty())
    throw Error(ErrorKind::Invariant, "psi-a: no index blocks");
  Nat max_row = 0;
  for (const NatSet& s : index_blocks) max_row = std::max(max_row, s.max());
  std::vector<ExprPtr> phis(static_cast<std::size_t>(max_row) + 1);
  std::vector<Rat> weights(static_cast<std::size_t>(max_row) + 1, Rat(0));
  for (Nat k = 0; k <= max_row; ++k) {
    NatSet section = a.row_section(k);
    std::vector<ExprPtr> cell_measures;
    for (Nat t : section) {
      const GridSet& cell = part.cell(k, t);
      std::vector<Nat> cols;
      cols.reserve(cell.size());
      for (const auto& p : cell) cols.push_back(p.col);
      NatSet pts = NatSet::from_unsorted(std::move(cols));
      std::vector<Rat> uniform(pts.size(), Rat(1, Int(cell.size())));
      cell_measures.push_back(SubmeasureExpr::measure(std::move(pts), std::move(uniform),
                                                      window));
    }
    if (cell_measures.empty()) {
      phis[k] = SubmeasureExpr::measure(NatSet(), {}, window);
    } else {
      phis[k] = SubmeasureExpr::sup(std::move(cell_measures));
    }
  }
  DLSpec spec;
  spec.phis = std::move(phis);
  spec.blocks = index_blocks;
  for (const NatSet& s : index_blocks) {
    spec.q.push_back(Rat(1));
    for (Nat k : s) weights[k] = Rat(1, Int(s.size()));
  }
  spec.a = std::move(weights);
  return dl_build(spec, window);
}

TransversalResult transversal(const std::vector<GridSet>& constraints, Nat rows,
                              Nat window) {
  TransversalResult res;
  std::vector<bool> touched(constraints.size(), false);
  for (Nat n = 0; n < rows; ++n) {
    bool found = false;
    for (Nat c = 0; c < window && !found; ++c) {
      GridPoint cand{n, c};
      if (!res.picks.empty() && h_compare(cand, res.picks.back()) <= 0) continue;
      bool ok = true;
      for (std::size_t k = 0; k < constraints.size(); ++k) {
        if (touched[k] && constraints[k].contains(cand)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      for (std::size_t k = 0; k < constraints.size(); ++k)
        if (constraints[k].contains(cand)) touched[k] = true;
      res.picks.push_back(cand);
      found = true;
    }
    if (!found) return res;  // window exhausted; partial transversal
  }
  res.complete = true;
  return res;
}

std::pair<ExprPtr, ExprPtr> dirac_examples(Nat window) {
  std::vector<ExprPtr> all, evens;
  for (Nat n = 0; n < window; ++n) {
    ExprPtr dirac = SubmeasureExpr::measure(NatSet::single(n), {Rat(1)}, window);
    all.push_back(dirac);
    if (n % 2 == 0) evens.push_back(dirac);
  }
  return {SubmeasureExpr::sup(std::move(all)), SubmeasureExpr::sup(std::move(evens))};
}

std::vector<Nat> default_interval_cuts(Nat window, Nat max_blocks) {
  std::vector<Nat> iota{0};
  Nat step = 1;
  while (iota.size() <= max_blocks && iota.back() + step <= window) {
    iota.push_back(iota.back() + step);
    ++step;
  }
  return iota;
}

ExprPtr interval_dl_example(const std::vector<Nat>& iota, Nat window) {
  if (iota.size() < 2 || iota[0] != 0)
    throw Error(ErrorKind::Invariant, "interval-dl: need cuts 0 = iota_0 < iota_1 < ...");
  for (std::size_t i = 1; i < iota.size(); ++i)
    if (iota[i] <= iota[i - 1])
      throw Error(ErrorKind::Invariant, "interval-dl: cuts must be strictly increasing");
  std::vector<ExprPtr> ratio_parts;
  std::vector<NatSet> intervals;
  for (std::size_t m = 0; m + 1 < iota.size(); ++m) {
    NatSet block = NatSet::interval(iota[m], iota[m + 1]);
    ratio_parts.push_back(SubmeasureExpr::capped_count(Rat(1, Int(block.size())),
                                                       block.size(), block, window));
    intervals.push_back(std::move(block));
  }
  ExprPtr inner = SubmeasureExpr::sup(std::move(ratio_parts));

  DLSpec spec;
  Nat max_row = iota.back() - 1;
  spec.phis.assign(static_cast<std::size_t>(max_row) + 1, inner);
  spec.a.assign(static_cast<std::size_t>(max_row) + 1, Rat(0));
  for (const NatSet& block : intervals) {
    spec.blocks.push_back(block);
    spec.q.push_back(Rat(1));
    for (Nat k : block) spec.a[k] = Rat(1, Int(block.size()));
  }
  return dl_build(spec, window);
}

}  // namespace idealkit
