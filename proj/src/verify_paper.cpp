#include "idealkit/verify.hpp"

#include <algorithm>
#include <sstream>

#include "idealkit/constructions.hpp"
#include "idealkit/kernels.hpp"
#include "idealkit/pathology.hpp"
#include "idealkit/witness.hpp"

namespace idealkit {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t bounded(std::uint64_t& state, std::uint64_t n) {
  return splitmix64(state) % n;
}

// ----- blockwise counting counterexample -----

CheckLine check_nu_example(unsigned k) {
  CheckLine line;
  line.name = "nu-example k=" + std::to_string(k);
  Nat n = Nat(1) << k;
  Nat mmax = k + n;
  Nat window = static_cast<Nat>((std::uint64_t(1) << (mmax + 1)));
  NuExampleRow row = build_nu_example_row(n, mmax, window);

  std::vector<NatSet> members;
  for (Nat j = 0; j <= n; ++j) {
    const NatSet& block = row.blocks[k + j];
    std::vector<Nat> pts(block.begin(), block.begin() + (std::size_t(1) << j));
    members.push_back(NatSet(std::move(pts)));
  }

  Rat unit(1, Int(1) << k);
  QValue member_target = QValue::rational(unit);
  for (std::size_t j = 0; j < members.size(); ++j) {
    QValue v = row.nu->eval(members[j]);
    if (v != member_target) {
      line.detail = "member " + std::to_string(j) + " evaluated to " + v.to_string();
      return line;
    }
  }

  QValue delta = QValue::rational(Rat(3, Int(1) << (k + 1)));
  auto result = obstruction_check<NatSet>(row.nu, DisjointFamily<NatSet>(members,
                                                                         FamilyFlavor::Disj),
                                          QValue::rational(Rat(1)), delta, n + 1);
  auto* cert = std::get_if<ObstructionCertificate<NatSet>>(&result);
  if (!cert) {
    line.detail = "no obstruction certificate";
    return line;
  }
  QValue union_target = QValue::rational(Rat(Int(n) + 1, Int(1) << k));
  if (cert->min_union_value != union_target) {
    line.detail = "union value " + cert->min_union_value.to_string();
    return line;
  }
  if (!(cert->min_union_value > QValue::rational(Rat(1)))) {
    line.detail = "union value does not exceed 1";
    return line;
  }
  if (!revalidate(*cert)) {
    line.detail = "certificate failed revalidation";
    return line;
  }
  line.pass = true;
  line.detail = "members=" + member_target.to_string() +
                " union=" + union_target.to_string();
  return line;
}

// ----- capped counting example -----

std::vector<CheckLine> check_capped_example() {
  std::vector<CheckLine> lines;
  const Nat window = 1024;
  std::vector<NatSet> rows = h_row_partition(11, window);
  ExprPtr phi = build_capped_example(rows, window);

  for (Nat k = 1; k <= 5; ++k) {
    CheckLine line;
    line.name = "capped-example k=" + std::to_string(k);
    Rat ak = capped_example_weight(k);
    QValue target = QValue::rational(ak);
    bool ok = true;
    std::string why;

    for (Nat x : rows[k]) {
      QValue v = phi->eval(NatSet::single(x));
      if (v != target) {
        ok = false;
        why = "singleton {" + std::to_string(x) + "} = " + v.to_string();
        break;
      }
    }

    if (ok) {
      std::size_t m = std::min<std::size_t>(rows[k].size(), 2 * k);
      std::vector<std::size_t> subset(k + 1);
      for (std::size_t i = 0; i <= k; ++i) subset[i] = i;
      QValue union_target = QValue::rational(ak * (k + 1));
      while (ok) {
        std::vector<Nat> pts;
        for (std::size_t i : subset) pts.push_back(rows[k][i]);
        QValue v = phi->eval(NatSet::from_unsorted(pts));
        if (v != union_target) {
          ok = false;
          why = "a (k+1)-subset union = " + v.to_string();
        }
        std::size_t i = k + 1;
        while (i > 0 && subset[i - 1] == m - (k + 1) + i - 1) --i;
        if (i == 0) break;
        ++subset[i - 1];
        for (std::size_t j = i; j < k + 1; ++j) subset[j] = subset[j - 1] + 1;
      }
    }

    if (ok) {
      // every point below row k rejects delta = a_k
      for (Nat r = 0; r < k && ok; ++r) {
        for (Nat x : rows[r]) {
          QValue v = phi->eval(NatSet::single(x));
          if (!(v >= QValue::rational(capped_example_weight(k - 1))) ||
              !(v > target)) {
            ok = false;
            why = "small singleton {" + std::to_string(x) + "} = " + v.to_string();
            break;
          }
        }
      }
    }

    line.pass = ok;
    line.detail = ok ? "a_k=" + rational_to_string(ak) : why;
    lines.push_back(std::move(line));
  }

  CheckLine ratio;
  ratio.name = "capped-example weight decay k=1..8";
  ratio.pass = true;
  for (Nat k = 1; k <= 8; ++k) {
    if (!(capped_example_weight(k - 1) > capped_example_weight(k) * (k + 1))) {
      ratio.pass = false;
      ratio.detail = "fails at k=" + std::to_string(k);
      break;
    }
  }
  if (ratio.pass) ratio.detail = "a_{k-1} > (k+1) a_k";
  lines.push_back(std::move(ratio));
  return lines;
}

// ----- envelope batteries -----

CheckLine check_three_point_envelope(double tolerance) {
  CheckLine line;
  line.name = "pathology 3-point";
  ExprPtr expr = SubmeasureExpr::ceil_count(Rat(1), 2, NatSet::interval(0, 3), 16);
  AnySet full = NatSet::interval(0, 3);
  PathologyReport rep = envelope(expr, full, full, tolerance);
  bool certified_ok = rep.certified >= Rat(3, 2) - Rat(1, 1000000);
  bool lp_ok = std::abs(rep.lp_value - 1.5) <= 1e-9;
  bool gap_ok = rep.gap == QValue::rational(Rat(1, 2));
  line.pass = certified_ok && lp_ok && gap_ok;
  std::ostringstream os;
  os << "certified=" << rational_to_string(rep.certified) << " gap=" << rep.gap.to_string();
  line.detail = os.str();
  return line;
}

ExprPtr random_sup_of_measures(std::uint64_t& state, Nat n_points, Nat window,
                               std::size_t max_measures) {
  std::size_t n_meas = 1 + bounded(state, max_measures);
  std::vector<ExprPtr> measures;
  for (std::size_t i = 0; i < n_meas; ++i) {
    std::vector<std::pair<Nat, Rat>> weights;
    for (Nat p = 0; p < n_points; ++p)
      if (bounded(state, 2) == 0)
        weights.emplace_back(p, Rat(1 + bounded(state, 64), 64));
    if (weights.empty())
      weights.emplace_back(static_cast<Nat>(bounded(state, n_points)),
                           Rat(1 + bounded(state, 64), 64));
    measures.push_back(SubmeasureExpr::measure_nat(std::move(weights), window));
  }
  return SubmeasureExpr::sup(std::move(measures));
}

CheckLine check_sup_envelopes(std::uint64_t seed) {
  CheckLine line;
  line.name = "pathology sup-of-measures x200";
  Rat cap(1, 1000000000);
  std::uint64_t state = seed * 2654435761u + 1;
  QValue worst;
  for (int trial = 0; trial < 200; ++trial) {
    Nat n_points = 1 + static_cast<Nat>(bounded(state, 12));
    ExprPtr expr = random_sup_of_measures(state, n_points, 64, 5);
    NatSet support = NatSet::interval(0, n_points);
    std::uint64_t full = (std::uint64_t(1) << n_points) - 1;
    std::uint64_t mask = 1 + bounded(state, full);
    AnySet target = subset_of(support, mask);
    PathologyReport rep = envelope(expr, target, support, 1e-9);
    if (rep.gap > worst) worst = rep.gap;
    if (!(rep.gap <= QValue::rational(cap))) {
      line.detail = "trial " + std::to_string(trial) + " gap " + rep.gap.to_string();
      return line;
    }
  }
  line.pass = true;
  line.detail = "max gap " + worst.to_string();
  return line;
}

CheckLine check_hat_envelopes(std::uint64_t seed) {
  CheckLine line;
  line.name = "pathology hat-transfer x50";
  Rat cap(1, 1000000000);
  std::uint64_t state = seed * 0x9e3779b1u + 7;
  const Nat window = 4096;
  QValue worst;
  for (int trial = 0; trial < 50; ++trial) {
    ExprPtr phi = random_sup_of_measures(state, 10, 64, 4);
    ExprPtr hat_phi = SubmeasureExpr::hat(phi, window);
    for (int t = 0; t < 20; ++t) {
      std::size_t size = 1 + bounded(state, 10);
      std::vector<Nat> codes;
      for (std::size_t i = 0; i < size; ++i) {
        Nat r = static_cast<Nat>(bounded(state, 10));
        Nat max_col = static_cast<Nat>(((window >> r) + 1) / 2);
        if (max_col == 0) max_col = 1;
        Nat c = static_cast<Nat>(bounded(state, max_col));
        std::uint64_t code = pair_encode_u64(r, c);
        if (code < window) codes.push_back(static_cast<Nat>(code));
      }
      if (codes.empty()) codes.push_back(0);
      NatSet target = NatSet::from_unsorted(std::move(codes));
      PathologyReport rep = envelope(hat_phi, target, target, 1e-9);
      if (rep.gap > worst) worst = rep.gap;
      if (!(rep.gap <= QValue::rational(cap))) {
        line.detail = "trial " + std::to_string(trial) + " gap " + rep.gap.to_string();
        return line;
      }
    }
  }
  line.pass = true;
  line.detail = "max gap " + worst.to_string();
  return line;
}

// ----- support normalization battery -----

ExprPtr random_block_submeasure(std::uint64_t& state, const NatSet& support, Nat window) {
  switch (bounded(state, 4)) {
    case 0: {
      std::vector<std::pair<Nat, Rat>> w;
      for (Nat p : support) w.emplace_back(p, Rat(1 + bounded(state, 16), 16));
      return SubmeasureExpr::measure_nat(std::move(w), window);
    }
    case 1:
      return SubmeasureExpr::capped_count(Rat(1 + bounded(state, 8), 8),
                                          1 + bounded(state, support.size()), support,
                                          window);
    case 2: {
      std::vector<std::pair<Nat, Rat>> w;
      for (Nat p : support) w.emplace_back(p, Rat(1 + bounded(state, 8), 8));
      return SubmeasureExpr::scale(Rat(1 + bounded(state, 4), 4),
                                   SubmeasureExpr::measure_nat(std::move(w), window));
    }
    default: {
      if (support.size() < 2) {
        std::vector<std::pair<Nat, Rat>> w{{support[0], Rat(1)}};
        return SubmeasureExpr::measure_nat(std::move(w), window);
      }
      std::size_t half = support.size() / 2;
      std::vector<std::pair<Nat, Rat>> w1, w2;
      for (std::size_t i = 0; i < support.size(); ++i) {
        auto& dst = i < half ? w1 : w2;
        dst.emplace_back(support[i], Rat(1 + bounded(state, 8), 8));
      }
      return SubmeasureExpr::sup({SubmeasureExpr::measure_nat(std::move(w1), window),
                                  SubmeasureExpr::measure_nat(std::move(w2), window)});
    }
  }
}

CheckLine check_normalization(std::uint64_t seed) {
  CheckLine line;
  line.name = "support-normalization x500";
  std::uint64_t state = seed * 0x2545f4914f6cdd1dull + 13;
  for (int trial = 0; trial < 500; ++trial) {
    Nat window = 8 + static_cast<Nat>(bounded(state, 57));  // 8..64
    std::size_t m = 2 + bounded(state, std::min<std::uint64_t>(7, window / 2 - 1));
    // random partition of [0, window) into m nonempty parts
    std::vector<std::vector<Nat>> parts(m);
    for (Nat p = 0; p < window; ++p) parts[bounded(state, m)].push_back(p);
    for (std::size_t i = 0; i < m; ++i) {
      if (parts[i].empty()) {
        // steal a point from the largest part
        std::size_t big = 0;
        for (std::size_t j = 0; j < m; ++j)
          if (parts[j].size() > parts[big].size()) big = j;
        parts[i].push_back(parts[big].back());
        parts[big].pop_back();
      }
    }
    std::vector<ExprPtr> mus;
    for (std::size_t i = 0; i < m; ++i)
      mus.push_back(random_block_submeasure(state, NatSet::from_unsorted(parts[i]), window));

    NormalizedSupports norm = normalize_supports(mus);

    // interval cover of [0, window)
    Nat expected_lo = 0;
    for (const NatSet& v : norm.intervals.members()) {
      if (v.min() != expected_lo) {
        line.detail = "trial " + std::to_string(trial) + ": cover gap";
        return line;
      }
      expected_lo = v.max() + 1;
    }
    if (expected_lo != window) {
      line.detail = "trial " + std::to_string(trial) + ": cover stops early";
      return line;
    }

    // each support inside two consecutive intervals
    for (std::size_t k = 0; k < m; ++k) {
      std::size_t j = norm.cover_index[k];
      NatSet cover = norm.intervals[j];
      if (j + 1 < norm.intervals.size())
        cover = NatSet::set_union(cover, norm.intervals[j + 1]);
      if (!std::get<NatSet>(mus[k]->support()).subset_of(cover)) {
        line.detail = "trial " + std::to_string(trial) + ": support escapes cover";
        return line;
      }
    }

    // sampled identities
    for (int s = 0; s < 20; ++s) {
      std::vector<Nat> pts;
      for (Nat p = 0; p < window; ++p)
        if (bounded(state, 3) == 0) pts.push_back(p);
      NatSet a = NatSet::from_unsorted(std::move(pts));
      for (std::size_t vi = 0; vi < norm.intervals.size(); ++vi) {
        QValue lhs = norm.nus[vi]->eval(a);
        QValue rhs;
        NatSet cut = NatSet::intersection(a, norm.intervals[vi]);
        for (const ExprPtr& mu : mus) rhs = QValue::max(rhs, mu->eval(cut));
        if (lhs != rhs) {
          line.detail = "trial " + std::to_string(trial) + ": nu identity fails";
          return line;
        }
      }
      for (std::size_t k = 0; k < m; ++k) {
        std::size_t j = norm.cover_index[k];
        QValue bound = norm.nus[j]->eval(a);
        if (j + 1 < norm.nus.size()) bound += norm.nus[j + 1]->eval(a);
        if (!(mus[k]->eval(a) <= bound)) {
          line.detail = "trial " + std::to_string(trial) + ": pair bound fails";
          return line;
        }
      }
    }
  }
  line.pass = true;
  line.detail = "500 families, all postconditions exact";
  return line;
}

}  // namespace

std::vector<CheckLine> run_verification_suite(const VerifyOptions& options) {
  std::vector<CheckLine> checks;
  for (unsigned k = 1; k <= 4; ++k) checks.push_back(check_nu_example(k));
  for (CheckLine& line : check_capped_example()) checks.push_back(std::move(line));
  checks.push_back(check_three_point_envelope(options.tolerance));
  checks.push_back(check_sup_envelopes(options.seed));
  checks.push_back(check_hat_envelopes(options.seed));
  checks.push_back(check_normalization(options.seed));
  return checks;
}

bool all_pass(const std::vector<CheckLine>& checks) {
  for (const CheckLine& c : checks)
    if (!c.pass) return false;
  return true;
}

}  // namespace idealkit
