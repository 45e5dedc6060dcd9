#ifndef IDEALKIT_TEST_UTIL_HPP
#define IDEALKIT_TEST_UTIL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "idealkit/expr.hpp"

namespace testutil {

using namespace idealkit;

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t bounded(std::uint64_t& state, std::uint64_t n) {
  return splitmix64(state) % n;
}

inline NatSet random_natset(std::uint64_t& state, Nat window, int density_one_in = 3) {
  std::vector<Nat> pts;
  for (Nat p = 0; p < window; ++p)
    if (bounded(state, static_cast<std::uint64_t>(density_one_in)) == 0) pts.push_back(p);
  return NatSet(std::move(pts));
}

inline GridSet random_gridset(std::uint64_t& state, Nat window, std::size_t count) {
  std::vector<GridPoint> pts;
  for (std::size_t i = 0; i < count; ++i)
    pts.push_back(GridPoint{static_cast<Nat>(bounded(state, window)),
                            static_cast<Nat>(bounded(state, window))});
  return GridSet::from_unsorted(std::move(pts));
}

/// Random expression trees for the fuzz battery. `rational_only` restricts
/// the subtree to rational-valued nodes (no q=2 mixes), as required under
/// additive combinators.
class ExprGen {
public:
  ExprGen(std::uint64_t seed, Nat window) : state_(seed), window_(window) {}

  ExprPtr gen(int depth, SetSort sort, bool rational_only) {
    if (depth <= 0) return leaf(sort);
    switch (bounded(state_, 8)) {
      case 0: {
        return SubmeasureExpr::scale(Rat(1 + bounded(state_, 8), 4),
                                     gen(depth - 1, sort, rational_only));
      }
      case 1: {
        std::vector<ExprPtr> cs;
        std::size_t n = 2 + bounded(state_, 2);
        for (std::size_t i = 0; i < n; ++i) cs.push_back(gen(depth - 1, sort, true));
        return SubmeasureExpr::sum(std::move(cs));
      }
      case 2: {
        std::vector<ExprPtr> cs;
        std::size_t n = 2 + bounded(state_, 2);
        for (std::size_t i = 0; i < n; ++i)
          cs.push_back(gen(depth - 1, sort, rational_only));
        return SubmeasureExpr::sup(std::move(cs));
      }
      case 3: {
        // disjoint supports via restriction to consecutive blocks
        std::size_t n = 2 + bounded(state_, 2);
        Nat span = window_ / static_cast<Nat>(n);
        if (span == 0) return leaf(sort);
        std::vector<ExprPtr> cs;
        for (std::size_t i = 0; i < n; ++i) {
          AnySet mask = block_mask(sort, static_cast<Nat>(i) * span, span);
          cs.push_back(SubmeasureExpr::restrict(gen(depth - 1, sort, true), mask));
        }
        return SubmeasureExpr::top_k_sum(1 + bounded(state_, n + 1), std::move(cs));
      }
      case 4: {
        std::size_t n = 1 + bounded(state_, 3);
        bool square = !rational_only && bounded(state_, 2) == 0;
        std::vector<Rat> weights(n, Rat(1, Int(n)));
        std::vector<ExprPtr> cs;
        for (std::size_t i = 0; i < n; ++i)
          cs.push_back(gen(depth - 1, sort, !square));
        return SubmeasureExpr::q_mix(square ? Rat(2) : Rat(1), std::move(weights),
                                     std::move(cs));
      }
      case 5: {
        AnySet mask = sort == SetSort::Nat
                          ? AnySet(random_natset(state_, window_, 2))
                          : AnySet(random_gridset(state_, window_, window_));
        return SubmeasureExpr::restrict(gen(depth - 1, sort, rational_only), mask);
      }
      case 6: {
        if (sort == SetSort::Grid)
          return SubmeasureExpr::row_lift(gen(depth - 1, SetSort::Nat, rational_only),
                                          static_cast<Nat>(bounded(state_, window_)));
        return SubmeasureExpr::hat(gen(depth - 1, SetSort::Nat, rational_only), window_);
      }
      default:
        return leaf(sort);
    }
  }

  NatSet nat_set() { return random_natset(state_, window_); }
  GridSet grid_set() { return random_gridset(state_, window_, 1 + bounded(state_, 24)); }

  std::uint64_t& state() { return state_; }

private:
  AnySet block_mask(SetSort sort, Nat lo, Nat span) {
    if (sort == SetSort::Nat) return NatSet::interval(lo, lo + span);
    std::vector<GridPoint> pts;
    for (Nat r = lo; r < lo + span; ++r)
      for (Nat c = 0; c < window_; ++c) pts.push_back(GridPoint{r, c});
    return GridSet(std::move(pts));
  }

  ExprPtr leaf(SetSort sort) {
    if (sort == SetSort::Grid) {
      switch (bounded(state_, 2)) {
        case 0: {
          GridSet pts = random_gridset(state_, window_, 1 + bounded(state_, 12));
          if (pts.empty()) pts = GridSet({GridPoint{0, 0}});
          std::vector<Rat> w;
          for (std::size_t i = 0; i < pts.size(); ++i)
            w.emplace_back(1 + bounded(state_, 16), 8);
          return SubmeasureExpr::measure(pts, std::move(w), window_);
        }
        default:
          return SubmeasureExpr::capped_count(
              Rat(1 + bounded(state_, 8), 8), 1 + bounded(state_, 6),
              random_gridset(state_, window_, 1 + bounded(state_, 16)), window_);
      }
    }
    switch (bounded(state_, 6)) {
      case 0: {
        NatSet pts = random_natset(state_, window_);
        if (pts.empty()) pts = NatSet::single(0);
        std::vector<Rat> w;
        for (std::size_t i = 0; i < pts.size(); ++i)
          w.emplace_back(1 + bounded(state_, 16), 8);
        return SubmeasureExpr::measure(pts, std::move(w), window_);
      }
      case 1:
        return SubmeasureExpr::capped_count(Rat(1 + bounded(state_, 8), 8),
                                            1 + bounded(state_, 6),
                                            random_natset(state_, window_), window_);
      case 2:
        return SubmeasureExpr::ceil_count(Rat(1 + bounded(state_, 8), 8),
                                          1 + bounded(state_, 4),
                                          random_natset(state_, window_), window_);
      case 3: {
        std::size_t blocks = 1 + bounded(state_, 4);
        std::vector<Rat> deltas;
        std::vector<Nat> uppers;
        Nat upper = 0;
        for (std::size_t k = 0; k < blocks; ++k) {
          upper += 1 + static_cast<Nat>(bounded(state_, window_ / 4 + 1));
          if (upper > window_) break;
          deltas.emplace_back(1, Int(1) << (k + 1 + bounded(state_, 2)));
          uppers.push_back(upper);
        }
        if (uppers.empty()) {
          deltas.assign(1, Rat(1, 2));
          uppers.assign(1, 1);
        }
        // enforce strict decrease
        for (std::size_t k = 1; k < deltas.size(); ++k)
          if (!(deltas[k] < deltas[k - 1])) deltas[k] = deltas[k - 1] / 2;
        return SubmeasureExpr::step_interval(std::move(deltas), std::move(uppers), window_);
      }
      case 4: {
        std::size_t len = 2 + bounded(state_, window_ - 1);
        std::vector<Rat> f;
        for (std::size_t i = 0; i < len; ++i) f.emplace_back(1 + bounded(state_, 8), 4);
        return SubmeasureExpr::erdos_ulam(std::move(f), window_);
      }
      default: {
        std::size_t len = 2 + bounded(state_, window_ - 1);
        std::vector<Rat> g;
        Rat run(1 + bounded(state_, 4), 2);
        for (std::size_t i = 0; i < len; ++i) {
          g.push_back(run);
          run += Rat(bounded(state_, 3), 2);
        }
        return SubmeasureExpr::simple_density(std::move(g), window_);
      }
    }
  }

  std::uint64_t state_;
  Nat window_;
};

}  // namespace testutil

#endif
