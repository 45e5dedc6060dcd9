#ifndef IDEALKIT_SETS_HPP
#define IDEALKIT_SETS_HPP

#include <compare>
#include <cstdint>
#include <utility>
#include <vector>

#include "idealkit/error.hpp"
#include "idealkit/qvalue.hpp"

namespace idealkit {

using Nat = std::uint32_t;

/// Finite subset of omega: strictly increasing list of naturals.
class NatSet {
public:
  NatSet() = default;
  /// Takes a strictly increasing vector; throws otherwise.
  explicit NatSet(std::vector<Nat> sorted);
  static NatSet from_unsorted(std::vector<Nat> elems);
  /// Half-open [lo, hi).
  static NatSet interval(Nat lo, Nat hi);
  static NatSet single(Nat n) { return NatSet(std::vector<Nat>{n}); }

  std::size_t size() const { return elems_.size(); }
  bool empty() const { return elems_.empty(); }
  Nat operator[](std::size_t i) const { return elems_[i]; }
  Nat min() const;
  Nat max() const;
  bool contains(Nat n) const;
  bool is_interval() const;

  auto begin() const { return elems_.begin(); }
  auto end() const { return elems_.end(); }
  const std::vector<Nat>& elements() const { return elems_; }

  bool operator==(const NatSet& o) const { return elems_ == o.elems_; }

  bool subset_of(const NatSet& o) const;
  bool intersects(const NatSet& o) const;
  /// Size of the intersection with [lo, hi).
  std::size_t count_in_range(Nat lo, Nat hi) const;

  static NatSet set_union(const NatSet& a, const NatSet& b);
  static NatSet intersection(const NatSet& a, const NatSet& b);
  static NatSet difference(const NatSet& a, const NatSet& b);
  static std::size_t intersection_size(const NatSet& a, const NatSet& b);

  /// Drops the n smallest elements.
  NatSet drop_smallest(std::size_t n) const;

private:
  std::vector<Nat> elems_;
};

struct GridPoint {
  Nat row = 0;
  Nat col = 0;
  auto operator<=>(const GridPoint&) const = default;
};

/// Sign of h(a) - h(b) for the pairing code h(x,y) = 2^x (2y+1) - 1,
/// computed without materializing the codes.
int h_compare(const GridPoint& a, const GridPoint& b);

/// Finite subset of omega^2: lexicographically sorted, duplicate-free.
class GridSet {
public:
  GridSet() = default;
  explicit GridSet(std::vector<GridPoint> sorted);
  static GridSet from_unsorted(std::vector<GridPoint> pts);

  std::size_t size() const { return pts_.size(); }
  bool empty() const { return pts_.empty(); }
  const GridPoint& operator[](std::size_t i) const { return pts_[i]; }
  bool contains(const GridPoint& p) const;

  auto begin() const { return pts_.begin(); }
  auto end() const { return pts_.end(); }
  const std::vector<GridPoint>& points() const { return pts_; }

  bool operator==(const GridSet& o) const { return pts_ == o.pts_; }

  /// Section {k : (row, k) in *this}.
  NatSet row_section(Nat row) const;
  /// Rows with a nonempty section.
  NatSet rows() const;

  bool subset_of(const GridSet& o) const;
  bool intersects(const GridSet& o) const;

  static GridSet set_union(const GridSet& a, const GridSet& b);
  static GridSet intersection(const GridSet& a, const GridSet& b);
  static GridSet difference(const GridSet& a, const GridSet& b);
  static std::size_t intersection_size(const GridSet& a, const GridSet& b);

  /// Drops the n smallest elements in h-code order.
  GridSet drop_smallest_h(std::size_t n) const;

private:
  std::vector<GridPoint> pts_;
};

/// h(x, y) = 2^x (2y+1) - 1, a bijection omega^2 -> omega. Unbounded.
Int pair_encode(Nat x, Nat y);
/// Inverse of pair_encode.
GridPoint pair_decode(const Int& n);

/// 64-bit variants; encode throws Overflow when the code exceeds 2^64 - 1.
std::uint64_t pair_encode_u64(Nat x, Nat y);
GridPoint pair_decode_u64(std::uint64_t n);

enum class FamilyFlavor { Disj, Incr, Int };

/// Ordered list of pairwise disjoint nonempty finite sets. Flavor incr
/// additionally requires max F_n + 1 <= min F_{n+1}; flavor int requires
/// every member to be an interval (NatSet only).
template <class SetT>
class DisjointFamily {
public:
  DisjointFamily(std::vector<SetT> members, FamilyFlavor flavor);

  std::size_t size() const { return members_.size(); }
  const SetT& operator[](std::size_t i) const { return members_[i]; }
  const std::vector<SetT>& members() const { return members_; }
  FamilyFlavor flavor() const { return flavor_; }

  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

private:
  std::vector<SetT> members_;
  FamilyFlavor flavor_;
};

extern template class DisjointFamily<NatSet>;
extern template class DisjointFamily<GridSet>;

}  // namespace idealkit

#endif
