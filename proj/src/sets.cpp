#include "idealkit/sets.hpp"

#include <algorithm>
#include <bit>

namespace idealkit {

namespace {

template <class T>
bool strictly_increasing(const std::vector<T>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i - 1] < v[i])) return false;
  return true;
}

// generic sorted-vector set algebra
template <class T>
std::vector<T> merged_union(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<T> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

template <class T>
std::vector<T> merged_intersection(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<T> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

template <class T>
std::vector<T> merged_difference(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<T> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// counts common elements; binary-searches the big side when sizes are skewed
template <class T>
std::size_t count_common(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.size() > b.size()) return count_common(b, a);
  if (a.empty() || b.empty()) return 0;
  std::size_t n = 0;
  if (b.size() / (a.size() + 1) >= 8) {
    for (const T& x : a)
      if (std::binary_search(b.begin(), b.end(), x)) ++n;
    return n;
  }
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++n;
      ++ia;
      ++ib;
    }
  }
  return n;
}

template <class T>
bool any_common(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.size() > b.size()) return any_common(b, a);
  if (a.empty()) return false;
  auto ia = a.begin();
  auto ib = b.begin();
  if (b.size() / (a.size() + 1) >= 8) {
    for (const T& x : a)
      if (std::binary_search(b.begin(), b.end(), x)) return true;
    return false;
  }
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      return true;
    }
  }
  return false;
}

template <class T>
bool is_subset(const std::vector<T>& a, const std::vector<T>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

NatSet::NatSet(std::vector<Nat> sorted) : elems_(std::move(sorted)) {
  if (!strictly_increasing(elems_))
    throw Error(ErrorKind::Invariant, "NatSet must be strictly increasing");
}

NatSet NatSet::from_unsorted(std::vector<Nat> elems) {
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  NatSet s;
  s.elems_ = std::move(elems);
  return s;
}

NatSet NatSet::interval(Nat lo, Nat hi) {
  NatSet s;
  if (lo < hi) {
    s.elems_.reserve(hi - lo);
    for (Nat i = lo; i < hi; ++i) s.elems_.push_back(i);
  }
  return s;
}

Nat NatSet::min() const {
  if (empty()) throw Error(ErrorKind::Usage, "min of empty set");
  return elems_.front();
}

Nat NatSet::max() const {
  if (empty()) throw Error(ErrorKind::Usage, "max of empty set");
  return elems_.back();
}

bool NatSet::contains(Nat n) const {
  return std::binary_search(elems_.begin(), elems_.end(), n);
}

bool NatSet::is_interval() const {
  if (empty()) return false;
  return static_cast<std::size_t>(elems_.back() - elems_.front()) + 1 == elems_.size();
}

bool NatSet::subset_of(const NatSet& o) const { return is_subset(elems_, o.elems_); }

bool NatSet::intersects(const NatSet& o) const { return any_common(elems_, o.elems_); }

std::size_t NatSet::count_in_range(Nat lo, Nat hi) const {
  if (lo >= hi) return 0;
  auto b = std::lower_bound(elems_.begin(), elems_.end(), lo);
  auto e = std::lower_bound(elems_.begin(), elems_.end(), hi);
  return static_cast<std::size_t>(e - b);
}

NatSet NatSet::set_union(const NatSet& a, const NatSet& b) {
  NatSet s;
  s.elems_ = merged_union(a.elems_, b.elems_);
  return s;
}

NatSet NatSet::intersection(const NatSet& a, const NatSet& b) {
  NatSet s;
  s.elems_ = merged_intersection(a.elems_, b.elems_);
  return s;
}

NatSet NatSet::difference(const NatSet& a, const NatSet& b) {
  NatSet s;
  s.elems_ = merged_difference(a.elems_, b.elems_);
  return s;
}

std::size_t NatSet::intersection_size(const NatSet& a, const NatSet& b) {
  // fast path when one side is an interval
  if (b.is_interval()) return a.count_in_range(b.min(), b.max() + 1);
  if (a.is_interval()) return b.count_in_range(a.min(), a.max() + 1);
  return count_common(a.elems_, b.elems_);
}

NatSet NatSet::drop_smallest(std::size_t n) const {
  if (n >= size()) return NatSet();
  NatSet s;
  s.elems_.assign(elems_.begin() + static_cast<std::ptrdiff_t>(n), elems_.end());
  return s;
}

int h_compare(const GridPoint& a, const GridPoint& b) {
  // h(x, y) + 1 = 2^x (2y+1); compare the factored forms
  if (a.row == b.row) return a.col == b.col ? 0 : (a.col < b.col ? -1 : 1);
  const GridPoint& lo = a.row < b.row ? a : b;
  const GridPoint& hi = a.row < b.row ? b : a;
  int flip = a.row < b.row ? 1 : -1;
  Nat shift = hi.row - lo.row;
  // lo: odd_lo vs hi: odd_hi << shift
  std::uint64_t odd_lo = 2ull * lo.col + 1;
  std::uint64_t odd_hi = 2ull * hi.col + 1;
  int cmp;
  if (shift >= 64 || (odd_hi > (~0ull >> shift))) {
    cmp = -1;  // shifted side overflows 64 bits, certainly larger
  } else {
    std::uint64_t shifted = odd_hi << shift;
    cmp = odd_lo == shifted ? 0 : (odd_lo < shifted ? -1 : 1);
  }
  return cmp * flip;
}

GridSet::GridSet(std::vector<GridPoint> sorted) : pts_(std::move(sorted)) {
  if (!strictly_increasing(pts_))
    throw Error(ErrorKind::Invariant, "GridSet must be lexicographically sorted without duplicates");
}

GridSet GridSet::from_unsorted(std::vector<GridPoint> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  GridSet s;
  s.pts_ = std::move(pts);
  return s;
}

bool GridSet::contains(const GridPoint& p) const {
  return std::binary_search(pts_.begin(), pts_.end(), p);
}

NatSet GridSet::row_section(Nat row) const {
  auto b = std::lower_bound(pts_.begin(), pts_.end(), GridPoint{row, 0});
  std::vector<Nat> cols;
  for (auto it = b; it != pts_.end() && it->row == row; ++it) cols.push_back(it->col);
  return NatSet(std::move(cols));
}

NatSet GridSet::rows() const {
  std::vector<Nat> rs;
  for (const auto& p : pts_)
    if (rs.empty() || rs.back() != p.row) rs.push_back(p.row);
  return NatSet(std::move(rs));
}

bool GridSet::subset_of(const GridSet& o) const { return is_subset(pts_, o.pts_); }

bool GridSet::intersects(const GridSet& o) const { return any_common(pts_, o.pts_); }

GridSet GridSet::set_union(const GridSet& a, const GridSet& b) {
  GridSet s;
  s.pts_ = merged_union(a.pts_, b.pts_);
  return s;
}

GridSet GridSet::intersection(const GridSet& a, const GridSet& b) {
  GridSet s;
  s.pts_ = merged_intersection(a.pts_, b.pts_);
  return s;
}

GridSet GridSet::difference(const GridSet& a, const GridSet& b) {
  GridSet s;
  s.pts_ = merged_difference(a.pts_, b.pts_);
  return s;
}

std::size_t GridSet::intersection_size(const GridSet& a, const GridSet& b) {
  return count_common(a.pts_, b.pts_);
}

GridSet GridSet::drop_smallest_h(std::size_t n) const {
  if (n >= size()) return GridSet();
  std::vector<GridPoint> order = pts_;
  std::sort(order.begin(), order.end(),
            [](const GridPoint& a, const GridPoint& b) { return h_compare(a, b) < 0; });
  order.erase(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n));
  return from_unsorted(std::move(order));
}

Int pair_encode(Nat x, Nat y) {
  Int odd = 2 * Int(y) + 1;
  return (odd << x) - 1;
}

GridPoint pair_decode(const Int& n) {
  if (n < 0) throw Error(ErrorKind::Usage, "pair_decode of negative value");
  Int m = n + 1;
  unsigned x = static_cast<unsigned>(lsb(m));  // m > 0, trailing zero count
  Int odd = m >> x;
  Int y = (odd - 1) / 2;
  if (x > 0xffffffffu || y > 0xffffffffu)
    throw Error(ErrorKind::Overflow, "decoded coordinate exceeds 32 bits");
  return GridPoint{static_cast<Nat>(x), y.convert_to<Nat>()};
}

std::uint64_t pair_encode_u64(Nat x, Nat y) {
  std::uint64_t odd = 2ull * y + 1;
  if (x >= 64 || odd > (~0ull >> x))
    throw Error(ErrorKind::Overflow, "pairing code overflows 64 bits");
  return (odd << x) - 1;
}

GridPoint pair_decode_u64(std::uint64_t n) {
  std::uint64_t m = n + 1;
  if (m == 0) throw Error(ErrorKind::Overflow, "pairing code overflows 64 bits");
  unsigned x = static_cast<unsigned>(std::countr_zero(m));
  std::uint64_t odd = m >> x;
  std::uint64_t y = (odd - 1) / 2;
  if (y > 0xffffffffu || x > 0xffffffffu)
    throw Error(ErrorKind::Overflow, "decoded coordinate exceeds 32 bits");
  return GridPoint{static_cast<Nat>(x), static_cast<Nat>(y)};
}

namespace {

bool family_member_interval(const NatSet& s) { return s.is_interval(); }
bool family_member_interval(const GridSet&) {
  throw Error(ErrorKind::Usage, "interval flavor applies to NatSet families only");
}

Nat family_min(const NatSet& s) { return s.min(); }
Nat family_max(const NatSet& s) { return s.max(); }
Nat family_min(const GridSet&) {
  throw Error(ErrorKind::Usage, "incr flavor applies to NatSet families only");
}
Nat family_max(const GridSet&) {
  throw Error(ErrorKind::Usage, "incr flavor applies to NatSet families only");
}

}  // namespace

template <class SetT>
DisjointFamily<SetT>::DisjointFamily(std::vector<SetT> members, FamilyFlavor flavor)
    : members_(std::move(members)), flavor_(flavor) {
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (members_[i].empty())
      throw Error(ErrorKind::Invariant,
                  "family member " + std::to_string(i) + " is empty");
  }
  for (std::size_t i = 0; i < members_.size(); ++i)
    for (std::size_t j = i + 1; j < members_.size(); ++j)
      if (members_[i].intersects(members_[j]))
        throw Error(ErrorKind::Invariant, "family members " + std::to_string(i) +
                                              " and " + std::to_string(j) +
                                              " are not disjoint");
  if (flavor_ == FamilyFlavor::Incr || flavor_ == FamilyFlavor::Int) {
    for (std::size_t i = 1; i < members_.size(); ++i)
      if (!(family_max(members_[i - 1]) + 1 <= family_min(members_[i])))
        throw Error(ErrorKind::Invariant,
                    "family is not increasing at member " + std::to_string(i));
  }
  if (flavor_ == FamilyFlavor::Int) {
    for (std::size_t i = 0; i < members_.size(); ++i)
      if (!family_member_interval(members_[i]))
        throw Error(ErrorKind::Invariant,
                    "family member " + std::to_string(i) + " is not an interval");
  }
}

template class DisjointFamily<NatSet>;
template class DisjointFamily<GridSet>;

}  // namespace idealkit
