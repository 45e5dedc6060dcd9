#include "idealkit/qvalue.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace idealkit {

Rat parse_rational(const std::string& text) {
  auto bad = [&] {
    throw Error(ErrorKind::Parse, "bad rational literal '" + text + "'");
  };
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) bad();
      return Rat(Int(text));
    }
    std::string num = text.substr(0, slash);
    std::string den = text.substr(slash + 1);
    if (num.empty() || den.empty() ||
        num.find_first_not_of("0123456789") != std::string::npos ||
        den.find_first_not_of("0123456789") != std::string::npos)
      bad();
    Int d(den);
    if (d == 0) throw Error(ErrorKind::Parse, "zero denominator in '" + text + "'");
    return Rat(Int(num), d);
  } catch (const std::exception&) {
    bad();
  }
  return Rat();  // unreachable
}

std::string rational_to_string(const Rat& r) {
  std::ostringstream os;
  if (denominator(r) == 1) {
    os << numerator(r);
  } else {
    os << numerator(r) << "/" << denominator(r);
  }
  return os.str();
}

Int floor_nth_root(const Int& value, unsigned q) {
  if (q == 0) throw Error(ErrorKind::Usage, "zeroth root");
  if (value < 0) throw Error(ErrorKind::Usage, "root of negative integer");
  if (value <= 1 || q == 1) return value;
  // binary search on [1, value]
  Int lo = 1, hi = value;
  while (lo < hi) {
    Int mid = (lo + hi + 1) / 2;
    if (pow(mid, q) <= value) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

Rat pow_rational(const Rat& r, unsigned q) {
  if (r < 0) throw Error(ErrorKind::Usage, "power of negative rational");
  return Rat(pow(numerator(r), q), pow(denominator(r), q));
}

std::optional<Rat> pow_exact(const Rat& r, unsigned p, unsigned q) {
  if (r < 0) throw Error(ErrorKind::Usage, "power of negative rational");
  if (q == 0) throw Error(ErrorKind::Usage, "zero root index");
  unsigned g = std::gcd(p, q);
  p /= g;
  q /= g;
  Rat powered = pow_rational(r, p);
  if (q == 1) return powered;
  if (powered == 0 || powered == 1) return powered;
  Int n = numerator(powered), d = denominator(powered);
  Int rn = floor_nth_root(n, q), rd = floor_nth_root(d, q);
  if (pow(rn, q) == n && pow(rd, q) == d) return Rat(rn, rd);
  return std::nullopt;
}

QValue QValue::rational(Rat r) {
  if (r < 0) throw Error(ErrorKind::Invariant, "negative submeasure value");
  return QValue(Kind::Rational, std::move(r), 1);
}

QValue QValue::infinity() { return QValue(Kind::Infinity, Rat(0), 1); }

QValue QValue::root(Rat base, unsigned index) {
  if (index == 0) throw Error(ErrorKind::Invariant, "zero root index");
  if (base < 0) throw Error(ErrorKind::Invariant, "negative root base");
  // try to collapse: for each divisor d > 1 of the index, a base that is an
  // exact d-th power drops to index/d
  for (unsigned d = index; d >= 2; --d) {
    if (index % d != 0) continue;
    if (auto v = pow_exact(base, 1, d)) {
      base = *v;
      index /= d;
      d = index + 1;  // restart scan on the smaller index
    }
  }
  if (index == 1 || base == 0 || base == 1) {
    return QValue(Kind::Rational, std::move(base), 1);
  }
  return QValue(Kind::Root, std::move(base), index);
}

const Rat& QValue::rat() const {
  if (!is_rational())
    throw Error(ErrorKind::Exactness, "value is not a plain rational: " + to_string());
  return base_;
}

const Rat& QValue::root_base() const {
  if (!is_root()) throw Error(ErrorKind::Usage, "not a root form");
  return base_;
}

unsigned QValue::root_index() const {
  if (!is_root()) throw Error(ErrorKind::Usage, "not a root form");
  return index_;
}

int QValue::compare(const QValue& other) const {
  if (is_infinite() || other.is_infinite()) {
    if (is_infinite() && other.is_infinite()) return 0;
    return is_infinite() ? 1 : -1;
  }
  if (index_ == 1 && other.index_ == 1) {
    return base_ == other.base_ ? 0 : (base_ < other.base_ ? -1 : 1);
  }
  // b1^(1/p) vs b2^(1/q): raise both to p*q
  Rat lhs = pow_rational(base_, other.index_);
  Rat rhs = pow_rational(other.base_, index_);
  return lhs == rhs ? 0 : (lhs < rhs ? -1 : 1);
}

QValue QValue::operator+(const QValue& other) const {
  QValue result = *this;
  result += other;
  return result;
}

QValue& QValue::operator+=(const QValue& other) {
  if (is_infinite() || other.is_infinite()) {
    *this = infinity();
    return *this;
  }
  if (other.is_zero()) return *this;
  if (is_zero()) {
    *this = other;
    return *this;
  }
  if (index_ != 1 || other.index_ != 1)
    throw Error(ErrorKind::Exactness,
                "sum of irrational root values is not representable: " +
                    to_string() + " + " + other.to_string());
  base_ += other.base_;
  return *this;
}

QValue QValue::operator-(const QValue& other) const {
  if (is_infinite() && !other.is_infinite()) return infinity();
  const Rat& a = rat();
  const Rat& b = other.rat();
  if (a < b)
    throw Error(ErrorKind::Invariant, "negative difference of submeasure values");
  return rational(a - b);
}

QValue QValue::scaled(const Rat& c) const {
  if (c < 0) throw Error(ErrorKind::Invariant, "negative scale factor");
  if (c == 0) return QValue();
  if (is_infinite()) return infinity();
  if (index_ == 1) return rational(base_ * c);
  // c * b^(1/q) = (c^q * b)^(1/q)
  return root(pow_rational(c, index_) * base_, index_);
}

bool QValue::leq_sum(const QValue& x, const QValue& y, const QValue& z) {
  if (y.is_infinite() || z.is_infinite()) return true;
  if (x.is_infinite()) return false;
  if (x <= y || x <= z) return true;
  if (y.index_ == 1 && z.index_ == 1) return x <= y + z;
  if (x.index_ <= 2 && y.index_ <= 2 && z.index_ <= 2) {
    // compare sqrt(X) <= sqrt(Y) + sqrt(Z) with X,Y,Z rational
    auto squared = [](const QValue& v) {
      return v.index_ == 1 ? pow_rational(v.base_, 2) : v.base_;
    };
    Rat big_x = squared(x), big_y = squared(y), big_z = squared(z);
    Rat lhs = big_x - big_y - big_z;
    if (lhs <= 0) return true;
    return pow_rational(lhs, 2) <= 4 * big_y * big_z;
  }
  throw Error(ErrorKind::Exactness,
              "cannot compare sum of root values exactly: " + x.to_string() +
                  " <= " + y.to_string() + " + " + z.to_string());
}

long double QValue::to_long_double() const {
  if (is_infinite()) return HUGE_VALL;
  long double v = numerator(base_).convert_to<long double>() /
                  denominator(base_).convert_to<long double>();
  if (index_ == 1) return v;
  return powl(v, 1.0L / static_cast<long double>(index_));
}

double QValue::to_double() const { return static_cast<double>(to_long_double()); }

std::string QValue::to_string() const {
  if (is_infinite()) return "inf";
  if (index_ == 1) return rational_to_string(base_);
  return "root(" + rational_to_string(base_) + "," + std::to_string(index_) + ")";
}

}  // namespace idealkit
