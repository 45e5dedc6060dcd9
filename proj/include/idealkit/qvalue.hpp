#ifndef IDEALKIT_QVALUE_HPP
#define IDEALKIT_QVALUE_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <string>

#include "idealkit/error.hpp"

namespace idealkit {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

/// Parses "p" or "p/q" with nonnegative p, positive q.
Rat parse_rational(const std::string& text);

std::string rational_to_string(const Rat& r);

/// Floor of the q-th root of a nonnegative integer.
Int floor_nth_root(const Int& value, unsigned q);

/// r^q for a nonnegative rational and q >= 0.
Rat pow_rational(const Rat& r, unsigned q);

/// Exact value of r^(p/q) when it is rational, nullopt otherwise.
std::optional<Rat> pow_exact(const Rat& r, unsigned p, unsigned q);

/// Exact nonnegative extended value: a rational, +infinity, or a tagged
/// q-th-root form base^(1/index). Root forms with a rational value are
/// normalized away, so index >= 2 and the base is never a perfect power
/// with a matching exponent divisor.
class QValue {
public:
  enum class Kind { Rational, Infinity, Root };

  QValue() : kind_(Kind::Rational), base_(0), index_(1) {}

  static QValue rational(Rat r);
  static QValue infinity();
  /// base^(1/index); normalizes index 1 and perfect powers to rational form.
  static QValue root(Rat base, unsigned index);

  Kind kind() const { return kind_; }
  bool is_rational() const { return kind_ == Kind::Rational; }
  bool is_infinite() const { return kind_ == Kind::Infinity; }
  bool is_root() const { return kind_ == Kind::Root; }
  bool is_zero() const { return kind_ == Kind::Rational && base_ == 0; }

  /// Rational payload; throws unless is_rational().
  const Rat& rat() const;
  /// Root payload; throws unless is_root().
  const Rat& root_base() const;
  unsigned root_index() const;

  /// Exact three-way comparison. Root forms are compared by cross-powering:
  /// r1^(1/p) vs r2^(1/q) has the sign of r1^q vs r2^p.
  int compare(const QValue& other) const;

  bool operator==(const QValue& o) const { return compare(o) == 0; }
  bool operator!=(const QValue& o) const { return compare(o) != 0; }
  bool operator<(const QValue& o) const { return compare(o) < 0; }
  bool operator<=(const QValue& o) const { return compare(o) <= 0; }
  bool operator>(const QValue& o) const { return compare(o) > 0; }
  bool operator>=(const QValue& o) const { return compare(o) >= 0; }

  /// Exact sum; throws Exactness when an irrational root is involved.
  QValue operator+(const QValue& other) const;
  QValue& operator+=(const QValue& other);

  /// Exact difference, requires *this >= other and both rational.
  QValue operator-(const QValue& other) const;

  /// c * value for c >= 0; exact for root forms too: c*b^(1/q) = (c^q b)^(1/q).
  QValue scaled(const Rat& c) const;

  static QValue max(const QValue& a, const QValue& b) { return a < b ? b : a; }
  static QValue min(const QValue& a, const QValue& b) { return b < a ? b : a; }

  /// Decides x <= y + z exactly. Supported when adding y + z is exact or
  /// when every operand is a rational or a square root; throws otherwise.
  static bool leq_sum(const QValue& x, const QValue& y, const QValue& z);

  long double to_long_double() const;
  double to_double() const;

  /// "p/q", "inf", or "root(p/q,k)".
  std::string to_string() const;

private:
  QValue(Kind k, Rat base, unsigned index)
      : kind_(k), base_(std::move(base)), index_(index) {}

  Kind kind_;
  Rat base_;        // rational value, or base of the root form
  unsigned index_;  // root index, 1 for plain rationals
};

}  // namespace idealkit

#endif
