#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "mirror/rational.hpp"

namespace mirror {

/// Coefficient field: the rationals, or a prime field F_p.
///
/// Rationals are the default (exact, characteristic zero); prime fields are
/// offered for speed.  Signs (-1)^k are well defined in both (and equal to 1
/// when p = 2).
struct BaseField {
  std::uint64_t p = 0;  // 0 = rationals, otherwise a prime

  bool is_rational() const { return p == 0; }

  static bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
      if (n % d == 0) return false;
    return true;
  }

  static BaseField rationals() { return BaseField{0}; }
  static BaseField prime(std::uint64_t p) {
    if (!is_prime(p)) throw std::invalid_argument("field characteristic must be prime");
    return BaseField{p};
  }

  bool operator==(const BaseField&) const = default;
};

/// An element of a BaseField.  Over Q the value is an exact rational; over
/// F_p it is the canonical representative in [0, p).
class FieldElem {
 public:
  FieldElem() = default;
  FieldElem(BaseField f, const Rat& v) : field_(f) {
    if (f.is_rational()) {
      q_ = v;
    } else {
      r_ = reduce(v, f.p);
    }
  }

  static FieldElem zero(BaseField f) { return FieldElem(f, 0); }
  static FieldElem one(BaseField f) { return FieldElem(f, 1); }
  /// (-1)^k; equal to 1 in characteristic 2.
  static FieldElem sign(BaseField f, long long k) {
    return (k % 2 == 0) ? one(f) : FieldElem(f, -1);
  }

  const BaseField& field() const { return field_; }
  bool is_zero() const { return field_.is_rational() ? q_ == 0 : r_ == 0; }

  FieldElem operator+(const FieldElem& o) const {
    check(o);
    if (field_.is_rational()) return FieldElem(field_, q_ + o.q_);
    return from_rep(field_, (r_ + o.r_) % field_.p);
  }
  FieldElem operator-(const FieldElem& o) const {
    check(o);
    if (field_.is_rational()) return FieldElem(field_, q_ - o.q_);
    return from_rep(field_, (r_ + field_.p - o.r_) % field_.p);
  }
  FieldElem operator*(const FieldElem& o) const {
    check(o);
    if (field_.is_rational()) return FieldElem(field_, q_ * o.q_);
    return from_rep(field_, mulmod(r_, o.r_, field_.p));
  }
  FieldElem operator-() const {
    if (field_.is_rational()) return FieldElem(field_, -q_);
    return from_rep(field_, r_ == 0 ? 0 : field_.p - r_);
  }
  FieldElem inverse() const {
    if (is_zero()) throw std::domain_error("inverting zero field element");
    if (field_.is_rational()) return FieldElem(field_, 1 / q_);
    return from_rep(field_, powmod(r_, field_.p - 2, field_.p));
  }
  bool operator==(const FieldElem& o) const {
    return field_ == o.field_ && q_ == o.q_ && r_ == o.r_;
  }

  /// Exact value over Q; representative over F_p.
  std::string str() const {
    return field_.is_rational() ? rat_str(q_) : std::to_string(r_);
  }
  const Rat& rational() const { return q_; }
  std::uint64_t residue() const { return r_; }

 private:
  static std::uint64_t reduce(const Rat& v, std::uint64_t p) {
    Int n = num(v) % p, d = den(v) % p;
    if (n < 0) n += p;
    if (d == 0) throw std::domain_error("denominator divisible by field characteristic");
    std::uint64_t nn = n.convert_to<std::uint64_t>();
    std::uint64_t dd = d.convert_to<std::uint64_t>();
    return mulmod(nn, powmod(dd, p - 2, p), p);
  }
  static std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return static_cast<std::uint64_t>((static_cast<__uint128_t>(a) * b) % p);
  }
  static std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
    std::uint64_t r = 1 % p;
    while (e) {
      if (e & 1) r = mulmod(r, a, p);
      a = mulmod(a, a, p);
      e >>= 1;
    }
    return r;
  }
  static FieldElem from_rep(BaseField f, std::uint64_t r) {
    FieldElem e;
    e.field_ = f;
    e.r_ = r;
    return e;
  }
  void check(const FieldElem& o) const {
    if (!(field_ == o.field_)) throw std::invalid_argument("mixed base fields");
  }

  BaseField field_;
  Rat q_ = 0;
  std::uint64_t r_ = 0;
};

}  // namespace mirror
