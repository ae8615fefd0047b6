#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mirror {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int num(const Rat& r) { return boost::multiprecision::numerator(r); }
inline Int den(const Rat& r) { return boost::multiprecision::denominator(r); }

/// Parses "a/b" or "a" with optional sign; exact, no floating point.
inline Rat parse_rat(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(Int(s));
    Int n(s.substr(0, slash)), d(s.substr(slash + 1));
    if (d == 0) throw std::invalid_argument("zero denominator");
    return Rat(n, d);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a rational: '" + s + "'");
  }
}

inline std::string rat_str(const Rat& r) {
  if (den(r) == 1) return num(r).str();
  return num(r).str() + "/" + den(r).str();
}

/// true iff r lies on the lattice (1/d)Z.
inline bool on_lattice(const Rat& r, const Int& d) {
  return den(Rat(r * d)) == 1;
}

inline Rat rat_min(const Rat& a, const Rat& b) { return a < b ? a : b; }
inline Rat rat_max(const Rat& a, const Rat& b) { return a < b ? b : a; }

/// Optional rational used for precisions: nullopt means +infinity.
using Prec = std::optional<Rat>;

inline Prec prec_min(const Prec& a, const Prec& b) {
  if (!a) return b;
  if (!b) return a;
  return Prec(rat_min(*a, *b));
}

inline Prec prec_add(const Prec& a, const Rat& shift) {
  if (!a) return a;
  return Prec(*a + shift);
}

/// below_prec(x, p): x < p, where p may be +infinity.
inline bool below_prec(const Rat& x, const Prec& p) { return !p || x < *p; }

// Exact rational vectors (points of R^n, gradients).
using RVec = std::vector<Rat>;
// Integer lattice vectors (homology classes, monomial exponents).
using ZVec = std::vector<long long>;

inline Rat dot(const RVec& a, const ZVec& b) {
  Rat s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Rat dot(const RVec& a, const RVec& b) {
  Rat s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline RVec sub(const RVec& a, const RVec& b) {
  RVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline RVec add(const RVec& a, const RVec& b) {
  RVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline ZVec zadd(const ZVec& a, const ZVec& b) {
  ZVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline ZVec zneg(const ZVec& a) {
  ZVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
  return r;
}

inline bool is_zero(const ZVec& a) {
  for (auto x : a)
    if (x != 0) return false;
  return true;
}

}  // namespace mirror
