#pragma once

#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mirror/field.hpp"
#include "mirror/rational.hpp"

#include <json.hpp>

namespace mirror {

/// A truncated series  sum_i c_i T^{l_i}  over a BaseField, with strictly
/// increasing rational exponents, every exponent below the tracked precision,
/// and no zero coefficients.  The zero scalar has an empty term list.
///
/// Values are immutable once built; all operations return fresh scalars and
/// are safe to evaluate concurrently.
class NovikovScalar {
 public:
  using Term = std::pair<Rat, FieldElem>;

  NovikovScalar() = default;
  explicit NovikovScalar(BaseField f, Prec precision = Prec{})
      : field_(f), prec_(precision) {}

  static NovikovScalar zero(BaseField f, Prec precision = Prec{}) {
    return NovikovScalar(f, precision);
  }
  static NovikovScalar constant(BaseField f, const Rat& c, Prec precision = Prec{}) {
    NovikovScalar s(f, precision);
    s.add_term(0, FieldElem(f, c));
    return s;
  }
  /// c * T^t
  static NovikovScalar monomial(BaseField f, const Rat& t, const FieldElem& c,
                                Prec precision = Prec{}) {
    NovikovScalar s(f, precision);
    s.add_term(t, c);
    return s;
  }
  static NovikovScalar one(BaseField f) { return constant(f, 1); }

  const BaseField& field() const { return field_; }
  const Prec& precision() const { return prec_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Smallest exponent; +infinity (nullopt) for the zero scalar.
  Prec val() const {
    if (terms_.empty()) return Prec{};
    return Prec(terms_.front().first);
  }

  NovikovScalar operator+(const NovikovScalar& o) const {
    NovikovScalar r(field_, prec_min(prec_, o.prec_));
    for (auto& t : terms_) r.add_term(t.first, t.second);
    for (auto& t : o.terms_) r.add_term(t.first, t.second);
    return r;
  }
  NovikovScalar operator-(const NovikovScalar& o) const { return *this + (-o); }
  NovikovScalar operator-() const {
    NovikovScalar r(field_, prec_);
    for (auto& t : terms_) r.add_term(t.first, -t.second);
    return r;
  }

  NovikovScalar operator*(const NovikovScalar& o) const {
    // Result precision min(p_a + min(val b, 0), p_b + min(val a, 0)): equal to
    // min of the precisions for series of nonnegative valuation, contracted
    // when multiplying by something of negative valuation.
    Prec pa = prec_, pb = o.prec_;
    if (pa) pa = prec_add(pa, rat_min(o.val_or_zero(), 0));
    if (pb) pb = prec_add(pb, rat_min(val_or_zero(), 0));
    NovikovScalar r(field_, prec_min(pa, pb));
    for (auto& a : terms_)
      for (auto& b : o.terms_) r.add_term(a.first + b.first, a.second * b.second);
    return r;
  }

  NovikovScalar operator*(const FieldElem& c) const {
    NovikovScalar r(field_, prec_);
    for (auto& t : terms_) r.add_term(t.first, t.second * c);
    return r;
  }

  /// T^s * this
  NovikovScalar shifted(const Rat& s) const {
    NovikovScalar r(field_, prec_add(prec_, s));
    for (auto& t : terms_) r.add_term(t.first + s, t.second);
    return r;
  }

  /// Truncate to the smaller of the current precision and p.
  NovikovScalar truncated(const Prec& p) const {
    NovikovScalar r(field_, prec_min(prec_, p));
    for (auto& t : terms_) r.add_term(t.first, t.second);
    return r;
  }

  /// Multiplicative inverse by leading-term factorisation and a geometric
  /// series.  For a of valuation v known to precision p the result carries
  /// precision p - 2v, and a * inverse() == 1 holds up to p - v.  `at`, when
  /// given, caps the result precision (needed to invert non-monomials carried
  /// at infinite precision).
  NovikovScalar inverse(Prec at = Prec{}) const {
    if (terms_.empty()) throw std::domain_error("inverting the zero Novikov scalar");
    const Rat v = terms_.front().first;
    const FieldElem lead = terms_.front().second;
    FieldElem linv = lead.inverse();
    // u := a / (lead T^v) - 1 has positive valuation.
    Prec rel = prec_min(prec_add(prec_, -v), prec_add(at, v));
    NovikovScalar u(field_, rel);
    for (size_t i = 1; i < terms_.size(); ++i)
      u.add_term(terms_[i].first - v, terms_[i].second * linv);
    if (!rel && !u.is_zero())
      throw std::domain_error("inverting a non-monomial at infinite precision");
    NovikovScalar geom = one(field_).truncated(rel);
    if (!u.is_zero()) {
      // 1 - u + u^2 - ... ; u has positive valuation, so powers leave the
      // relative precision window after finitely many steps.
      NovikovScalar p = one(field_).truncated(rel);
      int sign = -1;
      while (true) {
        p = (p * u).truncated(rel);
        if (p.is_zero()) break;
        geom = geom + (sign < 0 ? -p : p);
        sign = -sign;
      }
    }
    NovikovScalar r = geom.shifted(-v) * monomial(field_, 0, linv);
    Prec cap = prec_min(prec_ ? Prec(*prec_ - v - v) : Prec{}, at);
    return r.truncated(cap);
  }

  bool operator==(const NovikovScalar& o) const {
    return field_ == o.field_ && prec_ == o.prec_ && terms_ == o.terms_;
  }
  /// Equality of the term lists only (ignores the precision tag).
  bool same_terms(const NovikovScalar& o) const { return terms_ == o.terms_; }

  /// "c1*T^{l1} + c2*T^{l2} + ..." with rational exponents.
  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& t : terms_) {
      if (!first) os << " + ";
      first = false;
      os << t.second.str() << "*T^{" << rat_str(t.first) << "}";
    }
    return os.str();
  }

  nlohmann::json to_json() const {
    nlohmann::json terms = nlohmann::json::array();
    for (auto& t : terms_)
      terms.push_back({{"t", rat_str(t.first)}, {"c", t.second.str()}});
    nlohmann::json j{{"terms", terms}};
    j["precision"] = prec_ ? nlohmann::json(rat_str(*prec_)) : nlohmann::json("inf");
    return j;
  }

  static NovikovScalar from_json(BaseField f, const nlohmann::json& j) {
    Prec p;
    if (j.contains("precision") && j["precision"] != "inf")
      p = parse_rat(j["precision"].get<std::string>());
    NovikovScalar s(f, p);
    for (auto& t : j.at("terms"))
      s.add_term(parse_rat(t.at("t").get<std::string>()),
                 FieldElem(f, parse_rat(t.at("c").get<std::string>())));
    return s;
  }

  /// Restores the normal form: merges exponents, drops zeros and terms at or
  /// beyond the precision.
  void add_term(const Rat& t, const FieldElem& c) {
    if (c.is_zero() || !below_prec(t, prec_)) return;
    size_t lo = 0, hi = terms_.size();
    while (lo < hi) {
      size_t mid = (lo + hi) / 2;
      if (terms_[mid].first < t)
        lo = mid + 1;
      else
        hi = mid;
    }
    if (lo < terms_.size() && terms_[lo].first == t) {
      FieldElem s = terms_[lo].second + c;
      if (s.is_zero())
        terms_.erase(terms_.begin() + lo);
      else
        terms_[lo].second = s;
    } else {
      terms_.insert(terms_.begin() + lo, {t, c});
    }
  }

 private:
  Rat val_or_zero() const { return terms_.empty() ? Rat(0) : terms_.front().first; }

  BaseField field_;
  Prec prec_;                // exponent bound; nullopt = +infinity
  std::vector<Term> terms_;  // sorted by exponent, strictly increasing
};

inline NovikovScalar operator*(const FieldElem& c, const NovikovScalar& s) { return s * c; }

}  // namespace mirror
