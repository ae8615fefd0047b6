#pragma once

#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mirror/atlas.hpp"
#include "mirror/novikov.hpp"

#include <json.hpp>

namespace mirror {

/// Chart ring data for a chain: basepoint at the largest vertex, polytope the
/// intersection of the member charts lifted into that vertex's frame.
/// Restriction along an inclusion of chains is always precision-sound because
/// the polytopes nest by construction.
struct ChainChart {
  Chain I;
  RVec basepoint;
  Polytope polytope;
};

/// Precomputes the chart of every chain of the atlas; read-only afterwards,
/// safe to share across threads.
class ChartRegistry {
 public:
  explicit ChartRegistry(const ChartAtlas& atlas) : atlas_(&atlas) {
    for (auto& I : enumerate_chains(atlas, atlas.dimension + 1)) {
      ChainChart c;
      c.I = I;
      c.basepoint = atlas.chain_basepoint(I);
      c.polytope = atlas.chain_polytope(I);
      charts_.emplace(I, std::move(c));
    }
  }

  const ChartAtlas& atlas() const { return *atlas_; }
  const ChainChart& chart(const Chain& I) const {
    auto it = charts_.find(I);
    if (it == charts_.end()) throw std::out_of_range("no chart for chain " + chain_str(I));
    return it->second;
  }
  bool has_chart(const Chain& I) const { return charts_.count(I) != 0; }

 private:
  const ChartAtlas* atlas_;
  std::map<Chain, ChainChart> charts_;
};

/// A truncated convergent Laurent series in a chain chart: finitely many
/// terms c T^l z^A, each with polytope-valuation
///   w(l, A) = l + min_{v in P} <v - q, A>
/// strictly below the precision E.
class AffinoidElement {
 public:
  struct Key {
    Rat lambda;
    ZVec cls;
    bool operator<(const Key& o) const { return std::tie(lambda, cls) < std::tie(o.lambda, o.cls); }
    bool operator==(const Key& o) const = default;
  };

  AffinoidElement() = default;
  AffinoidElement(Chain chart, BaseField f, Prec precision)
      : chart_(std::move(chart)), field_(f), prec_(precision) {}

  static AffinoidElement zero(const Chain& chart, BaseField f, Prec E) {
    return AffinoidElement(chart, f, E);
  }
  static AffinoidElement monomial(const ChartRegistry& reg, const Chain& chart, BaseField f,
                                  const Rat& lambda, const ZVec& cls, const FieldElem& c,
                                  Prec E = Prec{}) {
    AffinoidElement a(chart, f, E);
    a.add_term(reg, lambda, cls, c);
    return a;
  }
  static AffinoidElement constant(const ChartRegistry& reg, const Chain& chart, BaseField f,
                                  const Rat& value, Prec E = Prec{}) {
    int n = reg.atlas().dimension;
    return monomial(reg, chart, f, 0, ZVec(n, 0), FieldElem(f, value), E);
  }
  static AffinoidElement from_scalar(const ChartRegistry& reg, const Chain& chart,
                                     const NovikovScalar& s) {
    AffinoidElement a(chart, s.field(), s.precision());
    int n = reg.atlas().dimension;
    for (auto& t : s.terms()) a.add_term(reg, t.first, ZVec(n, 0), t.second);
    return a;
  }

  const Chain& chart() const { return chart_; }
  const BaseField& field() const { return field_; }
  const Prec& precision() const { return prec_; }
  const std::map<Key, FieldElem>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Polytope-valuation of a monomial in this chart.
  static Rat weight(const ChartRegistry& reg, const Chain& chart, const Rat& lambda,
                    const ZVec& cls) {
    const ChainChart& c = reg.chart(chart);
    return lambda + c.polytope.support_min(c.basepoint, cls);
  }

  /// Smallest polytope-valuation among the terms; nullopt for zero.
  Prec weight_min(const ChartRegistry& reg) const {
    Prec m;
    for (auto& [k, c] : terms_) {
      Rat w = weight(reg, chart_, k.lambda, k.cls);
      if (!m || w < *m) m = w;
    }
    return m;
  }

  void add_term(const ChartRegistry& reg, const Rat& lambda, const ZVec& cls,
                const FieldElem& c) {
    if (c.is_zero()) return;
    if (prec_ && !(weight(reg, chart_, lambda, cls) < *prec_)) return;
    Key k{lambda, cls};
    auto it = terms_.find(k);
    if (it == terms_.end()) {
      terms_.emplace(k, c);
    } else {
      FieldElem s = it->second + c;
      if (s.is_zero())
        terms_.erase(it);
      else
        it->second = s;
    }
  }

  AffinoidElement operator-() const {
    AffinoidElement r(chart_, field_, prec_);
    for (auto& [k, c] : terms_) r.terms_.emplace(k, -c);
    return r;
  }

  AffinoidElement add(const ChartRegistry& reg, const AffinoidElement& o) const {
    require_same_chart(o);
    AffinoidElement r(chart_, field_, prec_min(prec_, o.prec_));
    for (auto& [k, c] : terms_) r.add_term(reg, k.lambda, k.cls, c);
    for (auto& [k, c] : o.terms_) r.add_term(reg, k.lambda, k.cls, c);
    return r;
  }

  AffinoidElement sub(const ChartRegistry& reg, const AffinoidElement& o) const {
    return add(reg, -o);
  }

  AffinoidElement mul(const ChartRegistry& reg, const AffinoidElement& o) const {
    require_same_chart(o);
    // Precision contracts when a factor has terms of negative valuation,
    // exactly as for Novikov scalars.
    Prec pa = prec_, pb = o.prec_;
    Prec wa = weight_min(reg), wb = o.weight_min(reg);
    if (pa) pa = prec_add(pa, rat_min(wb ? *wb : Rat(0), 0));
    if (pb) pb = prec_add(pb, rat_min(wa ? *wa : Rat(0), 0));
    AffinoidElement r(chart_, field_, prec_min(pa, pb));
    for (auto& [ka, ca] : terms_)
      for (auto& [kb, cb] : o.terms_)
        r.add_term(reg, ka.lambda + kb.lambda, zadd(ka.cls, kb.cls), ca * cb);
    return r;
  }

  AffinoidElement scale(const FieldElem& c) const {
    AffinoidElement r(chart_, field_, prec_);
    if (c.is_zero()) return r;
    for (auto& [k, v] : terms_) {
      FieldElem s = v * c;
      if (!s.is_zero()) r.terms_.emplace(k, s);
    }
    return r;
  }

  AffinoidElement scale(const ChartRegistry& reg, const NovikovScalar& s) const {
    AffinoidElement r(chart_, field_, prec_min(prec_, s.precision()));
    for (auto& [k, v] : terms_)
      for (auto& t : s.terms()) r.add_term(reg, k.lambda + t.first, k.cls, v * t.second);
    return r;
  }

  AffinoidElement truncated(const ChartRegistry& reg, Prec E) const {
    AffinoidElement r(chart_, field_, prec_min(prec_, E));
    for (auto& [k, c] : terms_) r.add_term(reg, k.lambda, k.cls, c);
    return r;
  }

  bool same_terms(const AffinoidElement& o) const { return terms_ == o.terms_; }
  bool operator==(const AffinoidElement& o) const {
    return chart_ == o.chart_ && prec_ == o.prec_ && terms_ == o.terms_;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [k, c] : terms_) {
      if (!first) os << " + ";
      first = false;
      os << c.str() << "*T^{" << rat_str(k.lambda) << "}z^(";
      for (size_t i = 0; i < k.cls.size(); ++i) os << (i ? "," : "") << k.cls[i];
      os << ")";
    }
    return os.str();
  }

  nlohmann::json to_json() const {
    nlohmann::json terms = nlohmann::json::array();
    for (auto& [k, c] : terms_)
      terms.push_back({{"t", rat_str(k.lambda)}, {"z", k.cls}, {"c", c.str()}});
    nlohmann::json j{{"chart", chart_}, {"terms", terms}};
    j["precision"] = prec_ ? nlohmann::json(rat_str(*prec_)) : nlohmann::json("inf");
    return j;
  }

  static AffinoidElement from_json(const ChartRegistry& reg, BaseField f,
                                   const nlohmann::json& j) {
    Prec p;
    if (j.contains("precision") && j["precision"] != "inf")
      p = parse_rat(j["precision"].get<std::string>());
    AffinoidElement a(j.at("chart").get<Chain>(), f, p);
    for (auto& t : j.at("terms"))
      a.add_term(reg, parse_rat(t.at("t").get<std::string>()), t.at("z").get<ZVec>(),
                 FieldElem(f, parse_rat(t.at("c").get<std::string>())));
    return a;
  }

 private:
  void require_same_chart(const AffinoidElement& o) const {
    if (chart_ != o.chart_)
      throw std::invalid_argument("chart mismatch: " + chain_str(chart_) + " vs " +
                                  chain_str(o.chart_));
    if (!(field_ == o.field_)) throw std::invalid_argument("mixed base fields");
  }

  Chain chart_;
  BaseField field_;
  Prec prec_;
  std::map<Key, FieldElem> terms_;
};

/// Rebase an element into the chart of a larger chain: z_I^A picks up
/// T^{<q_J - q_I, A>} when written in z_J coordinates.  Sound without any
/// precision loss because the target polytope is contained in the source one.
inline AffinoidElement restrict(const ChartRegistry& reg, const AffinoidElement& a,
                                const Chain& J) {
  if (a.chart() == J) return a;
  if (!subset(a.chart(), J))
    throw std::invalid_argument("restriction target must contain the source chain");
  if (!reg.atlas().in_simplex(J))
    throw std::invalid_argument("restriction target is not a chain of the atlas");
  VertexId from = a.chart().back(), to = J.back();
  RVec d = from == to ? RVec(reg.atlas().dimension, Rat(0))
                      : reg.atlas().displacement(from, to);
  AffinoidElement r(J, a.field(), a.precision());
  for (auto& [k, c] : a.terms()) r.add_term(reg, k.lambda + dot(d, k.cls), k.cls, c);
  return r;
}

/// Convenience overload: restrict from a vertex chart toward vertex j through
/// the edge chart {i, j}.
inline AffinoidElement restrict(const ChartRegistry& reg, const AffinoidElement& a,
                                VertexId j) {
  Chain J = a.chart();
  if (!std::binary_search(J.begin(), J.end(), j))
    J.insert(std::upper_bound(J.begin(), J.end(), j), j);
  return restrict(reg, a, J);
}

/// Inverts an element with a recognizable unit part: a term m whose
/// valuation beats every other term at every vertex of the chart polytope.
/// The result carries precision E - w(m).
inline AffinoidElement unit_invert(const ChartRegistry& reg, const AffinoidElement& a) {
  if (a.is_zero()) throw std::domain_error("inverting zero");
  const ChainChart& chart = reg.chart(a.chart());
  const auto& verts = chart.polytope.vertices();

  // find the dominating term
  const AffinoidElement::Key* dom = nullptr;
  for (auto& [k, c] : a.terms()) {
    bool dominates = true;
    for (auto& [k2, c2] : a.terms()) {
      if (k2 == k) continue;
      for (auto& v : verts) {
        Rat w1 = k.lambda + dot(sub(v, chart.basepoint), k.cls);
        Rat w2 = k2.lambda + dot(sub(v, chart.basepoint), k2.cls);
        if (!(w1 < w2)) {
          dominates = false;
          break;
        }
      }
      if (!dominates) break;
    }
    if (dominates) {
      dom = &k;
      break;
    }
  }
  if (!dom) throw std::domain_error("not recognizably a unit at this precision");

  const Rat lam = dom->lambda;
  const ZVec cls = dom->cls;
  const FieldElem lead = a.terms().at(*dom);
  Rat wm = AffinoidElement::weight(reg, a.chart(), lam, cls);
  Prec window = a.precision() ? Prec(*a.precision() - wm) : Prec{};

  // u = m^{-1} a - 1, all of whose terms have positive valuation at every
  // vertex; powers leave the window after finitely many steps.
  AffinoidElement u(a.chart(), a.field(), window);
  FieldElem linv = lead.inverse();
  for (auto& [k, c] : a.terms()) {
    if (k == *dom) continue;
    u.add_term(reg, k.lambda - lam, zadd(k.cls, zneg(cls)), c * linv);
  }
  if (!u.is_zero() && !window)
    throw std::domain_error("inverting a non-monomial at infinite precision");

  AffinoidElement geom =
      AffinoidElement::monomial(reg, a.chart(), a.field(), 0, ZVec(cls.size(), 0),
                                FieldElem::one(a.field()), window);
  if (!u.is_zero()) {
    AffinoidElement p = geom;
    int sign = -1;
    while (true) {
      p = p.mul(reg, u).truncated(reg, window);
      if (p.is_zero()) break;
      geom = sign < 0 ? geom.sub(reg, p) : geom.add(reg, p);
      sign = -sign;
    }
  }
  AffinoidElement minv = AffinoidElement::monomial(
      reg, a.chart(), a.field(), -lam, zneg(cls), linv,
      window ? Prec(*window - wm) : Prec{});
  return geom.mul(reg, minv);
}

// ---------------------------------------------------------------------------
// The twisting cocycle

/// alpha^v on a triple i<j<k: the monomial unit
///   (-1)^{v_ijk} T^{g(q_k)} z_{q_k}^{dg},  g = f_ij + f_jk - f_ik,
/// expressed in the chart of the largest vertex.  Degenerate (repeated-index)
/// values are 1, consistent with f_ii = 0.
struct TwistingMonomial {
  Rat lambda;   // g evaluated at q_k
  ZVec cls;     // dg, an integer vector
  int sign = 1;
};

class TwistingCocycle {
 public:
  TwistingCocycle() = default;

  const TwistingMonomial& at(const Chain& ijk) const {
    auto it = values_.find(ijk);
    if (it == values_.end()) throw std::out_of_range("no cocycle value on " + chain_str(ijk));
    return it->second;
  }

  /// alpha^v_{J,I} for upper chain J and lower chain I with min J == max I:
  /// alpha^v_{min I, max I, max J}, with repeated indices collapsing to 1.
  TwistingMonomial pair_value(int n, const Chain& J, const Chain& I) const {
    VertexId a = I.front(), b = I.back(), c = J.back();
    if (a == b || b == c) return TwistingMonomial{0, ZVec(n, 0), 1};
    return at(Chain{a, b, c});
  }

  /// As a monomial element of the chart of a chain containing {i,j,k}.
  AffinoidElement element(const ChartRegistry& reg, const Chain& ijk, const Chain& target,
                          Prec E = Prec{}) const {
    const TwistingMonomial& m = ijk[0] == ijk[1] || ijk[1] == ijk[2]
                                    ? TwistingMonomial{0, ZVec(reg.atlas().dimension, 0), 1}
                                    : at(ijk);
    AffinoidElement e = AffinoidElement::monomial(
        reg, Chain{ijk.back()}, reg.atlas().field, m.lambda, m.cls,
        FieldElem::sign(reg.atlas().field, m.sign == -1 ? 1 : 0), E);
    return restrict(reg, e, target);
  }

  std::map<Chain, TwistingMonomial>& values() { return values_; }
  const std::map<Chain, TwistingMonomial>& values() const { return values_; }

 private:
  std::map<Chain, TwistingMonomial> values_;
};

/// Builds alpha^v from the atlas sections and sign cochain.
inline TwistingCocycle twisting_cocycle(const ChartAtlas& atlas) {
  TwistingCocycle alpha;
  for (auto& t : enumerate_chains(atlas, 3)) {
    if (t.size() != 3) continue;
    VertexId i = t[0], j = t[1], k = t[2];
    TwistingMonomial m;
    m.lambda = atlas.section_value_at(i, j, k) + atlas.section(j, k).value_at_target -
               atlas.section(i, k).value_at_target;
    RVec g = atlas.section(i, j).gradient;
    g = add(g, atlas.section(j, k).gradient);
    g = sub(g, atlas.section(i, k).gradient);
    for (auto& c : g) {
      if (den(c) != 1)
        throw std::domain_error("non-integral section differential on " + chain_str(t));
      m.cls.push_back(num(c).convert_to<long long>());
    }
    m.sign = atlas.sign_value(i, j, k) % 2 ? -1 : 1;
    alpha.values()[t] = m;
  }
  return alpha;
}

/// Checks alpha_jkl alpha_ijl == alpha_ikl alpha_ijk on every 4-chain after
/// restricting all four to the chart of the largest vertex.  Failures report
/// the additive witness g_jkl - g_ikl + g_ijl - g_ijk.
inline ValidationReport cocycle_check(const TwistingCocycle& alpha, const ChartRegistry& reg) {
  ValidationReport rep;
  const ChartAtlas& atlas = reg.atlas();
  for (auto& q : enumerate_chains(atlas, 4)) {
    if (q.size() != 4) continue;
    Chain jkl{q[1], q[2], q[3]}, ijl{q[0], q[1], q[3]}, ikl{q[0], q[2], q[3]},
        ijk{q[0], q[1], q[2]};
    AffinoidElement lhs =
        alpha.element(reg, jkl, q).mul(reg, alpha.element(reg, ijl, q));
    AffinoidElement rhs =
        alpha.element(reg, ikl, q).mul(reg, alpha.element(reg, ijk, q));
    if (!lhs.same_terms(rhs)) {
      AffinoidElement diff = lhs.sub(reg, rhs);
      std::ostringstream os;
      os << "delta alpha != 1; witness " << diff.str();
      rep.errors.push_back({"cocycle failure", chain_str(q), os.str()});
    }
  }
  return rep;
}

}  // namespace mirror
