#pragma once

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mirror/affinoid.hpp"
#include "mirror/atlas.hpp"

#include <json.hpp>

namespace mirror {

// ---------------------------------------------------------------------------
// Matrices over chain charts

struct AffMat {
  Chain chart;
  size_t rows = 0, cols = 0;
  std::vector<std::vector<AffinoidElement>> e;  // rows x cols

  static AffMat zero(const Chain& chart, BaseField f, Prec E, size_t rows, size_t cols) {
    AffMat m;
    m.chart = chart;
    m.rows = rows;
    m.cols = cols;
    m.e.assign(rows, std::vector<AffinoidElement>(cols, AffinoidElement::zero(chart, f, E)));
    return m;
  }

  bool is_zero() const {
    for (auto& r : e)
      for (auto& x : r)
        if (!x.is_zero()) return false;
    return true;
  }
};

inline AffMat mat_restrict(const ChartRegistry& reg, const AffMat& m, const Chain& target) {
  if (m.chart == target) return m;
  AffMat r = m;
  r.chart = target;
  for (auto& row : r.e)
    for (auto& x : row) x = restrict(reg, x, target);
  return r;
}

inline AffMat mat_add(const ChartRegistry& reg, const AffMat& a, const AffMat& b) {
  AffMat r = a;
  for (size_t i = 0; i < a.rows; ++i)
    for (size_t j = 0; j < a.cols; ++j) r.e[i][j] = a.e[i][j].add(reg, b.e[i][j]);
  return r;
}

inline AffMat mat_mul(const ChartRegistry& reg, const AffMat& a, const AffMat& b, Prec E) {
  if (a.cols != b.rows) throw std::invalid_argument("matrix shape mismatch");
  AffMat r = AffMat::zero(a.chart, reg.atlas().field, E, a.rows, b.cols);
  for (size_t i = 0; i < a.rows; ++i)
    for (size_t j = 0; j < b.cols; ++j) {
      AffinoidElement s = r.e[i][j];
      for (size_t k = 0; k < a.cols; ++k)
        s = s.add(reg, a.e[i][k].mul(reg, b.e[k][j]).truncated(reg, E));
      r.e[i][j] = s;
    }
  return r;
}

inline AffMat mat_scale(const AffMat& a, const FieldElem& c) {
  AffMat r = a;
  for (auto& row : r.e)
    for (auto& x : row) x = x.scale(c);
  return r;
}

inline AffMat mat_scale_elem(const ChartRegistry& reg, const AffMat& a, const AffinoidElement& u,
                             Prec E) {
  AffMat r = a;
  AffinoidElement v = restrict(reg, u, a.chart);
  for (auto& row : r.e)
    for (auto& x : row) x = x.mul(reg, v).truncated(reg, E);
  return r;
}

/// Scale row r by s(r) (diagonal operator after the matrix).
inline AffMat mat_row_signs(const AffMat& a, const std::vector<int>& degs, BaseField f) {
  AffMat r = a;
  for (size_t i = 0; i < a.rows; ++i) {
    if (degs[i] % 2 == 0) continue;
    for (auto& x : r.e[i]) x = x.scale(FieldElem(f, -1));
  }
  return r;
}

/// Scale column c by s(c) (diagonal operator before the matrix).
inline AffMat mat_col_signs(const AffMat& a, const std::vector<int>& degs, BaseField f) {
  AffMat r = a;
  for (size_t j = 0; j < a.cols; ++j) {
    if (degs[j] % 2 == 0) continue;
    for (size_t i = 0; i < a.rows; ++i) r.e[i][j] = r.e[i][j].scale(FieldElem(f, -1));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Twisted sheaves

struct SheafGenerator {
  std::string label;
  int degree = 0;
};

/// An (alpha^v)^{-1}-twisted sheaf of perfect modules: a graded free module
/// per vertex and a structure matrix per chain, subject to the twisted
/// quadratic equation checked by sheaf_validate.
struct TwistedSheaf {
  std::map<VertexId, std::vector<SheafGenerator>> modules;
  std::map<Chain, AffMat> maps;  // F_I over the chart of I; absent = zero

  size_t rank(VertexId v) const {
    auto it = modules.find(v);
    return it == modules.end() ? 0 : it->second.size();
  }
  std::vector<int> degrees(VertexId v) const {
    std::vector<int> d;
    auto it = modules.find(v);
    if (it != modules.end())
      for (auto& g : it->second) d.push_back(g.degree);
    return d;
  }
  const AffMat* map_at(const Chain& I) const {
    auto it = maps.find(I);
    return it == maps.end() ? nullptr : &it->second;
  }
  AffMat map_or_zero(const ChartRegistry& reg, const Chain& I, Prec E) const {
    if (auto* m = map_at(I)) return *m;
    return AffMat::zero(I, reg.atlas().field, E, rank(I.back()), rank(I.front()));
  }
};

/// A morphism of total degree `degree`: per chain a matrix F(min I) ->
/// F'(max I) of matrix degree (degree + 1 - |I|), over the chart of I.
struct SheafMorphism {
  int degree = 0;
  std::map<Chain, AffMat> components;

  const AffMat* at(const Chain& I) const {
    auto it = components.find(I);
    return it == components.end() ? nullptr : &it->second;
  }
  bool is_zero() const {
    for (auto& [I, m] : components)
      if (!m.is_zero()) return false;
    return true;
  }
  void set(const Chain& I, AffMat m) {
    if (m.is_zero())
      components.erase(I);
    else
      components[I] = std::move(m);
  }
};

/// Truncates every component entry to precision E (used to compare the two
/// sides of an identity at a common window).
inline SheafMorphism morphism_truncate(const ChartRegistry& reg, const SheafMorphism& T,
                                       Prec E) {
  SheafMorphism out;
  out.degree = T.degree;
  for (auto& [I, m] : T.components) {
    AffMat r = m;
    for (auto& row : r.e)
      for (auto& x : row) x = x.truncated(reg, E);
    out.set(I, std::move(r));
  }
  return out;
}

inline SheafMorphism identity_morphism(const ChartRegistry& reg, const TwistedSheaf& F, Prec E) {
  SheafMorphism id;
  id.degree = 0;
  for (auto& [v, gens] : F.modules) {
    Chain I{v};
    AffMat m = AffMat::zero(I, reg.atlas().field, E, gens.size(), gens.size());
    for (size_t k = 0; k < gens.size(); ++k)
      m.e[k][k] = AffinoidElement::constant(reg, I, reg.atlas().field, 1, E);
    id.set(I, std::move(m));
  }
  return id;
}

// ---------------------------------------------------------------------------
// Shape and degree checks

inline ValidationReport sheaf_shape_check(const ChartRegistry& reg, const TwistedSheaf& F) {
  ValidationReport rep;
  for (auto& [I, m] : F.maps) {
    if (!reg.atlas().in_simplex(I)) {
      rep.errors.push_back({"bad chain", chain_str(I), "not contained in a simplex"});
      continue;
    }
    if (m.rows != F.rank(I.back()) || m.cols != F.rank(I.front()))
      rep.errors.push_back({"shape mismatch", chain_str(I), "matrix does not match module ranks"});
    if (m.chart != I)
      rep.errors.push_back({"wrong chart", chain_str(I), "structure map must live on its chain"});
    auto rd = F.degrees(I.back()), cd = F.degrees(I.front());
    int want = 2 - static_cast<int>(I.size());
    for (size_t r = 0; r < m.rows && r < rd.size(); ++r)
      for (size_t c = 0; c < m.cols && c < cd.size(); ++c)
        if (!m.e[r][c].is_zero() && rd[r] != cd[c] + want)
          rep.errors.push_back({"degree mismatch", chain_str(I),
                                "entry (" + std::to_string(r) + "," + std::to_string(c) +
                                    ") violates deg(row) = deg(col) + 2 - |I|"});
  }
  return rep;
}

inline ValidationReport morphism_shape_check(const ChartRegistry& reg, const TwistedSheaf& F,
                                             const TwistedSheaf& G, const SheafMorphism& T) {
  ValidationReport rep;
  for (auto& [I, m] : T.components) {
    if (m.rows != G.rank(I.back()) || m.cols != F.rank(I.front())) {
      rep.errors.push_back({"shape mismatch", chain_str(I), "component shape"});
      continue;
    }
    auto rd = G.degrees(I.back()), cd = F.degrees(I.front());
    int want = T.degree + 1 - static_cast<int>(I.size());
    for (size_t r = 0; r < m.rows; ++r)
      for (size_t c = 0; c < m.cols; ++c)
        if (!m.e[r][c].is_zero() && rd[r] != cd[c] + want)
          rep.errors.push_back({"degree mismatch", chain_str(I),
                                "component violates deg(row) = deg(col) + t + 1 - |I|"});
  }
  return rep;
}

// ---------------------------------------------------------------------------
// The twisted quadratic equation
//
//   sum_{i in I, i interior} (-1)^{|I<=_i| + |a|} F_{I\i} a
//     = sum_{i in I} alpha^v_{I>=_i, I<=_i} F_{I>=_i} F_{I<=_i} a
//
// The (-1)^{|a|} source-degree sign acts as a diagonal operator on the source
// module applied before the matrix; all inner factors restrict to the chart
// of I.

inline Chain chain_lower(const Chain& I, size_t pos) {  // I<=_{I[pos]}
  return Chain(I.begin(), I.begin() + pos + 1);
}
inline Chain chain_upper(const Chain& I, size_t pos) {  // I>=_{I[pos]}
  return Chain(I.begin() + pos, I.end());
}
inline Chain chain_drop(const Chain& I, size_t pos) {
  Chain r = I;
  r.erase(r.begin() + pos);
  return r;
}

/// Left side minus right side of the quadratic equation on one chain.
inline AffMat sheaf_residual(const ChartRegistry& reg, const TwistingCocycle& alpha,
                             const TwistedSheaf& F, const Chain& I, Prec E) {
  const BaseField field = reg.atlas().field;
  const int n = reg.atlas().dimension;
  AffMat res = AffMat::zero(I, field, E, F.rank(I.back()), F.rank(I.front()));
  for (size_t pos = 0; pos < I.size(); ++pos) {
    Chain lo = chain_lower(I, pos), hi = chain_upper(I, pos);
    AffMat a = mat_restrict(reg, F.map_or_zero(reg, hi, E), I);
    AffMat b = mat_restrict(reg, F.map_or_zero(reg, lo, E), I);
    AffMat prod = mat_mul(reg, a, b, E);
    TwistingMonomial tw = alpha.pair_value(n, hi, lo);
    AffinoidElement unit = AffinoidElement::monomial(
        reg, Chain{hi.back()}, field, tw.lambda, tw.cls,
        FieldElem(field, tw.sign), E);
    res = mat_add(reg, res, mat_scale_elem(reg, prod, unit, E));
  }
  for (size_t pos = 1; pos + 1 < I.size(); ++pos) {
    AffMat d = mat_restrict(reg, F.map_or_zero(reg, chain_drop(I, pos), E), I);
    d = mat_col_signs(d, F.degrees(I.front()), field);  // the (-1)^{|a|}
    int sign = pos % 2 ? -1 : 1;                        // -(-1)^{|I<=_i|}
    res = mat_add(reg, res, mat_scale(d, FieldElem(field, sign)));
  }
  return res;
}

/// Checks shapes, degrees and the quadratic equation on every chain; failing
/// chains are reported with the residual.
inline ValidationReport sheaf_validate(const ChartRegistry& reg, const TwistingCocycle& alpha,
                                       const TwistedSheaf& F, Prec E) {
  ValidationReport rep = sheaf_shape_check(reg, F);
  if (!rep.ok()) return rep;
  for (auto& I : enumerate_chains(reg.atlas(), reg.atlas().dimension + 1)) {
    AffMat r = sheaf_residual(reg, alpha, F, I, E);
    if (!r.is_zero()) {
      std::ostringstream os;
      for (size_t i = 0; i < r.rows; ++i)
        for (size_t j = 0; j < r.cols; ++j)
          if (!r.e[i][j].is_zero())
            os << "(" << i << "," << j << ") " << r.e[i][j].str() << "; ";
      rep.errors.push_back({"quadratic equation", chain_str(I), os.str()});
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// mu^2 and mu^1
//
// Sign conventions: mu^2 carries the Koszul exponent (a-1)(|S|+1-b) on the
// split with lower part of size a and upper part of size b.  This is the
// unique convention for which mu^2 is strictly unital and associative and,
// together with the differential below, satisfies the Leibniz rule; the
// sheaf data enters mu^1 through
//     Fhat_I = (-1)^{|I|(|I|+1)/2} F_I Delta,
//     mu^1 T = mu^2(Fhat', T) - (-1)^{|T|} mu^2(T, Fhat) + cech(T),
// where Delta is the source-degree sign and cech carries the exponent
// |I<=_i| + |I| + 1 on the interior element i.

inline SheafMorphism mu2(const ChartRegistry& reg, const TwistingCocycle& alpha,
                         const TwistedSheaf& F, const TwistedSheaf& G, const TwistedSheaf& H,
                         const SheafMorphism& S, const SheafMorphism& T, Prec E) {
  // T: F -> G, S: G -> H
  const BaseField field = reg.atlas().field;
  const int n = reg.atlas().dimension;
  SheafMorphism out;
  out.degree = S.degree + T.degree;
  for (auto& I : enumerate_chains(reg.atlas(), reg.atlas().dimension + 1)) {
    AffMat acc = AffMat::zero(I, field, E, H.rank(I.back()), F.rank(I.front()));
    bool any = false;
    for (size_t pos = 0; pos < I.size(); ++pos) {
      Chain lo = chain_lower(I, pos), hi = chain_upper(I, pos);
      const AffMat* s = S.at(hi);
      const AffMat* t = T.at(lo);
      if (!s || !t) continue;
      any = true;
      AffMat prod = mat_mul(reg, mat_restrict(reg, *s, I), mat_restrict(reg, *t, I), E);
      TwistingMonomial tw = alpha.pair_value(n, hi, lo);
      AffinoidElement unit = AffinoidElement::monomial(reg, Chain{hi.back()}, field, tw.lambda,
                                                       tw.cls, FieldElem(field, tw.sign), E);
      long long a = static_cast<long long>(pos) + 1;
      long long b = static_cast<long long>(I.size() - pos);
      long long exp = (a - 1) * (S.degree + 1 - b);
      AffMat term = mat_scale_elem(reg, prod, unit, E);
      if (exp % 2) term = mat_scale(term, FieldElem(field, -1));
      acc = mat_add(reg, acc, term);
    }
    if (any) out.set(I, std::move(acc));
  }
  return out;
}

namespace detail {

/// One Fhat-against-T term of mu^1 (side: true = Fhat' T, false = T Fhat).
inline void mu1_accumulate(const ChartRegistry& reg, const TwistingCocycle& alpha,
                           const TwistedSheaf& F, const TwistedSheaf& G,
                           const SheafMorphism& T, const Chain& I, Prec E, AffMat& acc) {
  const BaseField field = reg.atlas().field;
  const int n = reg.atlas().dimension;
  for (size_t pos = 0; pos < I.size(); ++pos) {
    Chain lo = chain_lower(I, pos), hi = chain_upper(I, pos);
    long long a = static_cast<long long>(pos) + 1;
    long long b = static_cast<long long>(I.size() - pos);
    TwistingMonomial tw = alpha.pair_value(n, hi, lo);
    AffinoidElement unit = AffinoidElement::monomial(reg, Chain{hi.back()}, field, tw.lambda,
                                                     tw.cls, FieldElem(field, tw.sign), E);
    // Fhat'_hi T_lo: sign (a-1)(2-b) + b(b+1)/2, Delta over G(max lo)
    if (const AffMat* t = T.at(lo)) {
      if (const AffMat* f = G.map_at(hi)) {
        AffMat tt = mat_row_signs(mat_restrict(reg, *t, I), G.degrees(lo.back()), field);
        AffMat prod = mat_mul(reg, mat_restrict(reg, *f, I), tt, E);
        long long exp = (a - 1) * (2 - b) + b * (b + 1) / 2;
        AffMat term = mat_scale_elem(reg, prod, unit, E);
        if (((exp % 2) + 2) % 2) term = mat_scale(term, FieldElem(field, -1));
        acc = mat_add(reg, acc, term);
      }
    }
    // -(-1)^{|T|} T_hi Fhat_lo: sign 1 + |T| + (a-1)(|T|+1-b) + a(a+1)/2,
    // Delta on the source of F_lo
    if (const AffMat* t = T.at(hi)) {
      if (const AffMat* f = F.map_at(lo)) {
        AffMat ff = mat_col_signs(mat_restrict(reg, *f, I), F.degrees(I.front()), field);
        AffMat prod = mat_mul(reg, mat_restrict(reg, *t, I), ff, E);
        long long exp = 1 + T.degree + (a - 1) * (T.degree + 1 - b) + a * (a + 1) / 2;
        AffMat term = mat_scale_elem(reg, prod, unit, E);
        if (((exp % 2) + 2) % 2) term = mat_scale(term, FieldElem(field, -1));
        acc = mat_add(reg, acc, term);
      }
    }
  }
  // cech part: (-1)^{|I<=_i| + |I| + 1} T_{I \ i} for interior i
  for (size_t pos = 1; pos + 1 < I.size(); ++pos) {
    if (const AffMat* t = T.at(chain_drop(I, pos))) {
      long long exp = static_cast<long long>(pos + 1) + static_cast<long long>(I.size()) + 1;
      AffMat term = mat_restrict(reg, *t, I);
      if (exp % 2) term = mat_scale(term, FieldElem(field, -1));
      acc = mat_add(reg, acc, term);
    }
  }
}

}  // namespace detail

/// The differential of the morphism complex Hom(F, G); raises total degree by
/// one, and squares to zero whenever both sheaves satisfy the quadratic
/// equation.
inline SheafMorphism mu1(const ChartRegistry& reg, const TwistingCocycle& alpha,
                         const TwistedSheaf& F, const TwistedSheaf& G, const SheafMorphism& T,
                         Prec E) {
  SheafMorphism out;
  out.degree = T.degree + 1;
  for (auto& I : enumerate_chains(reg.atlas(), reg.atlas().dimension + 1)) {
    AffMat acc = AffMat::zero(I, reg.atlas().field, E, G.rank(I.back()), F.rank(I.front()));
    detail::mu1_accumulate(reg, alpha, F, G, T, I, E, acc);
    if (!acc.is_zero()) out.set(I, std::move(acc));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Line bundles

/// Builds the rank-one sheaf with the given monomial unit transitions (one
/// generator of degree zero per vertex, zero vertex differentials, zero
/// higher maps) and validates the twisted cocycle identity
///   u_ik = alpha^v_ijk u_jk u_ij.
inline std::pair<TwistedSheaf, ValidationReport> line_bundle(
    const ChartRegistry& reg, const TwistingCocycle& alpha,
    const std::map<std::pair<VertexId, VertexId>, AffinoidElement>& transitions, Prec E) {
  TwistedSheaf F;
  for (auto& v : reg.atlas().vertices) F.modules[v.id] = {SheafGenerator{"e", 0}};
  for (auto& [edge, u] : transitions) {
    Chain I{edge.first, edge.second};
    AffMat m = AffMat::zero(I, reg.atlas().field, E, 1, 1);
    m.e[0][0] = restrict(reg, u, I).truncated(reg, E);
    F.maps[I] = std::move(m);
  }
  return {F, sheaf_validate(reg, alpha, F, E)};
}

/// The conversion factor between the two equivalent sign conventions for
/// twisted sheaves: G_I = F_I * prod_{i in I} alpha^v_{min I, i, i_+}.  Only
/// the F convention is used internally.
inline AffinoidElement g_convention_factor(const ChartRegistry& reg, const TwistingCocycle& alpha,
                                           const Chain& I, Prec E) {
  AffinoidElement out = AffinoidElement::constant(reg, I, reg.atlas().field, 1, E);
  for (size_t pos = 0; pos + 1 < I.size(); ++pos)
    out = out.mul(reg, alpha.element(reg, Chain{I.front(), I[pos], I[pos + 1]}, I, E));
  return out;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json sheaf_to_json(const TwistedSheaf& F) {
  nlohmann::json mods = nlohmann::json::array();
  for (auto& [v, gens] : F.modules) {
    nlohmann::json g = nlohmann::json::array();
    for (auto& x : gens) g.push_back({{"label", x.label}, {"degree", x.degree}});
    mods.push_back({{"vertex", v}, {"generators", g}});
  }
  nlohmann::json maps = nlohmann::json::array();
  for (auto& [I, m] : F.maps) {
    nlohmann::json rows = nlohmann::json::array();
    for (auto& r : m.e) {
      nlohmann::json row = nlohmann::json::array();
      for (auto& x : r) row.push_back(x.to_json()["terms"]);
      rows.push_back(row);
    }
    maps.push_back({{"chain", I}, {"matrix", rows}});
  }
  return {{"modules", mods}, {"maps", maps}};
}

inline TwistedSheaf sheaf_from_json(const ChartRegistry& reg, const nlohmann::json& j, Prec E) {
  TwistedSheaf F;
  const BaseField field = reg.atlas().field;
  for (auto& mj : j.at("modules")) {
    std::vector<SheafGenerator> gens;
    for (auto& g : mj.at("generators"))
      gens.push_back({g.at("label").get<std::string>(), g.at("degree").get<int>()});
    F.modules[mj.at("vertex").get<int>()] = std::move(gens);
  }
  for (auto& mj : j.at("maps")) {
    Chain I = mj.at("chain").get<Chain>();
    auto& rows = mj.at("matrix");
    AffMat m = AffMat::zero(I, field, E, rows.size(), rows.empty() ? 0 : rows[0].size());
    for (size_t r = 0; r < m.rows; ++r)
      for (size_t c = 0; c < m.cols; ++c) {
        AffinoidElement x(I, field, E);
        for (auto& t : rows[r][c])
          x.add_term(reg, parse_rat(t.at("t").get<std::string>()), t.at("z").get<ZVec>(),
                     FieldElem(field, parse_rat(t.at("c").get<std::string>())));
        m.e[r][c] = std::move(x);
      }
    F.maps[I] = std::move(m);
  }
  return F;
}

}  // namespace mirror
