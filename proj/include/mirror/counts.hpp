#pragma once

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mirror/barcode.hpp"
#include "mirror/sheaf.hpp"

#include <json.hpp>

namespace mirror {

// ---------------------------------------------------------------------------
// Intersection data and formal count ledgers
//
// Curve counts are inputs, never computed: the contract of this module is
// that, given counts, the structural identities hold iff the residual
// evaluators vanish.

struct MarkedPoint {
  std::string label;
  int degree = 0;       // Maslov degree
  RVec g_gradient;      // dg_x
  Rat g_value = 0;      // g_x at the vertex basepoint
};

struct IntersectionData {
  std::map<VertexId, std::vector<MarkedPoint>> points_l;   // L with the fibres
  std::map<VertexId, std::vector<MarkedPoint>> points_lp;  // L' with the fibres
  std::vector<MarkedPoint> pair;                           // generators of CF(L, L')

  const std::vector<MarkedPoint>& at(VertexId v, bool prime) const {
    static const std::vector<MarkedPoint> none;
    auto& m = prime ? points_lp : points_l;
    auto it = m.find(v);
    return it == m.end() ? none : it->second;
  }
  std::optional<size_t> index_of(VertexId v, bool prime, const std::string& label) const {
    auto& pts = at(v, prime);
    for (size_t i = 0; i < pts.size(); ++i)
      if (pts[i].label == label) return i;
    return std::nullopt;
  }
  /// When no L' points are given the pair is (L, L): the endomorphism setup
  /// of the A-infinity functor.
  bool has_prime() const { return !points_lp.empty(); }

  const MarkedPoint* pair_point(const std::string& label) const {
    for (auto& p : pair)
      if (p.label == label) return &p;
    return nullptr;
  }
  std::optional<int> degree_at(VertexId v, bool prime, const std::string& label) const {
    auto i = index_of(v, prime, label);
    if (!i) return std::nullopt;
    return at(v, prime)[*i].degree;
  }
};

enum class Family { strip, continuation, input, output, disc, discK, annulus };

inline std::string family_name(Family f) {
  switch (f) {
    case Family::strip: return "strip";
    case Family::continuation: return "continuation";
    case Family::input: return "input";
    case Family::output: return "output";
    case Family::disc: return "disc";
    case Family::discK: return "discK";
    default: return "annulus";
  }
}

struct CountEntry {
  Family family = Family::strip;
  Chain where;                    // vertex or chain; empty for disc/annulus
  std::string to, from;           // endpoint labels (see each family)
  std::vector<std::string> in;    // pair-point inputs (disc, discK)
  std::string out;                // pair-point output (output, disc, annulus)
  bool prime = false;             // strip/continuation: side L' instead of L
  Rat energy = 0;
  ZVec boundary;                  // lattice class, where applicable
  Rat count = 0;

  std::string describe() const {
    std::ostringstream os;
    os << family_name(family);
    if (!where.empty()) os << chain_str(where);
    if (prime) os << "'";
    os << "(" << to;
    for (auto& x : in) os << "," << x;
    if (!out.empty()) os << "," << out;
    if (!from.empty()) os << ";" << from;
    os << ")";
    return os.str();
  }
};

struct FormalCountLedger {
  std::vector<CountEntry> entries;
};

// ---------------------------------------------------------------------------
// Degree filters
//
//   strip:        deg(to) - deg(from) - 1 = 0
//   continuation: deg(to) - deg(from) + |K| - 2 = 0
//   input:        deg(to) - deg(in) - deg(from) + |K| - 1 = 0
//   output:       deg(from) + deg(out) - deg(to) + 1 - |I| = 0
//   disc(d):      deg(out) - sum deg(in) - 2 + d = 0
//   discK(d):     deg(to) - deg(from) - sum deg(in) - 2 + |K| + d = 0
//   annulus:      deg(to) - deg(from) + 1 = 0
//
// The output filter is the rigid-count condition for the moduli with one
// output marked point over the maximal nested sequences on I; equivalently it
// makes the map to the Floer complex degree-preserving.

inline std::optional<int> entry_filter_defect(const IntersectionData& pts,
                                              const CountEntry& e) {
  auto deg_v = [&](VertexId v, bool prime, const std::string& l) {
    return pts.degree_at(v, prime, l);
  };
  auto deg_p = [&](const std::string& l) -> std::optional<int> {
    const MarkedPoint* p = pts.pair_point(l);
    if (!p) return std::nullopt;
    return p->degree;
  };
  int len = static_cast<int>(e.where.size());
  switch (e.family) {
    case Family::strip: {
      auto a = deg_v(e.where.at(0), e.prime, e.to), b = deg_v(e.where.at(0), e.prime, e.from);
      if (!a || !b) return std::nullopt;
      return *a - *b - 1;
    }
    case Family::continuation: {
      auto a = deg_v(e.where.back(), e.prime, e.to), b = deg_v(e.where.front(), e.prime, e.from);
      if (!a || !b) return std::nullopt;
      return *a - *b + len - 2;
    }
    case Family::input: {
      auto a = deg_v(e.where.back(), pts.has_prime(), e.to),
           b = deg_v(e.where.front(), false, e.from);
      auto p = deg_p(e.in.at(0));
      if (!a || !b || !p) return std::nullopt;
      return *a - *p - *b + len - 1;
    }
    case Family::output: {
      auto a = deg_v(e.where.front(), false, e.from),
           b = deg_v(e.where.back(), pts.has_prime(), e.to);
      auto p = deg_p(e.out);
      if (!a || !b || !p) return std::nullopt;
      return *a + *p - *b + 1 - len;
    }
    case Family::disc: {
      auto o = deg_p(e.out);
      if (!o) return std::nullopt;
      int s = 0;
      for (auto& l : e.in) {
        auto d = deg_p(l);
        if (!d) return std::nullopt;
        s += *d;
      }
      return *o - s - 2 + static_cast<int>(e.in.size());
    }
    case Family::discK: {
      auto a = deg_v(e.where.back(), false, e.to), b = deg_v(e.where.front(), false, e.from);
      if (!a || !b) return std::nullopt;
      int s = 0;
      for (auto& l : e.in) {
        auto d = deg_p(l);
        if (!d) return std::nullopt;
        s += *d;
      }
      return *a - *b - s - 2 + len + static_cast<int>(e.in.size());
    }
    default: {  // annulus homotopy counts
      auto a = deg_p(e.to), b = deg_p(e.from);
      if (!a || !b) return std::nullopt;
      return *a - *b + 1;
    }
  }
}

inline ValidationReport ledger_validate(const ChartRegistry& reg, const IntersectionData& pts,
                                        const FormalCountLedger& ledger) {
  ValidationReport rep;
  const int n = reg.atlas().dimension;
  for (size_t k = 0; k < ledger.entries.size(); ++k) {
    const CountEntry& e = ledger.entries[k];
    std::string where = "#" + std::to_string(k) + " " + e.describe();
    if (!e.where.empty() && !reg.atlas().in_simplex(e.where)) {
      rep.errors.push_back({"bad chain", where, "not contained in a simplex"});
      continue;
    }
    if (e.energy < 0)
      rep.errors.push_back({"negative energy", where, rat_str(e.energy)});
    if (!e.boundary.empty() && static_cast<int>(e.boundary.size()) != n)
      rep.errors.push_back({"bad boundary class", where, "dimension mismatch"});
    auto defect = entry_filter_defect(pts, e);
    if (!defect)
      rep.errors.push_back({"unknown label", where, "an endpoint label does not exist"});
    else if (*defect != 0)
      rep.errors.push_back({"degree filter", where,
                            "dimension formula off by " + std::to_string(*defect)});
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Building the sheaves and the maps

/// Formal Floer cochains: finite combinations of pair points over Novikov
/// scalars.
using Cochain = std::map<std::string, NovikovScalar>;

inline void cochain_add(Cochain& a, const std::string& l, const NovikovScalar& s) {
  auto it = a.find(l);
  if (it == a.end()) {
    if (!s.is_zero()) a[l] = s;
    return;
  }
  NovikovScalar r = it->second + s;
  if (r.is_zero())
    a.erase(it);
  else
    it->second = r;
}

inline Cochain cochain_sub(const Cochain& a, const Cochain& b) {
  Cochain r = a;
  for (auto& [l, s] : b) cochain_add(r, l, -s);
  return r;
}

inline bool cochain_zero(const Cochain& a) {
  for (auto& [l, s] : a)
    if (!s.is_zero()) return false;
  return true;
}

inline SheafMorphism morphism_sub(const ChartRegistry& reg, const SheafMorphism& a,
                                  const SheafMorphism& b) {
  SheafMorphism r = a;
  for (auto& [I, m] : b.components) {
    if (auto* cur = r.at(I)) {
      AffMat s = *cur;
      for (size_t i = 0; i < s.rows; ++i)
        for (size_t j = 0; j < s.cols; ++j) s.e[i][j] = s.e[i][j].sub(reg, m.e[i][j]);
      r.set(I, std::move(s));
    } else {
      AffMat s = m;
      for (auto& row : s.e)
        for (auto& x : row) x = -x;
      r.set(I, std::move(s));
    }
  }
  return r;
}

inline SheafMorphism morphism_axpy(const ChartRegistry& reg, SheafMorphism r,
                                   const NovikovScalar& c, const SheafMorphism& b) {
  for (auto& [I, m] : b.components) {
    AffMat scaled = m;
    for (auto& row : scaled.e)
      for (auto& x : row) x = x.scale(reg, c);
    if (auto* cur = r.at(I)) {
      AffMat s = *cur;
      for (size_t i = 0; i < s.rows; ++i)
        for (size_t j = 0; j < s.cols; ++j) s.e[i][j] = s.e[i][j].add(reg, scaled.e[i][j]);
      r.set(I, std::move(s));
    } else {
      r.set(I, std::move(scaled));
    }
  }
  return r;
}

/// Everything needed to evaluate the maps between the Floer complex and the
/// morphism complex out of a validated ledger.
class CountSystem {
 public:
  CountSystem(const ChartRegistry& reg, const TwistingCocycle& alpha, IntersectionData pts,
              FormalCountLedger ledger, Prec E)
      : reg_(&reg), alpha_(&alpha), pts_(std::move(pts)), ledger_(std::move(ledger)), E_(E) {
    build_sheaf(F_, false);
    if (pts_.has_prime())
      build_sheaf(G_, true);
    else
      G_ = F_;  // endomorphism setup: the pair is (L, L)
  }

  const ChartRegistry& reg() const { return *reg_; }
  const TwistingCocycle& alpha() const { return *alpha_; }
  const IntersectionData& points() const { return pts_; }
  const TwistedSheaf& sheaf_l() const { return F_; }
  const TwistedSheaf& sheaf_lp() const { return G_; }
  Prec precision() const { return E_; }

  /// F(L) or F(L') assembled from strip and continuation counts with the
  /// section prefactor T^{f_{min,max}(q_max)} z^{df - dg_to + dg_from}.
  ValidationReport sheaf_report(bool prime) const {
    return sheaf_validate(*reg_, *alpha_, prime ? G_ : F_, E_);
  }

  /// The degree-preserving map CF(L,L') -> Hom(F(L), F(L')) on a pair point:
  /// components from input counts with coefficient T^energy z^boundary.
  SheafMorphism cech_of(const std::string& pair_label) const {
    const MarkedPoint* p = pts_.pair_point(pair_label);
    if (!p) throw std::invalid_argument("unknown pair point " + pair_label);
    SheafMorphism T;
    T.degree = p->degree;
    for (auto& e : ledger_.entries) {
      if (e.family != Family::input || e.in.at(0) != pair_label) continue;
      if (entry_filter_defect(pts_, e) != std::optional<int>(0)) continue;
      add_matrix_entry(T, e, pts_.has_prime());
    }
    return T;
  }

  /// C^d from discK counts, on a tuple of pair labels (a_d, ..., a_1).
  SheafMorphism cech_d(const std::vector<std::string>& tuple) const {
    if (tuple.size() == 1) return cech_of(tuple[0]);
    int deg = 1 - static_cast<int>(tuple.size());
    for (auto& l : tuple) {
      const MarkedPoint* p = pts_.pair_point(l);
      if (!p) throw std::invalid_argument("unknown pair point " + l);
      deg += p->degree;
    }
    SheafMorphism T;
    T.degree = deg;
    for (auto& e : ledger_.entries) {
      if (e.family != Family::discK || e.in != tuple) continue;
      if (entry_filter_defect(pts_, e) != std::optional<int>(0)) continue;
      add_matrix_entry(T, e, false);
    }
    return T;
  }

  /// mu^d of the Floer A-infinity structure, from disc counts.
  Cochain mu_d(const std::vector<std::string>& tuple) const {
    Cochain out;
    for (auto& e : ledger_.entries) {
      if (e.family != Family::disc || e.in != tuple) continue;
      if (entry_filter_defect(pts_, e) != std::optional<int>(0)) continue;
      cochain_add(out, e.out,
                  NovikovScalar::monomial(field(), e.energy, FieldElem(field(), e.count), E_));
    }
    return out;
  }

  Cochain mu1_cf(const Cochain& c) const {
    Cochain out;
    for (auto& [l, s] : c)
      for (auto& [l2, s2] : mu_d({l})) cochain_add(out, l2, (s * s2).truncated(E_));
    return out;
  }

  /// The homotopy built from annulus counts.
  Cochain homotopy(const Cochain& c) const {
    Cochain out;
    for (auto& [l, s] : c)
      for (auto& e : ledger_.entries) {
        if (e.family != Family::annulus || e.from != l) continue;
        if (entry_filter_defect(pts_, e) != std::optional<int>(0)) continue;
        cochain_add(out, e.to,
                    (s * NovikovScalar::monomial(field(), e.energy, FieldElem(field(), e.count),
                                                 E_))
                        .truncated(E_));
      }
    return out;
  }

  /// P on a single morphism-complex monomial: output counts on the chain with
  /// matching endpoint generators and boundary class gamma; the trace pairing
  /// kills every other basis element.
  Cochain floer_map(const SheafMorphism& T) const {
    Cochain out;
    for (auto& [I, m] : T.components) {
      for (auto& e : ledger_.entries) {
        if (e.family != Family::output || e.where != I) continue;
        if (entry_filter_defect(pts_, e) != std::optional<int>(0)) continue;
        auto src = pts_.index_of(I.front(), false, e.from);
        auto tgt = pts_.index_of(I.back(), pts_.has_prime(), e.to);
        if (!src || !tgt) continue;
        const AffinoidElement& x = m.e[*tgt][*src];
        for (auto& [key, coef] : x.terms()) {
          if (key.cls != e.boundary) continue;
          cochain_add(out, e.out,
                      NovikovScalar::monomial(field(), key.lambda + e.energy,
                                              coef * FieldElem(field(), e.count), E_));
        }
      }
    }
    return out;
  }

  // -- residuals ------------------------------------------------------------

  /// mu^1(C x) - C(mu^1 x) as a morphism; zero for a consistent ledger.
  SheafMorphism cech_residual(const std::string& pair_label) const {
    SheafMorphism lhs = mu1(*reg_, *alpha_, F_, G_, cech_of(pair_label), E_);
    SheafMorphism rhs;
    rhs.degree = lhs.degree;
    for (auto& [l, s] : mu_d({pair_label}))
      rhs = morphism_axpy(*reg_, std::move(rhs), s, cech_of(l));
    return morphism_sub(*reg_, lhs, rhs);
  }

  /// mu^1_CF(P xi) - P(mu^1 xi) on a single morphism monomial xi.
  Cochain floer_residual(const SheafMorphism& xi) const {
    Cochain lhs = mu1_cf(floer_map(xi));
    Cochain rhs = floer_map(mu1(*reg_, *alpha_, F_, G_, xi, E_));
    return cochain_sub(lhs, rhs);
  }

  /// P(C x) - (-1)^{n(n-1)/2} x - mu^1 h(x) - h(mu^1 x) per pair point.
  Cochain composition_defect(const std::string& pair_label) const {
    const int n = reg_->atlas().dimension;
    Cochain out = floer_map(cech_of(pair_label));
    int s = ((n * (n - 1) / 2) % 2) ? -1 : 1;
    cochain_add(out, pair_label,
                NovikovScalar::monomial(field(), 0, FieldElem(field(), -s), E_));
    Cochain single{{pair_label, NovikovScalar::one(field()).truncated(E_)}};
    for (auto& [l, v] : mu1_cf(homotopy(single))) cochain_add(out, l, -v);
    for (auto& [l, v] : homotopy(mu1_cf(single))) cochain_add(out, l, -v);
    return out;
  }

  // -- A-infinity checks ----------------------------------------------------

  /// sum over insertions of (-1)^{maslov} mu(..., mu(...), ...); zero iff the
  /// disc counts satisfy the A-infinity relations up to arity d.
  Cochain ainfty_relation(const std::vector<std::string>& tuple) const {
    Cochain out;
    const int d = static_cast<int>(tuple.size());
    for (int d1 = 1; d1 <= d; ++d1)
      for (int j = 0; j + d1 <= d; ++j) {
        int sgn = koszul_sign(tuple, j);
        // inner mu^{d1} on a_{j+d1} ... a_{j+1}; tuple stored (a_d ... a_1)
        std::vector<std::string> inner(tuple.end() - j - d1, tuple.end() - j);
        Cochain mid = mu_d(inner);
        for (auto& [l, s] : mid) {
          std::vector<std::string> outer(tuple.begin(), tuple.end() - j - d1);
          outer.push_back(l);
          for (size_t k = tuple.size() - j; k < tuple.size(); ++k) outer.push_back(tuple[k]);
          for (auto& [l2, s2] : mu_d(outer)) {
            NovikovScalar v = (s * s2).truncated(E_);
            cochain_add(out, l2, sgn < 0 ? -v : v);
          }
        }
      }
    return out;
  }

  /// Residual of the A-infinity homomorphism equation on a tuple.
  SheafMorphism ainfty_hom_residual(const std::vector<std::string>& tuple) const {
    const int d = static_cast<int>(tuple.size());
    SheafMorphism lhs = mu1(*reg_, *alpha_, F_, G_, cech_d(tuple), E_);
    for (int d1 = 1; d1 < d; ++d1) {
      std::vector<std::string> right(tuple.end() - d1, tuple.end());
      std::vector<std::string> left(tuple.begin(), tuple.end() - d1);
      SheafMorphism prod =
          mu2(*reg_, *alpha_, F_, G_, G_, cech_d(left), cech_d(right), E_);
      lhs = morphism_axpy(*reg_, std::move(lhs), NovikovScalar::one(field()).truncated(E_), prod);
    }
    SheafMorphism rhs;
    rhs.degree = lhs.degree;
    for (int d1 = 1; d1 <= d; ++d1)
      for (int j = 0; j + d1 <= d; ++j) {
        int sgn = koszul_sign(tuple, j);
        std::vector<std::string> inner(tuple.end() - j - d1, tuple.end() - j);
        for (auto& [l, s] : mu_d(inner)) {
          std::vector<std::string> outer(tuple.begin(), tuple.end() - j - d1);
          outer.push_back(l);
          for (size_t k = tuple.size() - j; k < tuple.size(); ++k) outer.push_back(tuple[k]);
          NovikovScalar v = sgn < 0 ? -s : s;
          rhs = morphism_axpy(*reg_, std::move(rhs), v.truncated(E_), cech_d(outer));
        }
      }
    return morphism_sub(*reg_, lhs, rhs);
  }

 private:
  BaseField field() const { return reg_->atlas().field; }

  /// (-1)^{sum_{i<=j} (deg a_i - 1)} with the tuple stored (a_d, ..., a_1).
  int koszul_sign(const std::vector<std::string>& tuple, int j) const {
    int s = 0;
    for (int i = 0; i < j; ++i) {
      const MarkedPoint* p = pts_.pair_point(tuple[tuple.size() - 1 - i]);
      s += p->degree - 1;
    }
    return (s % 2 + 2) % 2 ? -1 : 1;
  }

  void build_sheaf(TwistedSheaf& F, bool prime) {
    auto& pts = prime ? pts_.points_lp : pts_.points_l;
    for (auto& v : reg_->atlas().vertices) {
      std::vector<SheafGenerator> gens;
      auto it = pts.find(v.id);
      if (it != pts.end())
        for (auto& p : it->second) gens.push_back({p.label, p.degree});
      F.modules[v.id] = std::move(gens);
    }
    for (auto& e : ledger_.entries) {
      if (e.prime != prime) continue;
      if (e.family != Family::strip && e.family != Family::continuation) continue;
      if (entry_filter_defect(pts_, e) != std::optional<int>(0)) continue;
      Chain I = e.where;
      auto src = pts_.index_of(I.front(), prime, e.from);
      auto tgt = pts_.index_of(I.back(), prime, e.to);
      if (!src || !tgt) continue;
      auto it = F.maps.find(I);
      if (it == F.maps.end()) {
        F.maps[I] = AffMat::zero(I, field(), E_, F.rank(I.back()), F.rank(I.front()));
        it = F.maps.find(I);
      }
      AffinoidElement add = AffinoidElement::monomial(
          *reg_, I, field(), e.energy, e.boundary.empty() ? ZVec(reg_->atlas().dimension, 0)
                                                          : e.boundary,
          FieldElem(field(), e.count), E_);
      if (e.family == Family::continuation && I.size() >= 2)
        add = add.mul(*reg_, prefactor(I, prime, e.to, e.from));
      it->second.e[*tgt][*src] = it->second.e[*tgt][*src].add(*reg_, add);
    }
    for (auto it = F.maps.begin(); it != F.maps.end();)
      it = it->second.is_zero() ? F.maps.erase(it) : std::next(it);
  }

  /// T^{f_{min,max}(q_max)} z^{df - dg_to + dg_from} on the chain's chart.
  AffinoidElement prefactor(const Chain& I, bool prime, const std::string& to,
                            const std::string& from) const {
    const Section& f = reg_->atlas().section(I.front(), I.back());
    const MarkedPoint& py = pts_.at(I.back(), prime)[*pts_.index_of(I.back(), prime, to)];
    const MarkedPoint& px = pts_.at(I.front(), prime)[*pts_.index_of(I.front(), prime, from)];
    RVec g = f.gradient;
    g = ::mirror::sub(g, py.g_gradient);
    g = ::mirror::add(g, px.g_gradient);
    ZVec cls;
    for (auto& c : g) {
      if (den(c) != 1)
        throw std::domain_error("prefactor class df - dg_to + dg_from is not integral on " +
                                chain_str(I));
      cls.push_back(num(c).convert_to<long long>());
    }
    return AffinoidElement::monomial(*reg_, I, field(), f.value_at_target, cls,
                                     FieldElem::one(field()), E_);
  }

  /// Adds an input or discK count into a morphism component matrix.
  void add_matrix_entry(SheafMorphism& T, const CountEntry& e, bool prime_target) const {
    Chain I = e.where;
    auto src = pts_.index_of(I.front(), false, e.from);
    auto tgt = pts_.index_of(I.back(), prime_target, e.to);
    if (!src || !tgt) return;
    const TwistedSheaf& tgt_sheaf = prime_target ? G_ : F_;
    AffMat* m;
    auto it = T.components.find(I);
    if (it == T.components.end()) {
      T.components[I] =
          AffMat::zero(I, field(), E_, tgt_sheaf.rank(I.back()), F_.rank(I.front()));
      m = &T.components[I];
    } else {
      m = &it->second;
    }
    AffinoidElement add = AffinoidElement::monomial(
        *reg_, I, field(), e.energy,
        e.boundary.empty() ? ZVec(reg_->atlas().dimension, 0) : e.boundary,
        FieldElem(field(), e.count), E_);
    m->e[*tgt][*src] = m->e[*tgt][*src].add(*reg_, add);
  }

  const ChartRegistry* reg_;
  const TwistingCocycle* alpha_;
  IntersectionData pts_;
  FormalCountLedger ledger_;
  Prec E_;
  TwistedSheaf F_, G_;
};

// ---------------------------------------------------------------------------
// JSON

inline IntersectionData intersections_from_json(const nlohmann::json& j) {
  IntersectionData pts;
  auto load_side = [&](const char* key, std::map<VertexId, std::vector<MarkedPoint>>& into) {
    if (!j.contains(key)) return;
    for (auto& p : j[key]) {
      MarkedPoint m;
      m.label = p.at("label").get<std::string>();
      m.degree = p.at("degree").get<int>();
      if (p.contains("g_gradient"))
        for (auto& c : p["g_gradient"]) m.g_gradient.push_back(parse_rat(c.get<std::string>()));
      if (p.contains("g_value")) m.g_value = parse_rat(p["g_value"].get<std::string>());
      into[p.at("vertex").get<int>()].push_back(std::move(m));
    }
  };
  load_side("L", pts.points_l);
  load_side("Lp", pts.points_lp);
  if (j.contains("pair"))
    for (auto& p : j["pair"])
      pts.pair.push_back(
          {p.at("label").get<std::string>(), p.at("degree").get<int>(), {}, 0});
  return pts;
}

inline FormalCountLedger ledger_from_json(const nlohmann::json& j) {
  FormalCountLedger ledger;
  for (auto& ej : j) {
    CountEntry e;
    std::string fam = ej.at("family").get<std::string>();
    if (fam == "strip") e.family = Family::strip;
    else if (fam == "continuation") e.family = Family::continuation;
    else if (fam == "input") e.family = Family::input;
    else if (fam == "output") e.family = Family::output;
    else if (fam == "disc") e.family = Family::disc;
    else if (fam == "discK") e.family = Family::discK;
    else if (fam == "annulus") e.family = Family::annulus;
    else throw std::invalid_argument("unknown count family " + fam);
    if (ej.contains("where")) e.where = ej["where"].get<Chain>();
    auto& labels = ej.at("labels");
    if (labels.contains("to")) e.to = labels["to"].get<std::string>();
    if (labels.contains("from")) e.from = labels["from"].get<std::string>();
    if (labels.contains("in")) {
      if (labels["in"].is_array())
        e.in = labels["in"].get<std::vector<std::string>>();
      else
        e.in = {labels["in"].get<std::string>()};
    }
    if (labels.contains("out")) e.out = labels["out"].get<std::string>();
    if (labels.contains("side")) e.prime = labels["side"].get<std::string>() == "L'";
    e.energy = parse_rat(ej.value("energy", "0"));
    if (ej.contains("boundary")) e.boundary = ej["boundary"].get<ZVec>();
    e.count = parse_rat(ej.at("count").get<std::string>());
    ledger.entries.push_back(std::move(e));
  }
  return ledger;
}

}  // namespace mirror
