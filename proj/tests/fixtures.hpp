// Shared test fixtures: small atlases, line-bundle families, and synthetic
// count ledgers solved by hand from the matching identities.

#pragma once

#include <array>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "mirror/affinoid.hpp"
#include "mirror/atlas.hpp"
#include "mirror/counts.hpp"
#include "mirror/sheaf.hpp"

namespace fixtures {

using namespace mirror;

inline ChartAtlas::Vertex box_vertex(VertexId id, const RVec& q, const Rat& margin) {
  RVec lo = q, hi = q;
  for (auto& c : lo) c -= margin;
  for (auto& c : hi) c += margin;
  return {id, q, Polytope::box(lo, hi)};
}

inline void zero_sections(ChartAtlas& a) {
  for (auto& s : a.simplices)
    for (size_t i = 0; i < s.size(); ++i)
      for (size_t j = i + 1; j < s.size(); ++j)
        a.sections[{s[i], s[j]}] = Section{RVec(a.dimension, Rat(0)), Rat(0)};
}

/// Circle with three charts: q = (0, 1/3, 2/3), intervals of margin 5/12,
/// simplices {01}, {12}, {02}.
inline ChartAtlas circle_atlas() {
  ChartAtlas a;
  a.dimension = 1;
  a.field = BaseField::rationals();
  a.vertices.push_back(box_vertex(0, {Rat(0)}, Rat(5, 12)));
  a.vertices.push_back(box_vertex(1, {Rat(1, 3)}, Rat(5, 12)));
  a.vertices.push_back(box_vertex(2, {Rat(2, 3)}, Rat(5, 12)));
  a.simplices = {{0, 1}, {1, 2}, {0, 2}};
  zero_sections(a);
  return a;
}

/// A single 1-simplex (two charts on a segment of the circle).
inline ChartAtlas interval_atlas() {
  ChartAtlas a;
  a.dimension = 1;
  a.field = BaseField::rationals();
  a.vertices.push_back(box_vertex(0, {Rat(0)}, Rat(5, 12)));
  a.vertices.push_back(box_vertex(1, {Rat(1, 3)}, Rat(5, 12)));
  a.simplices = {{0, 1}};
  zero_sections(a);
  return a;
}

/// One 2-simplex with three box charts (n = 2).
inline ChartAtlas triangle_atlas() {
  ChartAtlas a;
  a.dimension = 2;
  a.field = BaseField::rationals();
  a.vertices.push_back(box_vertex(0, {Rat(0), Rat(0)}, Rat(5, 12)));
  a.vertices.push_back(box_vertex(1, {Rat(1, 3), Rat(0)}, Rat(5, 12)));
  a.vertices.push_back(box_vertex(2, {Rat(0), Rat(1, 3)}, Rat(5, 12)));
  a.simplices = {{0, 1, 2}};
  zero_sections(a);
  return a;
}

/// The N x N grid triangulation of the 2-torus (N >= 3), boxes of margin
/// 5/12 per axis.  Vertex (a, b) has id a + N b.
inline ChartAtlas torus2_atlas(int N = 3) {
  ChartAtlas a;
  a.dimension = 2;
  a.field = BaseField::rationals();
  for (int b = 0; b < N; ++b)
    for (int x = 0; x < N; ++x)
      a.vertices.push_back(box_vertex(x + N * b, {Rat(x, N), Rat(b, N)}, Rat(5, 12)));
  auto id = [&](int x, int y) { return ((x % N + N) % N) + N * ((y % N + N) % N); };
  for (int y = 0; y < N; ++y)
    for (int x = 0; x < N; ++x) {
      Chain t1{id(x, y), id(x + 1, y), id(x + 1, y + 1)};
      Chain t2{id(x, y), id(x, y + 1), id(x + 1, y + 1)};
      std::sort(t1.begin(), t1.end());
      std::sort(t2.begin(), t2.end());
      a.simplices.push_back(t1);
      a.simplices.push_back(t2);
    }
  zero_sections(a);
  return a;
}

/// Freudenthal triangulation of the 3-torus on an N^3 grid; each cube cell is
/// cut into 6 tetrahedra, so 4-chains exist and the cocycle conditions have
/// content.
inline ChartAtlas torus3_atlas(int N = 3) {
  ChartAtlas a;
  a.dimension = 3;
  a.field = BaseField::rationals();
  for (int z = 0; z < N; ++z)
    for (int y = 0; y < N; ++y)
      for (int x = 0; x < N; ++x)
        a.vertices.push_back(
            box_vertex(x + N * (y + N * z), {Rat(x, N), Rat(y, N), Rat(z, N)}, Rat(5, 12)));
  auto id = [&](int x, int y, int z) {
    auto w = [&](int v) { return (v % N + N) % N; };
    return w(x) + N * (w(y) + N * w(z));
  };
  const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  std::set<Chain> simps;
  for (int z = 0; z < N; ++z)
    for (int y = 0; y < N; ++y)
      for (int x = 0; x < N; ++x)
        for (auto& p : perms) {
          int c[3] = {x, y, z};
          Chain t{id(c[0], c[1], c[2])};
          for (int k = 0; k < 3; ++k) {
            ++c[p[k]];
            t.push_back(id(c[0], c[1], c[2]));
          }
          std::sort(t.begin(), t.end());
          simps.insert(t);
        }
  a.simplices.assign(simps.begin(), simps.end());
  zero_sections(a);
  return a;
}

// ---------------------------------------------------------------------------
// Random data

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(unsigned long long seed) : gen(seed) {}

  long long integer(long long lo, long long hi) {
    return std::uniform_int_distribution<long long>(lo, hi)(gen);
  }
  Rat rational(long long num_range = 6, long long den_max = 4) {
    return Rat(integer(-num_range, num_range), integer(1, den_max));
  }
  Rat nonneg_rational(long long num_range = 6, long long den_max = 4) {
    return Rat(integer(0, num_range), integer(1, den_max));
  }
};

/// Random integral-gradient sections and an optional sign cochain; the
/// resulting alpha^v is a cocycle iff v is.
inline void randomize_sections(ChartAtlas& a, Rng& rng) {
  for (auto& [e, s] : a.sections) {
    for (auto& g : s.gradient) g = Rat(rng.integer(-2, 2));
    s.value_at_target = rng.rational();
  }
}

inline NovikovScalar random_scalar(Rng& rng, BaseField f, int terms = 3,
                                   Prec prec = Prec{}) {
  NovikovScalar s(f, prec);
  for (int k = 0; k < terms; ++k)
    s.add_term(rng.nonneg_rational(8, 3), FieldElem(f, rng.rational()));
  return s;
}

/// Monomial unit transitions of a line-bundle family: gauge monomials at the
/// vertices folded against section data, so that the twisted cocycle identity
/// holds by construction.  With f = v = 0 and trivial gauge this is the
/// structure sheaf.
inline std::map<std::pair<VertexId, VertexId>, AffinoidElement> gauged_transitions(
    const ChartRegistry& reg, const std::map<VertexId, std::pair<Rat, ZVec>>& gauge) {
  const ChartAtlas& atlas = reg.atlas();
  std::map<std::pair<VertexId, VertexId>, AffinoidElement> out;
  for (auto& [edge, f] : atlas.sections) {
    Chain I{edge.first, edge.second};
    if (!atlas.in_simplex(I)) continue;
    ZVec df;
    for (auto& c : f.gradient) df.push_back(num(c).convert_to<long long>());
    // u_ij = T^{-f_ij(q_j)} z^{-df_ij}, times gauge_j / gauge_i
    Rat lambda = -f.value_at_target;
    ZVec cls = zneg(df);
    auto gi = gauge.find(edge.first), gj = gauge.find(edge.second);
    if (gj != gauge.end()) {
      lambda += gj->second.first;
      cls = zadd(cls, gj->second.second);
    }
    if (gi != gauge.end()) {
      // the gauge at the source enters through restriction to the edge chart
      lambda -= gi->second.first + dot(reg.atlas().displacement(edge.first, edge.second),
                                       gi->second.second);
      cls = zadd(cls, zneg(gi->second.second));
    }
    out[edge] = AffinoidElement::monomial(reg, I, atlas.field, lambda, cls,
                                          FieldElem::one(atlas.field));
  }
  return out;
}

inline std::map<std::pair<VertexId, VertexId>, AffinoidElement> trivial_transitions(
    const ChartRegistry& reg) {
  return gauged_transitions(reg, {});
}

// ---------------------------------------------------------------------------
// Sheaf zoo for the category tests

/// Rank-two bundle with constant invertible transition matrices G_k G_i^{-1};
/// satisfies the twisted identity for alpha = 1 by telescoping.
inline TwistedSheaf rank2_constant_gauge(const ChartRegistry& reg, Rng& rng, Prec E) {
  const ChartAtlas& atlas = reg.atlas();
  const BaseField f = atlas.field;
  std::map<VertexId, std::array<std::array<Rat, 2>, 2>> G, Ginv;
  for (auto& v : atlas.vertices) {
    // unimodular integer matrix [[1, a], [b, 1 + ab]]
    Rat a(rng.integer(-2, 2)), b(rng.integer(-2, 2));
    G[v.id] = {{{Rat(1), a}, {b, 1 + a * b}}};
    Ginv[v.id] = {{{1 + a * b, -a}, {-b, Rat(1)}}};
  }
  TwistedSheaf F;
  for (auto& v : atlas.vertices)
    F.modules[v.id] = {SheafGenerator{"a", 0}, SheafGenerator{"b", 0}};
  std::set<std::pair<VertexId, VertexId>> edges;
  for (auto& s : atlas.simplices)
    for (size_t i = 0; i < s.size(); ++i)
      for (size_t j = i + 1; j < s.size(); ++j) edges.insert({s[i], s[j]});
  for (auto& [i, j] : edges) {
    Chain I{i, j};
    AffMat m = AffMat::zero(I, f, E, 2, 2);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) {
        Rat v = 0;
        for (int k = 0; k < 2; ++k) v += G[j][r][k] * Ginv[i][k][c];
        if (v != 0) m.e[r][c] = AffinoidElement::constant(reg, I, f, v, E);
      }
    F.maps[I] = std::move(m);
  }
  return F;
}

/// Direct sum of two gauged line bundles with generator degrees 0 and 1.
inline TwistedSheaf graded_sum(const ChartRegistry& reg, Rng& rng, Prec E) {
  const ChartAtlas& atlas = reg.atlas();
  std::map<VertexId, std::pair<Rat, ZVec>> gauge0, gauge1;
  for (auto& v : atlas.vertices) {
    gauge0[v.id] = {rng.nonneg_rational(3, 2), ZVec(atlas.dimension, 0)};
    gauge1[v.id] = {rng.nonneg_rational(3, 2), ZVec(atlas.dimension, 0)};
    gauge0[v.id].second[0] = rng.integer(-1, 1);
    gauge1[v.id].second[0] = rng.integer(-1, 1);
  }
  auto u0 = gauged_transitions(reg, gauge0);
  auto u1 = gauged_transitions(reg, gauge1);
  TwistedSheaf F;
  for (auto& v : atlas.vertices)
    F.modules[v.id] = {SheafGenerator{"a", 0}, SheafGenerator{"b", 1}};
  for (auto& [edge, u] : u0) {
    Chain I{edge.first, edge.second};
    AffMat m = AffMat::zero(I, atlas.field, E, 2, 2);
    m.e[0][0] = restrict(reg, u, I).truncated(reg, E);
    // the source-degree sign in the quadratic equation flips the cocycle
    // relation in odd degrees: w_ik = -alpha w_jk w_ij, solved by -u
    m.e[1][1] = restrict(reg, u1.at(edge), I).truncated(reg, E).scale(
        FieldElem(atlas.field, -1));
    F.maps[I] = std::move(m);
  }
  return F;
}

/// Rank-two sheaf on the interval with a nonzero vertex differential:
/// d_0 = c, d_1 = -c restricted, transitions the identity.
inline TwistedSheaf interval_differential_sheaf(const ChartRegistry& reg, Prec E) {
  const ChartAtlas& atlas = reg.atlas();
  const BaseField f = atlas.field;
  TwistedSheaf F;
  for (auto& v : atlas.vertices)
    F.modules[v.id] = {SheafGenerator{"a", 0}, SheafGenerator{"b", 1}};
  AffinoidElement c =
      AffinoidElement::monomial(reg, Chain{0}, f, Rat(1, 2), ZVec{1}, FieldElem::one(f), E);
  {
    AffMat m = AffMat::zero(Chain{0}, f, E, 2, 2);
    m.e[1][0] = c;
    F.maps[Chain{0}] = std::move(m);
  }
  {
    AffMat m = AffMat::zero(Chain{1}, f, E, 2, 2);
    AffinoidElement cr = restrict(reg, c, Chain{0, 1});
    AffinoidElement c1(Chain{1}, f, E);
    for (auto& [k, v] : cr.terms()) c1.add_term(reg, k.lambda, k.cls, -v);
    m.e[1][0] = c1;
    F.maps[Chain{1}] = std::move(m);
  }
  {
    Chain I{0, 1};
    AffMat m = AffMat::zero(I, f, E, 2, 2);
    m.e[0][0] = AffinoidElement::constant(reg, I, f, 1, E);
    m.e[1][1] = AffinoidElement::constant(reg, I, f, 1, E);
    F.maps[I] = std::move(m);
  }
  return F;
}

/// Random morphism of total degree t: every degree-compatible entry gets a
/// random short series.
inline SheafMorphism random_morphism(const ChartRegistry& reg, const TwistedSheaf& F,
                                     const TwistedSheaf& G, int t, Rng& rng, Prec E) {
  const ChartAtlas& atlas = reg.atlas();
  SheafMorphism T;
  T.degree = t;
  for (auto& I : enumerate_chains(atlas, atlas.dimension + 1)) {
    auto rd = G.degrees(I.back()), cd = F.degrees(I.front());
    if (rd.empty() || cd.empty()) continue;
    int want = t + 1 - static_cast<int>(I.size());
    AffMat m = AffMat::zero(I, atlas.field, E, rd.size(), cd.size());
    bool any = false;
    for (size_t r = 0; r < rd.size(); ++r)
      for (size_t c = 0; c < cd.size(); ++c) {
        if (rd[r] != cd[c] + want) continue;
        if (rng.integer(0, 2) == 0) continue;
        AffinoidElement x(I, atlas.field, E);
        ZVec cls(atlas.dimension, 0);
        cls[0] = rng.integer(-1, 1);
        x.add_term(reg, rng.nonneg_rational(6, 2), cls, FieldElem(atlas.field, rng.rational()));
        m.e[r][c] = std::move(x);
        any = true;
      }
    if (any) T.set(I, std::move(m));
  }
  return T;
}

// ---------------------------------------------------------------------------
// Synthetic identity ledgers
//
// One marked point of degree zero per vertex, one pair generator e, unit
// continuation counts (the constant solutions), identity-type input counts,
// vertex output counts summing to (-1)^{n(n-1)/2}, and the concatenation
// disc counts.  All matching identities hold by construction.

struct IdentitySetup {
  IntersectionData points;
  FormalCountLedger ledger;
};

inline IdentitySetup identity_ledger(const ChartAtlas& atlas) {
  IdentitySetup s;
  for (auto& v : atlas.vertices)
    s.points.points_l[v.id] = {
        {"p" + std::to_string(v.id), 0, RVec(atlas.dimension, Rat(0)), Rat(0)}};
  s.points.pair = {{"e", 0, {}, 0}};

  auto unit = [&](Family fam, const Chain& where) {
    CountEntry e;
    e.family = fam;
    e.where = where;
    e.energy = 0;
    e.boundary = ZVec(atlas.dimension, 0);
    e.count = 1;
    return e;
  };

  std::set<std::pair<VertexId, VertexId>> edges;
  for (auto& sx : atlas.simplices)
    for (size_t i = 0; i < sx.size(); ++i)
      for (size_t j = i + 1; j < sx.size(); ++j) edges.insert({sx[i], sx[j]});
  for (auto& [i, j] : edges) {
    CountEntry e = unit(Family::continuation, Chain{i, j});
    e.from = "p" + std::to_string(i);
    e.to = "p" + std::to_string(j);
    s.ledger.entries.push_back(e);
  }
  for (auto& v : atlas.vertices) {
    CountEntry e = unit(Family::input, Chain{v.id});
    e.from = "p" + std::to_string(v.id);
    e.to = "p" + std::to_string(v.id);
    e.in = {"e"};
    s.ledger.entries.push_back(e);
  }
  // output counts on the vertices, summing to the composition sign
  int sign = ((atlas.dimension * (atlas.dimension - 1) / 2) % 2) ? -1 : 1;
  for (size_t k = 0; k < atlas.vertices.size(); ++k) {
    CountEntry e = unit(Family::output, Chain{atlas.vertices[k].id});
    e.from = "p" + std::to_string(atlas.vertices[k].id);
    e.to = "p" + std::to_string(atlas.vertices[k].id);
    e.out = "e";
    e.count = (k % 2 == 0) ? 1 : -1;  // alternating, adjusted below
    s.ledger.entries.push_back(e);
  }
  {
    // fix the total: sum of vertex output counts = sign
    Rat total = 0;
    for (auto& e : s.ledger.entries)
      if (e.family == Family::output) total += e.count;
    for (auto& e : s.ledger.entries)
      if (e.family == Family::output) {
        e.count += Rat(sign) - total;
        break;
      }
  }
  // mu^2(e, e) = e: trivial concatenation on the one-generator complex
  {
    CountEntry e = unit(Family::disc, Chain{});
    e.out = "e";
    e.in = {"e", "e"};
    s.ledger.entries.push_back(e);
  }
  return s;
}

/// Identity ledger enriched with a degree-one pair generator f and the
/// functor components C^2(f, e) = id, which are the degree-legal discK
/// counts; used for the discK deletion experiment.
inline IdentitySetup identity_ledger_with_disc2(const ChartAtlas& atlas) {
  IdentitySetup s = identity_ledger(atlas);
  // outputs interfere with nothing here; drop them to keep the fixture focused
  std::erase_if(s.ledger.entries,
                [](const CountEntry& e) { return e.family == Family::output; });
  s.points.pair.push_back({"f", 1, {}, 0});
  for (auto& v : atlas.vertices) {
    CountEntry k;
    k.family = Family::discK;
    k.where = Chain{v.id};
    k.from = "p" + std::to_string(v.id);
    k.to = "p" + std::to_string(v.id);
    k.in = {"f", "e"};
    k.energy = 0;
    k.boundary = ZVec(atlas.dimension, 0);
    k.count = 1;
    s.ledger.entries.push_back(k);
  }
  return s;
}

}  // namespace fixtures
