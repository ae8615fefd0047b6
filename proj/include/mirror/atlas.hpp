#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mirror/field.hpp"
#include "mirror/geometry.hpp"
#include "mirror/rational.hpp"

#include <json.hpp>

namespace mirror {

using VertexId = int;

/// A totally ordered subset of the vertex label set, contained in a simplex.
using Chain = std::vector<VertexId>;

/// A strictly nested sequence of chains (an element of the barycentric
/// subdivision of the chain poset), sorted by inclusion.
using BarycentricChain = std::vector<Chain>;

/// A cell of the pairs barycentric subdivision: nested barycentric chains
/// vI inside vJ.  Its dimension is |vJ| - |vI|.
struct PairsBarycentricCell {
  BarycentricChain inner;  // vI
  BarycentricChain outer;  // vJ

  int dim() const { return static_cast<int>(outer.size() - inner.size()); }
  bool operator==(const PairsBarycentricCell&) const = default;
  bool operator<(const PairsBarycentricCell& o) const {
    return std::tie(inner, outer) < std::tie(o.inner, o.outer);
  }
};

inline std::string chain_str(const Chain& c) {
  std::string s = "{";
  for (size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + std::to_string(c[i]);
  return s + "}";
}

inline std::string bchain_str(const BarycentricChain& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "<" : "") + chain_str(v[i]);
  return s;
}

inline bool subset(const Chain& a, const Chain& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

/// Order on chains compatible with nesting: by size, then lexicographic.
/// Barycentric chains are kept sorted this way.
inline bool chain_less(const Chain& a, const Chain& b) {
  return a.size() < b.size() || (a.size() == b.size() && a < b);
}

inline bool subchain(const BarycentricChain& a, const BarycentricChain& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end(), chain_less);
}

struct Violation {
  std::string code;
  std::string where;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> errors;
  std::vector<Violation> warnings;
  bool ok() const { return errors.empty(); }

  nlohmann::json to_json() const {
    auto dump = [](const std::vector<Violation>& vs) {
      nlohmann::json a = nlohmann::json::array();
      for (auto& v : vs) a.push_back({{"code", v.code}, {"where", v.where}, {"detail", v.detail}});
      return a;
    };
    return {{"ok", ok()}, {"errors", dump(errors)}, {"warnings", dump(warnings)}};
  }
};

/// Affine section data on an overlap: f_ij = value at q_j plus a constant
/// gradient.  Only the triple combinations f_ij + f_jk - f_ik are constrained;
/// storing the value at the target pins T-exponents exactly.
struct Section {
  RVec gradient;
  Rat value_at_target;
};

/// A triangulated integral affine torus with charts: ordered vertex labels,
/// basepoints and polytopes in global torus coordinates (identifications
/// between nearby charts are pure translations), per-edge section data, and
/// the Z/2 sign cochain.
class ChartAtlas {
 public:
  struct Vertex {
    VertexId id;
    RVec basepoint;
    Polytope polytope;
  };

  int dimension = 0;
  BaseField field;
  Int lattice_den = 1;  // exponents live on (1/lattice_den) Z
  std::vector<Vertex> vertices;       // sorted by id
  std::vector<Chain> simplices;       // the given (maximal) simplices
  std::map<std::pair<VertexId, VertexId>, Section> sections;
  std::map<Chain, int> sign_cochain;  // triples (i<j<k) -> {0,1}; missing = 0

  const Vertex& vertex(VertexId id) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), id,
                               [](const Vertex& v, VertexId i) { return v.id < i; });
    if (it == vertices.end() || it->id != id)
      throw std::out_of_range("unknown vertex id " + std::to_string(id));
    return *it;
  }

  bool has_vertex(VertexId id) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), id,
                               [](const Vertex& v, VertexId i) { return v.id < i; });
    return it != vertices.end() && it->id == id;
  }

  /// Some given simplex contains c.
  bool in_simplex(const Chain& c) const {
    for (auto& s : simplices)
      if (subset(c, s)) return true;
    return false;
  }

  int sign_value(VertexId i, VertexId j, VertexId k) const {
    auto it = sign_cochain.find(Chain{i, j, k});
    return it == sign_cochain.end() ? 0 : it->second;
  }

  /// Displacement of the lift of q_j into P_i, measured from q_i.  Defined
  /// whenever P_i contains a lift of q_j (validated for vertices sharing a
  /// simplex).
  RVec displacement(VertexId i, VertexId j) const {
    const Vertex &vi = vertex(i), &vj = vertex(j);
    auto m = vi.polytope.lift_into(vj.basepoint);
    if (!m)
      throw std::domain_error("no lift of q_" + std::to_string(j) + " into chart " +
                              std::to_string(i));
    RVec d = sub(vj.basepoint, vi.basepoint);
    for (int k = 0; k < dimension; ++k) d[k] += (*m)[k];
    return d;
  }

  /// f_ij evaluated at the lift of q_k near chart k's frame.
  Rat section_value_at(VertexId i, VertexId j, VertexId k) const {
    auto it = sections.find({i, j});
    if (it == sections.end())
      throw std::out_of_range("no section for edge (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
    // f_ij(q_k) = f_ij(q_j) + <grad, q_k - q_j> with q_j lifted near q_k.
    return it->second.value_at_target - dot(it->second.gradient, displacement(k, j));
  }

  const Section& section(VertexId i, VertexId j) const {
    auto it = sections.find({i, j});
    if (it == sections.end())
      throw std::out_of_range("no section for edge (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
    return it->second;
  }

  /// Chart polytope of a chain: the intersection of the member charts, lifted
  /// into the frame of the largest vertex.  Empty results are validation
  /// errors upstream.
  Polytope chain_polytope(const Chain& I) const {
    VertexId top = I.back();
    Polytope P = vertex(top).polytope;
    for (size_t a = 0; a + 1 < I.size(); ++a) {
      const Vertex& vi = vertex(I[a]);
      // place P_i so that q_i sits at its lift near q_top
      RVec lift = add(vertex(top).basepoint, displacement(top, I[a]));
      auto Q = P.intersect(vi.polytope.translated(sub(lift, vi.basepoint)));
      if (!Q)
        throw std::domain_error("empty chart intersection for chain " + chain_str(I));
      P = *Q;
    }
    return P;
  }

  /// Basepoint of the chain chart (the largest vertex's basepoint).
  const RVec& chain_basepoint(const Chain& I) const { return vertex(I.back()).basepoint; }
};

// ---------------------------------------------------------------------------
// Validation

inline ValidationReport atlas_validate(const ChartAtlas& atlas) {
  ValidationReport rep;
  auto err = [&](std::string code, std::string where, std::string detail) {
    rep.errors.push_back({std::move(code), std::move(where), std::move(detail)});
  };

  for (size_t i = 1; i < atlas.vertices.size(); ++i)
    if (!(atlas.vertices[i - 1].id < atlas.vertices[i].id))
      err("duplicate vertex id", std::to_string(atlas.vertices[i].id), "vertex ids must be distinct");

  for (auto& v : atlas.vertices) {
    if (static_cast<int>(v.basepoint.size()) != atlas.dimension)
      err("bad basepoint", std::to_string(v.id), "dimension mismatch");
    else if (!v.polytope.contains(v.basepoint))
      err("basepoint not in chart", std::to_string(v.id), "q_i must lie in P_i");
    auto overlaps = v.polytope.self_overlaps();
    if (!overlaps.empty())
      err("chart does not embed", std::to_string(v.id),
          "P_i meets an integer translate of itself");
  }

  size_t max_size = 0;
  for (auto& s : atlas.simplices) max_size = std::max(max_size, s.size());
  for (auto& s : atlas.simplices) {
    for (size_t i = 0; i < s.size(); ++i) {
      if (!atlas.has_vertex(s[i])) {
        err("unknown vertex", chain_str(s), "simplex refers to a missing vertex");
        continue;
      }
      if (i > 0 && !(s[i - 1] < s[i]))
        err("unordered simplex", chain_str(s), "vertices must be strictly increasing");
    }
    bool maximal = true;
    for (auto& t : atlas.simplices)
      if (&t != &s && subset(s, t)) maximal = false;
    if (maximal && s.size() != static_cast<size_t>(atlas.dimension) + 1)
      err("maximal simplex size", chain_str(s),
          "expected " + std::to_string(atlas.dimension + 1) + " vertices");
  }
  if (rep.errors.empty()) {
    // Geometric checks need well-formed combinatorics.
    for (auto& s : atlas.simplices) {
      // sigma_I inside P_i, tested by vertex containment of lifts.
      for (auto i : s)
        for (auto j : s) {
          if (!atlas.vertex(i).polytope.lift_into(atlas.vertex(j).basepoint))
            err("simplex not in chart", chain_str(s),
                "no lift of q_" + std::to_string(j) + " into P_" + std::to_string(i));
        }
    }
  }
  if (rep.errors.empty()) {
    for (auto& s : atlas.simplices) {
      // lift consistency: displacements add along the simplex
      for (auto i : s)
        for (auto j : s) {
          if (i == j) continue;
          RVec dij = atlas.displacement(i, j), dji = atlas.displacement(j, i);
          if (!(add(dij, dji) == RVec(atlas.dimension, Rat(0))))
            err("inconsistent chart lifts", chain_str(s),
                "lifts between " + std::to_string(i) + " and " + std::to_string(j) +
                    " disagree");
          for (auto k : s) {
            if (k == i || k == j) continue;
            RVec djk = atlas.displacement(j, k), dik = atlas.displacement(i, k);
            if (!(add(dij, djk) == dik))
              err("inconsistent chart lifts", chain_str(s), "displacements do not add");
          }
        }
      // chart nesting along edges; advisory only, since a cyclic complex
      // cannot nest globally.  Chain charts intersect, which restores
      // soundness of restriction regardless.
      for (size_t a = 0; a < s.size(); ++a)
        for (size_t b = a + 1; b < s.size(); ++b) {
          VertexId i = s[a], j = s[b];
          const Polytope &Pi = atlas.vertex(i).polytope, &Pj = atlas.vertex(j).polytope;
          RVec lift = add(atlas.vertex(i).basepoint, atlas.displacement(i, j));
          Polytope Pj_in_i = Pj.translated(sub(lift, atlas.vertex(j).basepoint));
          bool nested = true;
          for (auto& v : Pj_in_i.vertices())
            if (!Pi.contains(v)) nested = false;
          if (!nested)
            rep.warnings.push_back({"chart not nested",
                                    "(" + std::to_string(i) + "," + std::to_string(j) + ")",
                                    "P_j is not contained in P_i; restriction routes "
                                    "through the chain chart"});
        }
    }
    // sections exist on every edge of a simplex and triple differentials are
    // integral
    std::set<std::pair<VertexId, VertexId>> edges;
    std::set<Chain> triples;
    for (auto& s : atlas.simplices) {
      for (size_t a = 0; a < s.size(); ++a)
        for (size_t b = a + 1; b < s.size(); ++b) {
          edges.insert({s[a], s[b]});
          for (size_t c = b + 1; c < s.size(); ++c) triples.insert(Chain{s[a], s[b], s[c]});
        }
    }
    for (auto& e : edges)
      if (!atlas.sections.count(e))
        err("missing section", "(" + std::to_string(e.first) + "," + std::to_string(e.second) + ")",
            "every edge in a simplex needs f_ij data");
    if (rep.errors.empty()) {
      for (auto& t : triples) {
        RVec g = atlas.section(t[0], t[1]).gradient;
        g = add(g, atlas.section(t[1], t[2]).gradient);
        g = sub(g, atlas.section(t[0], t[2]).gradient);
        for (auto& c : g)
          if (den(c) != 1) {
            err("non-integral cocycle differential", chain_str(t),
                "d(f_ij + f_jk - f_ik) must be an integer vector");
            break;
          }
      }
      // Cech cocycle condition for the sign cochain on 4-chains
      std::set<Chain> quads;
      for (auto& s : atlas.simplices) {
        if (s.size() < 4) continue;
        std::vector<int> idx(s.size());
        for (size_t a = 0; a < s.size(); ++a)
          for (size_t b = a + 1; b < s.size(); ++b)
            for (size_t c = b + 1; c < s.size(); ++c)
              for (size_t d = c + 1; d < s.size(); ++d)
                quads.insert(Chain{s[a], s[b], s[c], s[d]});
      }
      for (auto& q : quads) {
        int dv = atlas.sign_value(q[1], q[2], q[3]) - atlas.sign_value(q[0], q[2], q[3]) +
                 atlas.sign_value(q[0], q[1], q[3]) - atlas.sign_value(q[0], q[1], q[2]);
        if (dv % 2 != 0)
          err("sign cochain not a cocycle", chain_str(q), "delta v is odd on this 4-chain");
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Chain enumeration

/// All chains of length <= max_len contained in a simplex, lexicographically
/// sorted.
inline std::vector<Chain> enumerate_chains(const ChartAtlas& atlas, int max_len) {
  if (max_len < 1) throw std::invalid_argument("max_len must be at least 1");
  std::set<Chain> out;
  for (auto& s : atlas.simplices) {
    size_t n = s.size();
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
      if (std::popcount(mask) > max_len) continue;
      Chain c;
      for (size_t i = 0; i < n; ++i)
        if (mask & (1u << i)) c.push_back(s[i]);
      out.insert(c);
    }
  }
  return {out.begin(), out.end()};
}

/// Chains J containing I with |J| = |I| + 1, still inside a simplex: the
/// codimension-one pieces of the dual cell of I.
inline std::vector<Chain> dual_cell_boundary(const ChartAtlas& atlas, const Chain& I) {
  if (!atlas.in_simplex(I)) throw std::invalid_argument("chain not in any simplex");
  std::set<Chain> out;
  for (auto& s : atlas.simplices) {
    if (!subset(I, s)) continue;
    for (auto v : s) {
      if (std::binary_search(I.begin(), I.end(), v)) continue;
      Chain J = I;
      J.insert(std::upper_bound(J.begin(), J.end(), v), v);
      out.insert(J);
    }
  }
  return {out.begin(), out.end()};
}

/// All nonempty nested sequences of chains (elements of the barycentric
/// subdivision of the chain poset).
inline std::vector<BarycentricChain> enumerate_barycentric_chains(const ChartAtlas& atlas) {
  std::vector<Chain> chains = enumerate_chains(atlas, atlas.dimension + 1);
  // Sort by size so nested sequences are increasing subsequences.
  std::vector<Chain> by_size = chains;
  std::stable_sort(by_size.begin(), by_size.end(),
                   [](const Chain& a, const Chain& b) { return a.size() < b.size(); });
  std::vector<BarycentricChain> out;
  BarycentricChain cur;
  auto rec = [&](auto&& self, size_t start) -> void {
    if (!cur.empty()) out.push_back(cur);
    for (size_t i = start; i < by_size.size(); ++i) {
      if (!cur.empty()) {
        const Chain& prev = cur.back();
        if (by_size[i].size() <= prev.size() || !subset(prev, by_size[i])) continue;
      }
      cur.push_back(by_size[i]);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  for (auto& v : out) std::sort(v.begin(), v.end(), chain_less);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Every pair vI inside vJ; dimension |vJ| - |vI|.
inline std::vector<PairsBarycentricCell> pairs_barycentric_cells(const ChartAtlas& atlas) {
  auto bchains = enumerate_barycentric_chains(atlas);
  std::vector<PairsBarycentricCell> cells;
  for (auto& vJ : bchains) {
    size_t n = vJ.size();
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
      BarycentricChain vI;
      for (size_t i = 0; i < n; ++i)
        if (mask & (1u << i)) vI.push_back(vJ[i]);
      cells.push_back({vI, vJ});
    }
  }
  std::sort(cells.begin(), cells.end());
  return cells;
}

/// Face order of the pairs barycentric subdivision: `face` lies in the closure
/// of `cell` iff vI grows and vJ shrinks.
inline bool is_cell_face(const PairsBarycentricCell& cell, const PairsBarycentricCell& face) {
  return subchain(cell.inner, face.inner) && subchain(face.inner, face.outer) &&
         subchain(face.outer, cell.outer);
}

// ---------------------------------------------------------------------------
// JSON

inline ChartAtlas atlas_from_json(const nlohmann::json& j) {
  ChartAtlas a;
  a.dimension = j.at("dimension").get<int>();
  std::string f = j.value("field", "Q");
  a.field = (f == "Q" || f == "rationals") ? BaseField::rationals()
                                           : BaseField::prime(std::stoull(f));
  a.lattice_den = Int(j.value("lattice_denominator", 1));
  for (auto& vj : j.at("vertices")) {
    ChartAtlas::Vertex v;
    v.id = vj.at("id").get<int>();
    for (auto& c : vj.at("basepoint")) v.basepoint.push_back(parse_rat(c.get<std::string>()));
    std::vector<RVec> pts;
    for (auto& pj : vj.at("polytope").at("vertices")) {
      RVec p;
      for (auto& c : pj) p.push_back(parse_rat(c.get<std::string>()));
      pts.push_back(p);
    }
    v.polytope = Polytope::from_vertices(a.dimension, pts);
    a.vertices.push_back(std::move(v));
  }
  std::sort(a.vertices.begin(), a.vertices.end(),
            [](auto& x, auto& y) { return x.id < y.id; });
  for (auto& sj : j.at("simplices")) a.simplices.push_back(sj.get<Chain>());
  if (j.contains("sections"))
    for (auto& sj : j["sections"]) {
      auto e = sj.at("edge").get<std::vector<int>>();
      Section s;
      for (auto& c : sj.at("gradient")) s.gradient.push_back(parse_rat(c.get<std::string>()));
      s.value_at_target = parse_rat(sj.at("value_at_target").get<std::string>());
      a.sections[{e[0], e[1]}] = s;
    }
  if (j.contains("sign_cocycle"))
    for (auto& sj : j["sign_cocycle"]) {
      auto t = sj.at("triple").get<Chain>();
      a.sign_cochain[t] = sj.at("value").get<int>();
    }
  return a;
}

inline nlohmann::json atlas_to_json(const ChartAtlas& a) {
  nlohmann::json j;
  j["dimension"] = a.dimension;
  j["field"] = a.field.is_rational() ? "Q" : std::to_string(a.field.p);
  j["lattice_denominator"] = a.lattice_den.convert_to<long long>();
  j["vertices"] = nlohmann::json::array();
  for (auto& v : a.vertices) {
    nlohmann::json bp = nlohmann::json::array(), pv = nlohmann::json::array();
    for (auto& c : v.basepoint) bp.push_back(rat_str(c));
    for (auto& p : v.polytope.vertices()) {
      nlohmann::json q = nlohmann::json::array();
      for (auto& c : p) q.push_back(rat_str(c));
      pv.push_back(q);
    }
    j["vertices"].push_back({{"id", v.id}, {"basepoint", bp}, {"polytope", {{"vertices", pv}}}});
  }
  j["simplices"] = a.simplices;
  j["sections"] = nlohmann::json::array();
  for (auto& [e, s] : a.sections) {
    nlohmann::json g = nlohmann::json::array();
    for (auto& c : s.gradient) g.push_back(rat_str(c));
    j["sections"].push_back({{"edge", {e.first, e.second}},
                             {"gradient", g},
                             {"value_at_target", rat_str(s.value_at_target)}});
  }
  j["sign_cocycle"] = nlohmann::json::array();
  for (auto& [t, v] : a.sign_cochain)
    j["sign_cocycle"].push_back({{"triple", t}, {"value", v}});
  return j;
}

}  // namespace mirror
