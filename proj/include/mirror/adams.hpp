#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mirror/atlas.hpp"
#include "mirror/rational.hpp"

#include <json.hpp>

namespace mirror {

// ---------------------------------------------------------------------------
// Adams path evaluation
//
// The family of broken paths through the d-simplex parametrised by the
// (d-1)-cube: r in [0,1]^{d-1}, s in [0, sum r_i + 1].  The path starts at the
// initial vertex, heads toward vertex j during phase j, and drops anchor at
// vertex j when r_j = 1.

inline RVec adams_path_eval(const std::vector<Rat>& r, const Rat& s) {
  const size_t d = r.size() + 1;
  Rat total = 1;
  for (auto& x : r) {
    if (x < 0 || x > 1) throw std::invalid_argument("cube coordinate out of [0,1]");
    total += x;
  }
  if (s < 0 || s > total) throw std::invalid_argument("path time out of range");

  // anchor points p^(j): p^(0) = e_0, p^(j) = (1-r_j) p^(j-1) + r_j e_j
  RVec p(d + 1, Rat(0));
  p[0] = 1;
  Rat used = 0;
  for (size_t j = 1; j <= d; ++j) {
    Rat len = (j < d) ? r[j - 1] : Rat(1);
    Rat sj = s - used;
    if (sj <= len || j == d) {
      RVec out(d + 1, Rat(0));
      for (size_t k = 0; k < j; ++k) out[k] = (1 - sj) * p[k];
      out[j] = sj;
      return out;
    }
    used += len;
    for (size_t k = 0; k < j; ++k) p[k] = (1 - len) * p[k];
    p[j] = len;
  }
  return p;  // unreachable
}

// ---------------------------------------------------------------------------
// Cube labels

enum class CubeKind { plain, prism, input, output };

/// A compactified Adams moduli cube.  The ground set is a totally ordered list
/// of printable labels:
///   plain   - a chain K; coordinates indexed by K minus its endpoints
///   prism   - a set (K-, K+), all "+" labels before all "-" labels
///   input   - a nested sequence vK; coordinates indexed by all but the last
///   output  - a nested sequence vK; coordinates indexed by all but the first
/// Plain cubes may carry marked boundary points (`marked`).
struct AdamsCube {
  CubeKind kind = CubeKind::plain;
  std::vector<std::string> labels;
  int marked = 0;

  int size() const { return static_cast<int>(labels.size()); }
  bool empty_curve() const {
    return (kind == CubeKind::plain || kind == CubeKind::prism) && size() <= 1;
  }
  int dim() const {
    switch (kind) {
      case CubeKind::plain:
      case CubeKind::prism:
        return std::max(0, size() - 2);
      default:
        return size() - 1;
    }
  }
  /// Indices of the coordinate labels.
  std::vector<int> coordinate_indices() const {
    std::vector<int> v;
    switch (kind) {
      case CubeKind::plain:
      case CubeKind::prism:
        for (int i = 1; i + 1 < size(); ++i) v.push_back(i);
        break;
      case CubeKind::input:
        for (int i = 0; i + 1 < size(); ++i) v.push_back(i);
        break;
      case CubeKind::output:
        for (int i = 1; i < size(); ++i) v.push_back(i);
        break;
    }
    return v;
  }
  /// Index forced into every stratum's lower set besides the coordinates.
  std::vector<int> pinned_indices() const {
    switch (kind) {
      case CubeKind::plain:
      case CubeKind::prism:
        return size() == 1 ? std::vector<int>{0} : std::vector<int>{0, size() - 1};
      case CubeKind::input:
        return {size() - 1};
      default:
        return {0};
    }
  }
  std::string str() const {
    static const char* names[] = {"A", "A", "Ain", "Aou"};
    std::string s = names[static_cast<int>(kind)];
    s += "(";
    for (size_t i = 0; i < labels.size(); ++i) s += (i ? " " : "") + labels[i];
    s += ")";
    if (marked) s += "^" + std::to_string(marked);
    return s;
  }
  bool operator==(const AdamsCube&) const = default;

  static AdamsCube plain_chain(const Chain& K, int marked = 0) {
    AdamsCube c;
    c.kind = CubeKind::plain;
    for (auto v : K) c.labels.push_back(std::to_string(v));
    c.marked = marked;
    return c;
  }
  /// Prism on (K-, K+): "+" labels first, then "-" labels, both ascending.
  static AdamsCube prism(const Chain& K_minus, const Chain& K_plus) {
    AdamsCube c;
    c.kind = CubeKind::prism;
    for (auto v : K_plus) c.labels.push_back(std::to_string(v) + "+");
    for (auto v : K_minus) c.labels.push_back(std::to_string(v) + "-");
    return c;
  }
  static AdamsCube nested(CubeKind kind, const BarycentricChain& vK) {
    AdamsCube c;
    c.kind = kind;
    for (auto& I : vK) c.labels.push_back(chain_str(I));
    return c;
  }
};

/// A stratum of an Adams cube: coordinates in I are 1, coordinates outside J
/// are 0.  Stored as sorted index sets including the pinned indices, so that
///   {pinned} <= I <= J <= ground.
struct AdamsStratum {
  std::vector<int> I, J;

  bool operator==(const AdamsStratum&) const = default;
  bool operator<(const AdamsStratum& o) const { return std::tie(I, J) < std::tie(o.I, o.J); }
};

inline int stratum_dim(const AdamsStratum& s) {
  return static_cast<int>(s.J.size() - s.I.size());
}

/// Face order: s precedes t (s lies in the closure of t) iff t.I <= s.I <= s.J <= t.J.
inline bool stratum_in_closure(const AdamsStratum& s, const AdamsStratum& t) {
  return std::includes(s.I.begin(), s.I.end(), t.I.begin(), t.I.end()) &&
         std::includes(s.J.begin(), s.J.end(), s.I.begin(), s.I.end()) &&
         std::includes(t.J.begin(), t.J.end(), s.J.begin(), s.J.end());
}

inline std::string stratum_str(const AdamsCube& c, const AdamsStratum& s) {
  auto set_str = [&](const std::vector<int>& v) {
    std::string r = "{";
    for (size_t i = 0; i < v.size(); ++i) r += (i ? "," : "") + c.labels[v[i]];
    return r + "}";
  };
  return set_str(s.I) + "<" + set_str(s.J) + " [" + std::to_string(stratum_dim(s)) + "]";
}

/// All strata: every coordinate is 1 (in I), free (in J only), or 0.
inline std::vector<AdamsStratum> enumerate_strata(const AdamsCube& c) {
  auto coords = c.coordinate_indices();
  auto pinned = c.pinned_indices();
  std::vector<AdamsStratum> out;
  std::vector<int> state(coords.size(), 0);
  while (true) {
    AdamsStratum s;
    s.I = pinned;
    s.J = pinned;
    for (size_t k = 0; k < coords.size(); ++k) {
      if (state[k] >= 1) s.J.push_back(coords[k]);
      if (state[k] == 2) s.I.push_back(coords[k]);
    }
    std::sort(s.I.begin(), s.I.end());
    std::sort(s.J.begin(), s.J.end());
    out.push_back(std::move(s));
    size_t k = 0;
    while (k < coords.size() && state[k] == 2) state[k++] = 0;
    if (k == coords.size()) break;
    ++state[k];
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline AdamsStratum open_stratum(const AdamsCube& c) {
  AdamsStratum s;
  s.I = c.pinned_indices();
  s.J = s.I;
  for (int k : c.coordinate_indices()) s.J.push_back(k);
  std::sort(s.J.begin(), s.J.end());
  return s;
}

// ---------------------------------------------------------------------------
// Product decompositions

inline AdamsCube sub_plain(const AdamsCube& c, const std::vector<int>& idx) {
  AdamsCube r;
  r.kind = (c.kind == CubeKind::prism) ? CubeKind::prism : CubeKind::plain;
  for (int i : idx) r.labels.push_back(c.labels[i]);
  return r;
}

/// Factors of a plain-cube boundary stratum, cut at the interior elements of
/// I; listed from the top segment down.  Each factor is the full Adams cube on
/// a consecutive block of J.
inline std::vector<AdamsCube> product_factors(const AdamsCube& c, const AdamsStratum& s) {
  if (c.kind == CubeKind::input || c.kind == CubeKind::output)
    throw std::invalid_argument("product_factors expects a plain or prism cube");
  std::vector<std::vector<int>> blocks;
  std::vector<int> cur;
  for (int j : s.J) {
    cur.push_back(j);
    bool cut = std::binary_search(s.I.begin(), s.I.end(), j);
    bool endpoint = (j == s.J.front() || j == s.J.back());
    if (cut && !endpoint) {
      blocks.push_back(cur);
      cur = {j};
    }
  }
  blocks.push_back(cur);
  std::vector<AdamsCube> out;
  for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) out.push_back(sub_plain(c, *it));
  return out;
}

/// For input/output cubes the stratum splits as
///   input:  A_{vI c vJ[>=]_{I0}} x A_{vJ[<=]_{I0}; in}
///   output: A_{vJ[>=]_I; ou}     x A_{vI c vJ[<=]_I}
/// Returned as the plain-factor cubes from the first part (already fully
/// decomposed) followed by the smaller marked cube.
inline std::vector<AdamsCube> nested_stratum_factors(const AdamsCube& c, const AdamsStratum& s) {
  if (c.kind == CubeKind::input) {
    int i0 = s.I.front();  // least element of vI
    std::vector<int> upper, lower;
    for (int j : s.J) (j >= i0 ? upper : lower).push_back(j);
    lower.push_back(i0);
    std::sort(lower.begin(), lower.end());
    // plain cube stratum (vI, upper) decomposed by the plain rule
    AdamsCube up;
    up.kind = CubeKind::plain;
    for (int j : upper) up.labels.push_back(c.labels[j]);
    AdamsStratum us;
    for (int j : s.I) us.I.push_back(static_cast<int>(std::lower_bound(upper.begin(), upper.end(), j) - upper.begin()));
    for (size_t k = 0; k < upper.size(); ++k) us.J.push_back(static_cast<int>(k));
    auto out = product_factors(up, us);
    AdamsCube in;
    in.kind = CubeKind::input;
    for (int j : lower) in.labels.push_back(c.labels[j]);
    out.push_back(in);
    return out;
  }
  if (c.kind == CubeKind::output) {
    int i1 = s.I.back();  // largest element of vI
    std::vector<int> upper, lower;
    for (int j : s.J) (j <= i1 ? lower : upper).push_back(j);
    upper.push_back(i1);
    std::sort(upper.begin(), upper.end());
    AdamsCube ou;
    ou.kind = CubeKind::output;
    for (int j : upper) ou.labels.push_back(c.labels[j]);
    AdamsCube low;
    low.kind = CubeKind::plain;
    for (int j : lower) low.labels.push_back(c.labels[j]);
    AdamsStratum ls;
    for (int j : s.I) ls.I.push_back(static_cast<int>(std::lower_bound(lower.begin(), lower.end(), j) - lower.begin()));
    for (size_t k = 0; k < lower.size(); ++k) ls.J.push_back(static_cast<int>(k));
    std::vector<AdamsCube> out{ou};
    for (auto& f : product_factors(low, ls)) out.push_back(f);
    return out;
  }
  return product_factors(c, s);
}

// ---------------------------------------------------------------------------
// Facets

struct Facet {
  std::string family;  // "skip" (coordinate 0) or "stop" (coordinate 1)
  int at;              // coordinate label index
  AdamsStratum stratum;
  std::vector<AdamsCube> factors;
};

/// The codimension-one strata.  Plain cubes have 2(|K|-2) facets, input and
/// output cubes 2(|vK|-1); the two families are disjoint and exhaust the
/// boundary.
inline std::vector<Facet> cube_facets(const AdamsCube& c) {
  std::vector<Facet> out;
  auto open = open_stratum(c);
  for (int e : c.coordinate_indices()) {
    Facet skip;
    skip.family = "skip";
    skip.at = e;
    skip.stratum = open;
    skip.stratum.J.erase(std::find(skip.stratum.J.begin(), skip.stratum.J.end(), e));
    Facet stop;
    stop.family = "stop";
    stop.at = e;
    stop.stratum = open;
    stop.stratum.I.push_back(e);
    std::sort(stop.stratum.I.begin(), stop.stratum.I.end());
    skip.factors = (c.kind == CubeKind::input || c.kind == CubeKind::output)
                       ? nested_stratum_factors(c, skip.stratum)
                       : product_factors(c, skip.stratum);
    stop.factors = (c.kind == CubeKind::input || c.kind == CubeKind::output)
                       ? nested_stratum_factors(c, stop.stratum)
                       : product_factors(c, stop.stratum);
    out.push_back(std::move(skip));
    out.push_back(std::move(stop));
  }
  return out;
}

/// Boundary families of the moduli of Adams fibres with d marked boundary
/// points: drop an element, split at an element distributing the points, or
/// bubble a disc carrying a consecutive block of them.
struct MarkedBoundary {
  std::string family;  // "skip" | "split" | "disc"
  int at = -1;         // label index for skip/split
  int d1 = 0, d2 = 0;
  int insert_after = 0;  // disc family: points x_{j+1}..x_{j+d1} bubble off
  std::string desc;
};

inline std::vector<MarkedBoundary> marked_disc_boundary(const AdamsCube& c) {
  if (c.kind != CubeKind::plain) throw std::invalid_argument("marked boundary needs a plain cube");
  const int d = c.marked, m = c.size();
  std::vector<MarkedBoundary> out;
  for (int i = 0; i < m; ++i) {
    MarkedBoundary b;
    b.family = "skip";
    b.at = i;
    b.d1 = d;
    b.desc = "A^" + std::to_string(d) + "(K\\{" + c.labels[i] + "})";
    out.push_back(b);
  }
  for (int i = 0; i < m; ++i)
    for (int d1 = 0; d1 <= d; ++d1) {
      MarkedBoundary b;
      b.family = "split";
      b.at = i;
      b.d1 = d1;
      b.d2 = d - d1;
      b.desc = "A^" + std::to_string(b.d2) + "(K>=" + c.labels[i] + ") x A^" +
               std::to_string(d1) + "(K<=" + c.labels[i] + ")";
      out.push_back(b);
    }
  for (int d1 = 2; d1 <= d + 1; ++d1) {
    int d2 = d + 1 - d1;
    for (int j = 0; j + d1 <= d && 1 <= d2; ++j) {
      MarkedBoundary b;
      b.family = "disc";
      b.d1 = d1;
      b.d2 = d2;
      b.insert_after = j;
      b.desc = "A^" + std::to_string(d2) + "(K) x R^" + std::to_string(d1 + 1);
      out.push_back(b);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pairs cells and their four Adams factor maps

inline Chain upper_part(const Chain& K, VertexId v) {  // K^>=_v
  Chain r;
  for (auto x : K)
    if (x >= v) r.push_back(x);
  return r;
}
inline Chain lower_part(const Chain& K, VertexId v) {  // K^<=_v
  Chain r;
  for (auto x : K)
    if (x <= v) r.push_back(x);
  return r;
}

/// The four factor cubes over a pairs-barycentric cell, and the cell's image
/// strata under mu_ou, max, min, mu_in.
struct PairsCellMaps {
  AdamsCube out_cube, max_cube, min_cube, in_cube;
  AdamsStratum mu_ou, mx, mn, mu_in;
};

namespace detail {

inline std::vector<int> label_indices(const AdamsCube& c, const std::vector<std::string>& want) {
  std::vector<int> out;
  for (auto& w : want) {
    auto it = std::find(c.labels.begin(), c.labels.end(), w);
    if (it == c.labels.end())
      throw std::logic_error("label " + w + " missing from cube " + c.str());
    out.push_back(static_cast<int>(it - c.labels.begin()));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::vector<std::string> mu_in_labels(const std::vector<Chain>& chains) {
  std::vector<std::string> out;
  for (auto& A : chains) {
    out.push_back(std::to_string(A.back()) + "-");
    out.push_back(std::to_string(A.front()) + "+");
  }
  return out;
}
inline std::vector<std::string> mu_ou_labels(const std::vector<Chain>& chains) {
  std::vector<std::string> out;
  for (auto& A : chains) {
    out.push_back(std::to_string(A.front()) + "-");
    out.push_back(std::to_string(A.back()) + "+");
  }
  return out;
}

inline std::vector<Chain> between(const BarycentricChain& v, const Chain& lo, const Chain& hi) {
  std::vector<Chain> out;
  for (auto& A : v)
    if (subset(lo, A) && subset(A, hi)) out.push_back(A);
  return out;
}

inline std::vector<std::string> min_labels(const std::vector<Chain>& chains) {
  std::set<std::string> s;
  for (auto& A : chains) s.insert(std::to_string(A.front()));
  return {s.begin(), s.end()};
}
inline std::vector<std::string> max_labels(const std::vector<Chain>& chains) {
  std::set<std::string> s;
  for (auto& A : chains) s.insert(std::to_string(A.back()));
  return {s.begin(), s.end()};
}

}  // namespace detail

/// Image strata of a face of the cell sigma_{vI c vJ} under the four maps.
/// Passing the cell itself gives the open-cell images.
inline PairsCellMaps pairs_cell_to_adams(const PairsBarycentricCell& cell,
                                         const PairsBarycentricCell& face) {
  if (!is_cell_face(cell, face))
    throw std::invalid_argument("face does not lie in the closure of the cell");
  const Chain& I0 = cell.inner.front();
  const Chain& I = cell.inner.back();
  const Chain& J0 = cell.outer.front();
  const Chain& J = cell.outer.back();

  PairsCellMaps m;
  m.out_cube = AdamsCube::prism(lower_part(J, I.front()), upper_part(J, I.back()));
  m.in_cube = AdamsCube::prism(upper_part(I0, J0.back()), lower_part(I0, J0.front()));
  AdamsCube mx;
  mx.kind = CubeKind::plain;
  for (auto v : upper_part(I, I0.back())) mx.labels.push_back(std::to_string(v));
  m.max_cube = mx;
  AdamsCube mn;
  mn.kind = CubeKind::plain;
  for (auto v : lower_part(I, I0.front())) mn.labels.push_back(std::to_string(v));
  m.min_cube = mn;

  // mu_ou: keep chains containing I, take (min A, -) and (max A, +).
  auto geI_I = [&](const BarycentricChain& v) {
    std::vector<Chain> r;
    for (auto& A : v)
      if (subset(I, A)) r.push_back(A);
    return r;
  };
  m.mu_ou.I = detail::label_indices(m.out_cube, detail::mu_ou_labels(geI_I(face.inner)));
  m.mu_ou.J = detail::label_indices(m.out_cube, detail::mu_ou_labels(geI_I(face.outer)));

  // mu_in: keep chains inside I0, take (max A, -) and (min A, +).
  auto leI0 = [&](const BarycentricChain& v) {
    std::vector<Chain> r;
    for (auto& A : v)
      if (subset(A, I0)) r.push_back(A);
    return r;
  };
  m.mu_in.I = detail::label_indices(m.in_cube, detail::mu_in_labels(leI0(face.inner)));
  m.mu_in.J = detail::label_indices(m.in_cube, detail::mu_in_labels(leI0(face.outer)));

  // max / min: chains between I0 and I, maxima resp. minima.
  m.mx.I = detail::label_indices(m.max_cube, detail::max_labels(detail::between(face.inner, I0, I)));
  m.mx.J = detail::label_indices(m.max_cube, detail::max_labels(detail::between(face.outer, I0, I)));
  m.mn.I = detail::label_indices(m.min_cube, detail::min_labels(detail::between(face.inner, I0, I)));
  m.mn.J = detail::label_indices(m.min_cube, detail::min_labels(detail::between(face.outer, I0, I)));
  return m;
}

inline PairsCellMaps pairs_cell_to_adams(const PairsBarycentricCell& cell) {
  return pairs_cell_to_adams(cell, cell);
}

// ---------------------------------------------------------------------------
// Degenerate annulus fibres

struct StripComponent {
  std::string side;  // display hint: which factor produced the strip
  std::string lower_end, upper_end;
  bool z_in = false, z_ou = false;

  /// The geometric identity of a strip: its end labels and marked points.
  /// The producing factor is presentation only.
  std::tuple<std::string, std::string, bool, bool> shape() const {
    return {lower_end, upper_end, z_in, z_ou};
  }
  bool operator==(const StripComponent&) const = default;
  bool operator<(const StripComponent& o) const {
    return std::tie(side, lower_end, upper_end, z_in, z_ou) <
           std::tie(o.side, o.lower_end, o.upper_end, o.z_in, o.z_ou);
  }
};

struct FibreDescription {
  std::vector<StripComponent> components;  // cyclic order around the annulus

  nlohmann::json to_json() const {
    nlohmann::json a = nlohmann::json::array();
    for (auto& c : components)
      a.push_back({{"side", c.side},
                   {"ends", {c.lower_end, c.upper_end}},
                   {"z_in", c.z_in},
                   {"z_ou", c.z_ou}});
    return {{"components", a}};
  }
};

namespace detail {

inline std::string strip_vertex(const std::string& label) {
  if (!label.empty() && (label.back() == '+' || label.back() == '-'))
    return label.substr(0, label.size() - 1);
  return label;
}

/// Fibre strips of the universal curve over a stratum of one factor cube:
/// one strip between consecutive break labels (the elements of the stratum's
/// I-set); empty when the ground set is a single point.
inline std::vector<StripComponent> factor_strips(const AdamsCube& cube,
                                                 const AdamsStratum& s,
                                                 const std::string& side) {
  std::vector<StripComponent> out;
  if (cube.empty_curve()) return out;
  for (size_t k = 0; k + 1 < s.I.size(); ++k) {
    StripComponent c;
    c.side = side;
    const std::string &lo = cube.labels[s.I[k]], &hi = cube.labels[s.I[k + 1]];
    c.lower_end = strip_vertex(lo);
    c.upper_end = strip_vertex(hi);
    if (cube.kind == CubeKind::prism && lo.back() == '+' && hi.back() == '-') {
      if (side == "input") c.z_in = true;
      if (side == "output") c.z_ou = true;
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace detail

/// Fibre of the universal family of degenerate annuli over an interior point
/// of `face`, computed through the four Adams factors of `cell`.  Passing the
/// cell itself describes the fibre over the open cell; the natural
/// identification of the restriction with the face's own family is exactly
/// the statement that this is independent of which ambient cell is used.
inline FibreDescription degenerate_annulus_fibre(const PairsBarycentricCell& cell,
                                                 const PairsBarycentricCell& face) {
  auto maps = pairs_cell_to_adams(cell, face);
  FibreDescription f;
  auto in = detail::factor_strips(maps.in_cube, maps.mu_in, "input");
  auto mx = detail::factor_strips(maps.max_cube, maps.mx, "max-side");
  auto ou = detail::factor_strips(maps.out_cube, maps.mu_ou, "output");
  auto mn = detail::factor_strips(maps.min_cube, maps.mn, "min-side");
  // Cyclic arrangement: input strip, up the max side, output strip, down the
  // min side.
  for (auto& c : in) f.components.push_back(c);
  for (auto& c : mx) f.components.push_back(c);
  for (auto& c : ou) f.components.push_back(c);
  std::reverse(mn.begin(), mn.end());
  for (auto& c : mn) f.components.push_back(c);
  return f;
}

inline FibreDescription degenerate_annulus_fibre(const PairsBarycentricCell& cell) {
  return degenerate_annulus_fibre(cell, cell);
}

// ---------------------------------------------------------------------------
// Gluing parameters

/// Order-preserving identification of [0,1) with [0,infinity), configurable;
/// the default is r -> r/(1-r).
using GluingScale = Rat (*)(const Rat&);
inline Rat default_gluing_scale(const Rat& r) { return r / (1 - r); }

/// Distinct minima / maxima of the chains of vI: the joints of the degenerate
/// annulus, one gluing length each.
inline std::vector<VertexId> min_joints(const PairsBarycentricCell& cell) {
  std::set<VertexId> s;
  for (auto& A : cell.inner) s.insert(A.front());
  return {s.begin(), s.end()};
}
inline std::vector<VertexId> max_joints(const PairsBarycentricCell& cell) {
  std::set<VertexId> s;
  for (auto& A : cell.inner) s.insert(A.back());
  return {s.begin(), s.end()};
}

/// (0, infinity] values; nullopt encodes infinity.
using GluingLength = std::optional<Rat>;

struct AnnulusGluing {
  std::vector<std::pair<VertexId, GluingLength>> min_side, max_side;
};

/// Proportional-split annulus gluing function: g_k = w_k * S on each side, so
/// the coordinates of each factor sum to S; S = infinity sends every
/// coordinate to infinity.  Weights must be positive and sum to 1 per side.
inline AnnulusGluing annulus_gluing(const PairsBarycentricCell& cell,
                                    const std::vector<Rat>& min_weights,
                                    const std::vector<Rat>& max_weights,
                                    const GluingLength& S) {
  auto mins = min_joints(cell), maxs = max_joints(cell);
  auto check = [](const std::vector<Rat>& w, size_t n, const char* side) {
    if (w.size() != n) throw std::invalid_argument(std::string("wrong number of ") + side + " weights");
    Rat sum = 0;
    for (auto& x : w) {
      if (x <= 0) throw std::invalid_argument("gluing weights must be positive");
      sum += x;
    }
    if (sum != 1) throw std::invalid_argument("gluing weights must sum to 1");
  };
  check(min_weights, mins.size(), "min");
  check(max_weights, maxs.size(), "max");
  if (S && *S <= 0) throw std::invalid_argument("annulus modulus must be positive");
  AnnulusGluing g;
  for (size_t k = 0; k < mins.size(); ++k)
    g.min_side.push_back({mins[k], S ? GluingLength(min_weights[k] * *S) : GluingLength{}});
  for (size_t k = 0; k < maxs.size(); ++k)
    g.max_side.push_back({maxs[k], S ? GluingLength(max_weights[k] * *S) : GluingLength{}});
  return g;
}

/// Stratum-induced gluing parameters toward a face (the map of
/// sigma_{vI c vJ} onto [0,infinity] powers indexed by the new joints): each
/// new joint reads the cube coordinate of the smallest chain of the face's vI
/// that created it, scaled into [0,infinity].
struct NestedGluing {
  std::vector<std::pair<VertexId, GluingLength>> min_side, max_side;
};

inline NestedGluing nested_gluing_extension(const PairsBarycentricCell& cell,
                                            const PairsBarycentricCell& face,
                                            const std::map<Chain, Rat>& cell_coords,
                                            GluingScale scale = default_gluing_scale) {
  if (!is_cell_face(cell, face))
    throw std::invalid_argument("face does not lie in the closure of the cell");
  auto mins0 = min_joints(cell), maxs0 = max_joints(cell);
  NestedGluing out;
  auto eval = [&](VertexId joint, bool min_side) -> GluingLength {
    // the coordinate of the smallest new chain of face.inner whose min (max)
    // equals the joint
    for (auto& A : face.inner) {
      bool is_new = std::find(cell.inner.begin(), cell.inner.end(), A) == cell.inner.end();
      if (!is_new) continue;
      VertexId v = min_side ? A.front() : A.back();
      if (v != joint) continue;
      auto it = cell_coords.find(A);
      Rat r = it == cell_coords.end() ? Rat(1) : it->second;
      if (r == 1) return GluingLength{};  // on the stratum: infinite length
      return GluingLength(scale(r));
    }
    throw std::invalid_argument("joint not created by the face");
  };
  for (auto v : min_joints(face))
    if (std::find(mins0.begin(), mins0.end(), v) == mins0.end())
      out.min_side.push_back({v, eval(v, true)});
  for (auto v : max_joints(face))
    if (std::find(maxs0.begin(), maxs0.end(), v) == maxs0.end())
      out.max_side.push_back({v, eval(v, false)});
  return out;
}

// ---------------------------------------------------------------------------
// Projections between strata (the commuting triangle of gluing bookkeeping)

/// A point of the cube as an assignment of coordinates to label indices.
using CubePoint = std::map<int, Rat>;

/// f_{I c J}: forget every coordinate outside J \ I.
inline CubePoint project_point(const CubePoint& p, const AdamsStratum& target) {
  CubePoint out;
  for (auto& [k, v] : p)
    if (std::binary_search(target.J.begin(), target.J.end(), k) &&
        !std::binary_search(target.I.begin(), target.I.end(), k))
      out[k] = v;
  return out;
}

/// Vertices of a stratum as cube points: coordinates in I are 1, outside J
/// are 0, free ones run over {0,1}.
inline std::vector<CubePoint> stratum_vertices(const AdamsCube& c, const AdamsStratum& s) {
  std::vector<int> free;
  for (int k : c.coordinate_indices())
    if (std::binary_search(s.J.begin(), s.J.end(), k) &&
        !std::binary_search(s.I.begin(), s.I.end(), k))
      free.push_back(k);
  std::vector<CubePoint> out;
  for (unsigned mask = 0; mask < (1u << free.size()); ++mask) {
    CubePoint p;
    for (int k : c.coordinate_indices()) {
      if (std::binary_search(s.I.begin(), s.I.end(), k))
        p[k] = 1;
      else if (!std::binary_search(s.J.begin(), s.J.end(), k))
        p[k] = 0;
    }
    for (size_t i = 0; i < free.size(); ++i) p[free[i]] = (mask >> i) & 1;
    out.push_back(std::move(p));
  }
  return out;
}

/// f_{I c J}: forget the coordinates outside J \ I.  Points of the cube are
/// given on coordinate labels; strata restrict by intersecting.
inline AdamsStratum project_stratum(const AdamsStratum& s, const AdamsStratum& target) {
  // view s inside the face poset of `target`: coordinates of target are
  // target.J \ target.I
  AdamsStratum r;
  for (int j : s.I)
    if (std::binary_search(target.J.begin(), target.J.end(), j) &&
        !std::binary_search(target.I.begin(), target.I.end(), j))
      r.I.push_back(j);
  for (int j : s.J)
    if (std::binary_search(target.J.begin(), target.J.end(), j) &&
        !std::binary_search(target.I.begin(), target.I.end(), j))
      r.J.push_back(j);
  return r;
}

}  // namespace mirror
