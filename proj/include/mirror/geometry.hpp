#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mirror/rational.hpp"

namespace mirror {

/// a . x <= b
struct Halfspace {
  RVec a;
  Rat b;
};

/// A bounded convex rational polytope, kept both as a vertex list and as a
/// halfspace list.  Dimensions 1 and 2 accept arbitrary vertex sets (the
/// convex hull is taken); higher dimensions accept axis-aligned boxes only.
class Polytope {
 public:
  Polytope() = default;

  static Polytope from_vertices(int dim, std::vector<RVec> pts) {
    if (pts.empty()) throw std::invalid_argument("polytope with no vertices");
    for (auto& p : pts)
      if (static_cast<int>(p.size()) != dim)
        throw std::invalid_argument("polytope vertex of wrong dimension");
    Polytope P;
    P.dim_ = dim;
    if (dim == 1) {
      Rat lo = pts[0][0], hi = pts[0][0];
      for (auto& p : pts) {
        lo = rat_min(lo, p[0]);
        hi = rat_max(hi, p[0]);
      }
      P.verts_ = {{lo}, {hi}};
      P.faces_ = {{{Rat(-1)}, -lo}, {{Rat(1)}, hi}};
    } else if (dim == 2) {
      P.verts_ = hull2(std::move(pts));
      P.faces_ = edges2(P.verts_);
    } else {
      // Box check: the vertex set must be {lo,hi}^n.
      RVec lo = pts[0], hi = pts[0];
      for (auto& p : pts)
        for (int k = 0; k < dim; ++k) {
          lo[k] = rat_min(lo[k], p[k]);
          hi[k] = rat_max(hi[k], p[k]);
        }
      size_t expect = 1;
      for (int k = 0; k < dim; ++k) expect *= (lo[k] == hi[k] ? 1 : 2);
      std::vector<RVec> sorted = pts;
      std::sort(sorted.begin(), sorted.end());
      sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
      if (sorted.size() != expect)
        throw std::invalid_argument("polytopes of dimension > 2 must be axis-aligned boxes");
      for (auto& p : sorted)
        for (int k = 0; k < dim; ++k)
          if (p[k] != lo[k] && p[k] != hi[k])
            throw std::invalid_argument("polytopes of dimension > 2 must be axis-aligned boxes");
      P.verts_ = sorted;
      for (int k = 0; k < dim; ++k) {
        RVec en(dim, Rat(0)), ep(dim, Rat(0));
        en[k] = -1;
        ep[k] = 1;
        P.faces_.push_back({en, -lo[k]});
        P.faces_.push_back({ep, hi[k]});
      }
    }
    return P;
  }

  static Polytope box(const RVec& lo, const RVec& hi) {
    int dim = static_cast<int>(lo.size());
    std::vector<RVec> pts;
    pts.push_back(lo);
    for (int k = 0; k < dim; ++k) {
      std::vector<RVec> next;
      for (auto& p : pts) {
        RVec a = p, b = p;
        a[k] = lo[k];
        b[k] = hi[k];
        next.push_back(a);
        next.push_back(b);
      }
      pts = std::move(next);
    }
    return from_vertices(dim, std::move(pts));
  }

  int dim() const { return dim_; }
  const std::vector<RVec>& vertices() const { return verts_; }
  const std::vector<Halfspace>& halfspaces() const { return faces_; }

  bool contains(const RVec& q) const {
    for (auto& h : faces_)
      if (dot(h.a, q) > h.b) return false;
    if (dim_ == 2 && verts_.size() <= 2) {
      // Degenerate polygon: halfspaces alone do not pin a segment or point.
      if (verts_.size() == 1) return q == verts_[0];
      return on_segment(verts_[0], verts_[1], q);
    }
    return true;
  }

  /// min over the polytope of <v - base, c>; exact, attained at a vertex.
  Rat support_min(const RVec& base, const ZVec& c) const {
    bool first = true;
    Rat m = 0;
    for (auto& v : verts_) {
      Rat s = dot(sub(v, base), c);
      if (first || s < m) m = s;
      first = false;
    }
    return m;
  }

  Polytope translated(const RVec& t) const {
    Polytope P = *this;
    for (auto& v : P.verts_) v = add(v, t);
    for (auto& h : P.faces_) h.b += dot(h.a, t);
    return P;
  }

  /// Convex intersection; nullopt when empty.
  std::optional<Polytope> intersect(const Polytope& o) const {
    if (dim_ == 1) {
      Rat lo = rat_max(verts_[0][0], o.verts_[0][0]);
      Rat hi = rat_min(verts_.back()[0], o.verts_.back()[0]);
      if (lo > hi) return std::nullopt;
      return from_vertices(1, {{lo}, {hi}});
    }
    if (dim_ == 2) {
      std::vector<RVec> poly = verts_;
      for (auto& h : o.faces_) {
        poly = clip2(poly, h);
        if (poly.empty()) return std::nullopt;
      }
      return from_vertices(2, std::move(poly));
    }
    // Boxes.
    RVec lo(dim_), hi(dim_);
    for (int k = 0; k < dim_; ++k) {
      lo[k] = rat_max(verts_.front()[k], o.verts_.front()[k]);
      hi[k] = rat_min(verts_.back()[k], o.verts_.back()[k]);
      if (lo[k] > hi[k]) return std::nullopt;
    }
    return box(lo, hi);
  }

  /// Lattice vectors m with P cap (P + m) nonempty; {0} iff P embeds in the
  /// torus R^n/Z^n.
  std::vector<ZVec> self_overlaps() const {
    RVec lo = verts_.front(), hi = verts_.front();
    for (auto& v : verts_)
      for (int k = 0; k < dim_; ++k) {
        lo[k] = rat_min(lo[k], v[k]);
        hi[k] = rat_max(hi[k], v[k]);
      }
    std::vector<ZVec> found;
    ZVec m(dim_, 0);
    self_overlap_rec(0, lo, hi, m, found);
    return found;
  }

  /// The integer translate m with q + m inside P, if one exists.
  std::optional<ZVec> lift_into(const RVec& q) const {
    RVec lo = verts_.front(), hi = verts_.front();
    for (auto& v : verts_)
      for (int k = 0; k < dim_; ++k) {
        lo[k] = rat_min(lo[k], v[k]);
        hi[k] = rat_max(hi[k], v[k]);
      }
    std::vector<ZVec> cands{{}};
    for (int k = 0; k < dim_; ++k) {
      std::vector<ZVec> next;
      Int a = ceil_int(lo[k] - q[k]), b = floor_int(hi[k] - q[k]);
      for (Int t = a; t <= b; ++t)
        for (auto c : cands) {
          c.push_back(t.convert_to<long long>());
          next.push_back(c);
        }
      cands = std::move(next);
      if (cands.empty()) return std::nullopt;
    }
    for (auto& m : cands) {
      RVec p = q;
      for (int k = 0; k < dim_; ++k) p[k] += m[k];
      if (contains(p)) return m;
    }
    return std::nullopt;
  }

 private:
  static Int floor_int(const Rat& r) {
    Int q = num(r) / den(r);
    if (r < q) q -= 1;
    return q;
  }
  static Int ceil_int(const Rat& r) { return -floor_int(-r); }

  static Rat cross(const RVec& o, const RVec& a, const RVec& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  }
  static bool on_segment(const RVec& a, const RVec& b, const RVec& q) {
    if (cross(a, b, q) != 0) return false;
    for (int k = 0; k < 2; ++k)
      if (q[k] < rat_min(a[k], b[k]) || q[k] > rat_max(a[k], b[k])) return false;
    return true;
  }

  // Andrew's monotone chain; counterclockwise, collinear points dropped.
  static std::vector<RVec> hull2(std::vector<RVec> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    size_t n = pts.size();
    if (n <= 2) return pts;
    std::vector<RVec> h(2 * n);
    size_t k = 0;
    for (size_t i = 0; i < n; ++i) {  // lower hull
      while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
      h[k++] = pts[i];
    }
    for (size_t i = n - 1, t = k + 1; i-- > 0;) {  // upper hull
      while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
      h[k++] = pts[i];
    }
    h.resize(k - 1);
    if (h.size() < 3) return {pts.front(), pts.back()};  // all collinear
    return h;
  }

  static std::vector<Halfspace> edges2(const std::vector<RVec>& hull) {
    std::vector<Halfspace> fs;
    if (hull.size() <= 2) return fs;
    size_t n = hull.size();
    for (size_t i = 0; i < n; ++i) {
      const RVec &p = hull[i], &q = hull[(i + 1) % n];
      // Counterclockwise hull: outward normal is (dy, -dx).
      RVec a{q[1] - p[1], p[0] - q[0]};
      fs.push_back({a, dot(a, p)});
    }
    return fs;
  }

  static RVec cut2(const RVec& p, const RVec& q, const Rat& dp, const Rat& dq) {
    Rat t = dp / (dp - dq);
    RVec x(2);
    for (int k = 0; k < 2; ++k) x[k] = p[k] + t * (q[k] - p[k]);
    return x;
  }

  // Sutherland-Hodgman step; preserves cyclic order.
  static std::vector<RVec> clip2(const std::vector<RVec>& poly, const Halfspace& h) {
    std::vector<RVec> out;
    size_t n = poly.size();
    if (n == 0) return out;
    if (n == 1) {
      if (dot(h.a, poly[0]) <= h.b) out = poly;
      return out;
    }
    if (n == 2) {  // open segment
      Rat dp = h.b - dot(h.a, poly[0]), dq = h.b - dot(h.a, poly[1]);
      if (dp >= 0) out.push_back(poly[0]);
      if ((dp >= 0) != (dq >= 0)) out.push_back(cut2(poly[0], poly[1], dp, dq));
      if (dq >= 0) out.push_back(poly[1]);
    } else {
      for (size_t i = 0; i < n; ++i) {
        const RVec &p = poly[i], &q = poly[(i + 1) % n];
        Rat dp = h.b - dot(h.a, p), dq = h.b - dot(h.a, q);
        if (dp >= 0) out.push_back(p);
        if ((dp >= 0) != (dq >= 0)) out.push_back(cut2(p, q, dp, dq));
      }
    }
    // drop consecutive duplicates (cyclically)
    std::vector<RVec> ded;
    for (auto& v : out)
      if (ded.empty() || !(ded.back() == v)) ded.push_back(v);
    while (ded.size() > 1 && ded.front() == ded.back()) ded.pop_back();
    return ded;
  }

  void self_overlap_rec(int k, const RVec& lo, const RVec& hi, ZVec& m,
                        std::vector<ZVec>& found) const {
    if (k == dim_) {
      if (is_zero(m)) return;
      RVec t(dim_);
      for (int i = 0; i < dim_; ++i) t[i] = m[i];
      if (intersect(translated(t))) found.push_back(m);
      return;
    }
    Int a = ceil_int(lo[k] - hi[k]), b = floor_int(hi[k] - lo[k]);
    for (Int v = a; v <= b; ++v) {
      m.push_back(v.convert_to<long long>());
      self_overlap_rec(k + 1, lo, hi, m, found);
      m.pop_back();
    }
  }

  int dim_ = 0;
  std::vector<RVec> verts_;
  std::vector<Halfspace> faces_;
};

}  // namespace mirror
