#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mirror/novikov.hpp"
#include "mirror/sheaf.hpp"

#include <json.hpp>

namespace mirror {

// ---------------------------------------------------------------------------
// The truncated morphism complex
//
// Basis elements are monomials z^A times an elementary matrix on a chain,
// unit-normalised to polytope-valuation zero; each spans a copy of
// k[t^(1/D)]/(t^E) and the differential has entries of nonnegative
// valuation.  The seed window keeps the classes whose normalising exponent
// fits below E; the complex is then closed under the (valuation < E) entries
// of the differential in both directions, which adds the finitely many
// partners the seeds interact with and makes the reported bars honest bars
// of the truncated complex.  Classes supported entirely above the window are
// not reported.

struct HomGenerator {
  Chain I;
  size_t src = 0, tgt = 0;
  ZVec cls;
  Rat norm;  // -w_I(A), the normalising exponent
  int degree = 0;

  bool operator<(const HomGenerator& o) const {
    return std::tie(degree, I, src, tgt, cls) < std::tie(o.degree, o.I, o.src, o.tgt, o.cls);
  }
  bool operator==(const HomGenerator&) const = default;
};

/// Lattice classes whose normalising exponent fits the window: -w_I(A) < E.
/// The chart basepoint must be interior to the chart polytope, which makes
/// -w_I grow linearly and the window finite.
inline std::vector<ZVec> lattice_window(const ChartRegistry& reg, const Chain& I, const Rat& E) {
  const ChainChart& c = reg.chart(I);
  const int n = reg.atlas().dimension;
  // inscribed box radius of (q - P): t* = min_h (b_h - a_h . q) / |a_h|_1
  Rat tstar;
  bool first = true;
  for (auto& h : c.polytope.halfspaces()) {
    Rat b = h.b - dot(h.a, c.basepoint);
    Rat l1 = 0;
    for (auto& x : h.a) l1 += (x < 0 ? -x : x);
    if (l1 == 0) continue;
    Rat t = b / l1;
    if (first || t < tstar) tstar = t;
    first = false;
  }
  if (first || !(tstar > 0))
    throw std::domain_error("chart basepoint must be interior to the chart polytope on " +
                            chain_str(I));
  // -w(A) >= t* |A|_1, so classes beyond E / t* fall outside the window
  long long budget = (num(E / tstar) / den(E / tstar)).convert_to<long long>();
  std::vector<ZVec> out;
  ZVec a(n, 0);
  auto rec = [&](auto&& self, int k, long long left) -> void {
    if (k == n) {
      Rat w = c.polytope.support_min(c.basepoint, a);
      if (-w < E) out.push_back(a);
      return;
    }
    for (long long v = -left; v <= left; ++v) {
      a[k] = v;
      self(self, k + 1, left - std::abs(v));
    }
    a[k] = 0;
  };
  rec(rec, 0, budget);
  std::sort(out.begin(), out.end());
  return out;
}

/// The seed basis of the truncated complex Hom(F, G): every component with a
/// lattice class inside the window, sorted by (degree, chain, generators,
/// class).
inline std::vector<HomGenerator> hom_complex_basis(const ChartRegistry& reg,
                                                   const TwistedSheaf& F, const TwistedSheaf& G,
                                                   const Rat& E) {
  std::vector<HomGenerator> out;
  for (auto& I : enumerate_chains(reg.atlas(), reg.atlas().dimension + 1)) {
    auto srcd = F.degrees(I.front()), tgtd = G.degrees(I.back());
    if (srcd.empty() || tgtd.empty()) continue;
    auto window = lattice_window(reg, I, E);
    for (size_t s = 0; s < srcd.size(); ++s)
      for (size_t t = 0; t < tgtd.size(); ++t)
        for (auto& A : window) {
          HomGenerator g;
          g.I = I;
          g.src = s;
          g.tgt = t;
          g.cls = A;
          g.norm = -AffinoidElement::weight(reg, I, 0, A);
          g.degree = tgtd[t] - srcd[s] + static_cast<int>(I.size()) - 1;
          out.push_back(std::move(g));
        }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Valuation-graded elimination

struct Bar {
  Rat birth, death;
  bool full = false;  // death clipped at the window end
};

struct Barcode {
  std::map<int, std::vector<Bar>> bars;  // by cohomological degree
  std::vector<std::string> warnings;

  int full_bars(int degree) const {
    auto it = bars.find(degree);
    if (it == bars.end()) return 0;
    int n = 0;
    for (auto& b : it->second) n += b.full && b.birth == 0;
    return n;
  }

  nlohmann::json to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (auto& [d, bs] : bars) {
      nlohmann::json a = nlohmann::json::array();
      for (auto& b : bs) a.push_back({rat_str(b.birth), rat_str(b.death)});
      j[std::to_string(d)] = a;
    }
    nlohmann::json out{{"bars", j}};
    if (!warnings.empty()) out["warnings"] = warnings;
    return out;
  }
};

namespace detail {

struct GradedMatrix {
  size_t rows = 0, cols = 0;
  std::map<std::pair<size_t, size_t>, NovikovScalar> e;  // (row, col)

  const NovikovScalar* find(size_t r, size_t c) const {
    auto it = e.find({r, c});
    return it == e.end() ? nullptr : &it->second;
  }
  void set(size_t r, size_t c, const NovikovScalar& v) {
    if (v.is_zero())
      e.erase({r, c});
    else
      e[{r, c}] = v;
  }
};

struct PairRecord {
  size_t row, col;
  Rat kill;  // pivot valuation: the grade at which the row class dies
};

/// Smith reduction with minimal-valuation pivoting.  Valuation-zero pivots
/// are units and clear exactly; leftover positive pivots are the torsion.
/// Rows and columns are indexed so that clearing touches only live entries.
inline std::vector<PairRecord> reduce(const GradedMatrix& input, const Rat& E,
                                      std::vector<std::string>& warnings) {
  std::vector<std::map<size_t, NovikovScalar>> rows(input.rows);  // row -> col -> value
  std::vector<std::set<size_t>> col_rows(input.cols);             // col -> rows with entries
  for (auto& [rc, v] : input.e) {
    if (v.is_zero()) continue;
    rows[rc.first][rc.second] = v;
    col_rows[rc.second].insert(rc.first);
  }
  auto erase = [&](size_t r, size_t c) {
    rows[r].erase(c);
    col_rows[c].erase(r);
  };
  auto put = [&](size_t r, size_t c, const NovikovScalar& v) {
    if (v.is_zero()) {
      erase(r, c);
    } else {
      rows[r][c] = v;
      col_rows[c].insert(r);
    }
  };

  std::vector<PairRecord> pairs;
  std::vector<bool> row_used(input.rows, false), col_used(input.cols, false);
  while (true) {
    bool found = false;
    Rat best_val;
    size_t pr = 0, pc = 0;
    for (size_t r = 0; r < rows.size(); ++r) {
      if (row_used[r]) continue;
      for (auto& [c, v] : rows[r]) {
        if (col_used[c]) continue;
        Rat val = *v.val();
        if (!found || val < best_val || (val == best_val && std::tie(r, c) < std::tie(pr, pc))) {
          found = true;
          best_val = val;
          pr = r;
          pc = c;
        }
      }
    }
    if (!found) break;
    NovikovScalar pivot = rows[pr][pc];
    if (best_val > E / 2)
      warnings.push_back("pivot valuation " + rat_str(best_val) +
                         " exceeds half the precision window");
    NovikovScalar pinv = pivot.inverse(Prec(E));

    std::vector<std::pair<size_t, NovikovScalar>> prow;  // live entries of the pivot row
    for (auto& [c2, v] : rows[pr])
      if (c2 != pc && !col_used[c2]) prow.push_back({c2, v});
    std::vector<std::pair<size_t, NovikovScalar>> pcol;  // live entries of the pivot column
    for (size_t r2 : std::set<size_t>(col_rows[pc]))
      if (r2 != pr && !row_used[r2]) pcol.push_back({r2, rows[r2][pc]});

    for (auto& [c2, v] : prow) {
      NovikovScalar f = (v * pinv).truncated(Prec(E));
      for (auto& [r2, w] : pcol) {
        auto it = rows[r2].find(c2);
        NovikovScalar cur = it == rows[r2].end() ? NovikovScalar(w.field()) : it->second;
        put(r2, c2, (cur - (f * w).truncated(Prec(E))).truncated(Prec(E)));
      }
      erase(pr, c2);
    }
    for (auto& [r2, v] : pcol) erase(r2, pc);
    row_used[pr] = true;
    col_used[pc] = true;
    pairs.push_back({pr, pc, best_val});
  }
  return pairs;
}

}  // namespace detail

/// The differential-closed model of the truncated complex: seed generators
/// plus every partner reachable through entries of valuation below E, with
/// the assembled matrix entries.
class HomComplexModel {
 public:
  HomComplexModel(const ChartRegistry& reg, const TwistingCocycle& alpha, const TwistedSheaf& F,
                  const TwistedSheaf& G, const Rat& E)
      : reg_(&reg), alpha_(&alpha), F_(&F), G_(&G), E_(E) {
    auto seeds = hom_complex_basis(reg, F, G, E);
    for (auto& g : seeds)
      for (size_t k = 0; k < g.cls.size(); ++k)
        radius_ = std::max(radius_, std::abs(g.cls[k]));
    for (auto& g : seeds) add_gen(g);
    close();
    finalize();
  }

  const std::vector<HomGenerator>& gens() const { return gens_; }
  /// entries[(to, from)] with indices into gens()
  const std::map<std::pair<size_t, size_t>, NovikovScalar>& entries() const { return entries_; }

 private:
  using Key = std::tuple<Chain, size_t, size_t, ZVec>;

  static Key key(const HomGenerator& g) { return {g.I, g.src, g.tgt, g.cls}; }

  size_t add_gen(const HomGenerator& g) {
    auto it = index_.find(key(g));
    if (it != index_.end()) return it->second;
    for (size_t k = 0; k < g.cls.size(); ++k)
      if (std::abs(g.cls[k]) > radius_ + 32)
        throw std::domain_error(
            "the precision window does not close up; the data sit at the convergence "
            "boundary");
    size_t id = gens_.size();
    gens_.push_back(g);
    index_[key(g)] = id;
    unprobed_.push_back(id);
    return id;
  }

  HomGenerator make_gen(const Chain& I, size_t src, size_t tgt, const ZVec& cls) const {
    HomGenerator g;
    g.I = I;
    g.src = src;
    g.tgt = tgt;
    g.cls = cls;
    g.norm = -AffinoidElement::weight(*reg_, I, 0, cls);
    g.degree = G_->degrees(I.back())[tgt] - F_->degrees(I.front())[src] +
               static_cast<int>(I.size()) - 1;
    return g;
  }

  /// Images of one generator under mu^1, as (target identity, scalar);
  /// memoised, since the closure revisits candidates.
  const std::vector<std::pair<HomGenerator, NovikovScalar>>& probe(const HomGenerator& g) const {
    auto it = probe_cache_.find(key(g));
    if (it != probe_cache_.end()) return it->second;
    return probe_cache_.emplace(key(g), probe_impl(g)).first->second;
  }

  std::vector<std::pair<HomGenerator, NovikovScalar>> probe_impl(const HomGenerator& g) const {
    const BaseField field = reg_->atlas().field;
    SheafMorphism T;
    T.degree = g.degree;
    AffMat mat = AffMat::zero(g.I, field, Prec{}, G_->rank(g.I.back()), F_->rank(g.I.front()));
    mat.e[g.tgt][g.src] =
        AffinoidElement::monomial(*reg_, g.I, field, g.norm, g.cls, FieldElem::one(field));
    T.set(g.I, std::move(mat));
    // entries below valuation E survive; a wide working precision keeps the
    // raw exponents of every such term
    Rat slack = g.norm + E_;
    SheafMorphism dT = mu1(*reg_, *alpha_, *F_, *G_, T, Prec(E_ + slack));
    std::vector<std::pair<HomGenerator, NovikovScalar>> out;
    for (auto& [J, comp] : dT.components)
      for (size_t r = 0; r < comp.rows; ++r)
        for (size_t c = 0; c < comp.cols; ++c)
          for (auto& [kk, coef] : comp.e[r][c].terms()) {
            Rat wj = AffinoidElement::weight(*reg_, J, 0, kk.cls);
            Rat val = kk.lambda + wj;  // valuation on normalised generators
            if (val < 0)
              throw std::domain_error(
                  "differential entry of negative normalised valuation; the twisting data "
                  "leave the integral window");
            if (!(val < E_)) continue;
            HomGenerator h = make_gen(J, c, r, kk.cls);
            NovikovScalar s(field, Prec(E_));
            s.add_term(val, coef);
            out.push_back({h, s});
          }
    return out;
  }

  void close() {
    // alternate forward closure (new targets) and backward closure
    // (predecessors of known generators along recorded entry shapes) until
    // nothing changes
    struct Shape {
      Chain from_I, to_I;
      size_t fs, ft, ts, tt;
      ZVec shift;
      bool operator<(const Shape& o) const {
        return std::tie(from_I, to_I, fs, ft, ts, tt, shift) <
               std::tie(o.from_I, o.to_I, o.fs, o.ft, o.ts, o.tt, o.shift);
      }
    };
    std::set<Shape> shapes;
    const size_t cap = 200000;
    bool changed = true;
    while (changed) {
      changed = false;
      rejected_.clear();
      while (!unprobed_.empty()) {
        size_t id = unprobed_.back();
        unprobed_.pop_back();
        HomGenerator g = gens_[id];
        auto& images = probe(g);
        probes_[id] = images;
        for (auto& [h, s] : images) {
          ZVec shift = zadd(h.cls, zneg(g.cls));
          shapes.insert({g.I, h.I, g.src, g.tgt, h.src, h.tgt, shift});
          size_t before = gens_.size();
          size_t hid = add_gen(h);
          if (hid >= before) changed = true;
        }
        if (gens_.size() > cap)
          throw std::domain_error(
              "the precision window does not close up; the data sit at the convergence "
              "boundary");
      }
      // backward: candidate predecessors of every known generator
      size_t n = gens_.size();
      for (size_t id = 0; id < n; ++id) {
        for (auto& sh : shapes) {
          const HomGenerator& g = gens_[id];
          if (sh.to_I != g.I || sh.ts != g.src || sh.tt != g.tgt) continue;
          ZVec pred_cls = zadd(g.cls, zneg(sh.shift));
          Key k{sh.from_I, sh.fs, sh.ft, pred_cls};
          if (index_.count(k) || rejected_.count(k)) continue;
          // probe the candidate; keep it only if it genuinely reaches a
          // known generator below the window
          HomGenerator cand = make_gen(sh.from_I, sh.fs, sh.ft, pred_cls);
          bool hits = false;
          for (auto& [h, s] : probe(cand))
            if (index_.count(key(h))) hits = true;
          if (hits) {
            rejected_.erase(k);
            add_gen(cand);
            changed = true;
          } else {
            rejected_.insert(k);
          }
        }
        if (gens_.size() > cap)
          throw std::domain_error(
              "the precision window does not close up; the data sit at the convergence "
              "boundary");
      }
    }
  }

  void finalize() {
    // deterministic order, then assemble entries from the cached probes
    std::vector<size_t> order(gens_.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return gens_[a] < gens_[b]; });
    std::vector<size_t> rank(gens_.size());
    for (size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
    std::vector<HomGenerator> sorted;
    for (size_t i : order) sorted.push_back(gens_[i]);
    for (auto& [from, images] : probes_) {
      for (auto& [h, s] : images) {
        auto it = index_.find(key(h));
        if (it == index_.end())
          throw std::logic_error("closure missed a differential target");
        auto key2 = std::make_pair(rank[it->second], rank[from]);
        auto cur = entries_.find(key2);
        if (cur == entries_.end())
          entries_[key2] = s;
        else {
          NovikovScalar sum = cur->second + s;
          if (sum.is_zero())
            entries_.erase(cur);
          else
            cur->second = sum;
        }
      }
    }
    gens_ = std::move(sorted);
  }

  const ChartRegistry* reg_;
  const TwistingCocycle* alpha_;
  const TwistedSheaf* F_;
  const TwistedSheaf* G_;
  Rat E_;
  long long radius_ = 0;
  std::vector<HomGenerator> gens_;
  std::map<Key, size_t> index_;
  std::vector<size_t> unprobed_;
  std::map<size_t, std::vector<std::pair<HomGenerator, NovikovScalar>>> probes_;
  mutable std::map<Key, std::vector<std::pair<HomGenerator, NovikovScalar>>> probe_cache_;
  std::set<Key> rejected_;
  std::map<std::pair<size_t, size_t>, NovikovScalar> entries_;
};

/// Barcode of Hom(F, G) over the window [0, E): Smith-type reduction of mu^1
/// over k[t^(1/D)]/(t^E), viewing T-exponents as the grading.  Full bars
/// (spanning the whole window) approximate the Betti numbers over the Novikov
/// field, a window-limited statement; finite bars are torsion classes with
/// their valuation lengths.
inline Barcode cohomology_barcode(const ChartRegistry& reg, const TwistingCocycle& alpha,
                                  const TwistedSheaf& F, const TwistedSheaf& G, const Rat& E) {
  Barcode out;
  HomComplexModel model(reg, alpha, F, G, E);

  std::map<int, std::vector<size_t>> slices;
  for (size_t i = 0; i < model.gens().size(); ++i)
    slices[model.gens()[i].degree].push_back(i);
  std::map<size_t, std::pair<int, size_t>> position;  // gen -> (degree, offset)
  for (auto& [t, ids] : slices)
    for (size_t k = 0; k < ids.size(); ++k) position[ids[k]] = {t, k};

  std::map<int, detail::GradedMatrix> mats;
  for (auto& [t, ids] : slices) {
    auto& m = mats[t];
    m.cols = ids.size();
    m.rows = slices.count(t + 1) ? slices[t + 1].size() : 0;
  }
  for (auto& [rc, v] : model.entries()) {
    auto [rdeg, roff] = position[rc.first];
    auto [cdeg, coff] = position[rc.second];
    if (rdeg != cdeg + 1)
      throw std::logic_error("differential does not raise the degree by one");
    mats[cdeg].set(roff, coff, v);
  }

  std::map<int, std::vector<detail::PairRecord>> pairs;
  for (auto& [t, m] : mats) pairs[t] = detail::reduce(m, E, out.warnings);

  // Over the valuation ring the complex splits into elementary pieces, one
  // per pair, plus free summands; only the pair counts and kill valuations
  // matter.
  for (auto& [t, ids] : slices) {
    size_t consumed = pairs.count(t) ? pairs[t].size() : 0;
    size_t hit = 0;
    if (auto it = pairs.find(t - 1); it != pairs.end()) {
      hit = it->second.size();
      for (auto& p : it->second)
        if (p.kill > 0) out.bars[t].push_back({0, rat_min(p.kill, E), p.kill >= E});
    }
    if (ids.size() < consumed + hit)
      throw std::logic_error("inconsistent pairing; the differentials do not compose to zero");
    for (size_t k = 0; k < ids.size() - consumed - hit; ++k) out.bars[t].push_back({0, E, true});
    std::sort(out.bars[t].begin(), out.bars[t].end(), [](const Bar& a, const Bar& b) {
      return std::tie(a.birth, a.death) < std::tie(b.birth, b.death);
    });
    if (out.bars[t].empty()) out.bars.erase(t);
  }
  return out;
}

/// Matrix of mu^1 between two explicit slices of the truncated basis; used by
/// oracles and direct checks.
inline detail::GradedMatrix hom_differential_matrix(
    const ChartRegistry& reg, const TwistingCocycle& alpha, const TwistedSheaf& F,
    const TwistedSheaf& G, const std::vector<HomGenerator>& cols,
    const std::vector<HomGenerator>& rows, const Rat& E) {
  detail::GradedMatrix m;
  m.rows = rows.size();
  m.cols = cols.size();
  std::map<std::tuple<Chain, size_t, size_t, ZVec>, size_t> row_index;
  Rat max_norm = 0;
  for (size_t r = 0; r < rows.size(); ++r) {
    row_index[{rows[r].I, rows[r].src, rows[r].tgt, rows[r].cls}] = r;
    max_norm = rat_max(max_norm, rows[r].norm);
  }
  const BaseField field = reg.atlas().field;
  for (size_t cidx = 0; cidx < cols.size(); ++cidx) {
    const HomGenerator& g = cols[cidx];
    SheafMorphism T;
    T.degree = g.degree;
    AffMat mat = AffMat::zero(g.I, field, Prec{}, G.rank(g.I.back()), F.rank(g.I.front()));
    mat.e[g.tgt][g.src] =
        AffinoidElement::monomial(reg, g.I, field, g.norm, g.cls, FieldElem::one(field));
    T.set(g.I, std::move(mat));
    SheafMorphism dT = mu1(reg, alpha, F, G, T, Prec(E + max_norm + g.norm));
    for (auto& [J, comp] : dT.components)
      for (size_t r = 0; r < comp.rows; ++r)
        for (size_t c = 0; c < comp.cols; ++c)
          for (auto& [key, coef] : comp.e[r][c].terms()) {
            Rat wj = AffinoidElement::weight(reg, J, 0, key.cls);
            Rat val = key.lambda + wj;
            if (val < 0 || !(val < E)) continue;
            auto it = row_index.find({J, c, r, key.cls});
            if (it == row_index.end()) continue;
            NovikovScalar cur = m.find(it->second, cidx) ? *m.find(it->second, cidx)
                                                         : NovikovScalar(field, Prec(E));
            cur.add_term(val, coef);
            m.set(it->second, cidx, cur.truncated(Prec(E)));
          }
  }
  return m;
}

}  // namespace mirror
