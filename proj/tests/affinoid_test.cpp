#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "mirror/affinoid.hpp"

using namespace mirror;

namespace {

const BaseField Q = BaseField::rationals();

AffinoidElement mono(const ChartRegistry& reg, const Chain& chart, const std::string& t,
                     ZVec z, const std::string& c, Prec E = Prec{}) {
  return AffinoidElement::monomial(reg, chart, Q, parse_rat(t), std::move(z),
                                   FieldElem(Q, parse_rat(c)), E);
}

TEST(Affinoid, MonomialInversePair) {
  ChartAtlas a = fixtures::circle_atlas();
  ChartRegistry reg(a);
  AffinoidElement z = mono(reg, {0}, "0", {1}, "1");
  AffinoidElement zi = mono(reg, {0}, "0", {-1}, "1");
  AffinoidElement one = AffinoidElement::constant(reg, {0}, Q, 1);
  EXPECT_TRUE(z.mul(reg, zi) == one);
}

TEST(Affinoid, ExponentAddition) {
  ChartAtlas a = fixtures::circle_atlas();
  ChartRegistry reg(a);
  AffinoidElement x = mono(reg, {0}, "1/2", {1}, "1");
  AffinoidElement r = x.mul(reg, x);
  EXPECT_TRUE(r == mono(reg, {0}, "1", {2}, "1"));
}

TEST(Affinoid, TruncationByPolytopeValuation) {
  // on the circle chart, w(l, A) = l - (5/12)|A|; terms at or above the
  // precision disappear
  ChartAtlas a = fixtures::circle_atlas();
  ChartRegistry reg(a);
  Prec E(Rat(1));
  AffinoidElement x = mono(reg, {0}, "2/3", {1}, "1", E);  // w = 1/4
  EXPECT_FALSE(x.is_zero());
  AffinoidElement y = mono(reg, {0}, "1", {0}, "1", E);  // w = 1, at the window edge
  EXPECT_TRUE(y.is_zero());
  AffinoidElement gone =
      mono(reg, {0}, "5/6", {1}, "1", E).mul(reg, mono(reg, {0}, "2/3", {0}, "1", E));
  EXPECT_TRUE(gone.is_zero());  // w = 3/2 - 5/12 >= 1
}

TEST(Affinoid, ChartMismatchRejected) {
  ChartAtlas a = fixtures::circle_atlas();
  ChartRegistry reg(a);
  AffinoidElement x = mono(reg, {0}, "0", {1}, "1");
  AffinoidElement y = mono(reg, {1}, "0", {1}, "1");
  EXPECT_THROW(x.add(reg, y), std::invalid_argument);
  EXPECT_THROW(x.mul(reg, y), std::invalid_argument);
}

TEST(Restrict, CirclePaperExample) {
  // q0 = 0, q1 = 1/3: z_{q0} becomes T^{1/3} z_{q1}
  ChartAtlas a = fixtures::circle_atlas();
  ChartRegistry reg(a);
  AffinoidElement z = mono(reg, {0}, "0", {1}, "1");
  AffinoidElement r = restrict(reg, z, VertexId(1));
  ASSERT_EQ(r.terms().size(), 1u);
  auto& [k, c] = *r.terms().begin();
  EXPECT_EQ(k.lambda, Rat(1, 3));
  EXPECT_EQ(k.cls, (ZVec{1}));
  EXPECT_EQ(r.chart(), (Chain{0, 1}));
}

TEST(Restrict, WrapAroundEdgeUsesTheLift) {
  // the edge {0,2} of the circle runs through the wrap: the lift of q2 near
  // q0 is -1/3, so z_{q0} picks up T^{-1/3}
  ChartAtlas a = fixtures::circle_atlas();
  ChartRegistry reg(a);
  AffinoidElement z = mono(reg, {0}, "0", {1}, "1");
  AffinoidElement r = restrict(reg, z, VertexId(2));
  auto& [k, c] = *r.terms().begin();
  EXPECT_EQ(k.lambda, Rat(-1, 3));
}

TEST(Restrict, ConstantsFixed) {
  ChartAtlas a = fixtures::circle_atlas();
  ChartRegistry reg(a);
  AffinoidElement five = AffinoidElement::constant(reg, {0}, Q, 5);
  AffinoidElement r = restrict(reg, five, Chain{0, 1});
  ASSERT_EQ(r.terms().size(), 1u);
  EXPECT_EQ(r.terms().begin()->first.lambda, Rat(0));
  EXPECT_EQ(r.terms().begin()->second.str(), "5");
}

TEST(Restrict, ComposesAlongChains) {
  // restricting along {0} -> {0,1} -> {0,1,2} equals {0} -> {0,1,2} directly
  ChartAtlas a = fixtures::triangle_atlas();
  ChartRegistry reg(a);
  fixtures::Rng rng(37);
  for (int k = 0; k < 100; ++k) {
    AffinoidElement x(Chain{0}, Q, Prec{});
    for (int t = 0; t < 3; ++t)
      x.add_term(reg, rng.nonneg_rational(), {rng.integer(-2, 2), rng.integer(-2, 2)},
                 FieldElem(Q, rng.rational()));
    AffinoidElement two = restrict(reg, restrict(reg, x, Chain{0, 1}), Chain{0, 1, 2});
    AffinoidElement one = restrict(reg, x, Chain{0, 1, 2});
    EXPECT_TRUE(two.same_terms(one));
  }
}

TEST(Restrict, RingMap) {
  ChartAtlas a = fixtures::torus2_atlas();
  ChartRegistry reg(a);
  fixtures::Rng rng(41);
  std::set<std::pair<VertexId, VertexId>> edges;
  for (auto& s : a.simplices)
    for (size_t i = 0; i < s.size(); ++i)
      for (size_t j = i + 1; j < s.size(); ++j) edges.insert({s[i], s[j]});
  int done = 0;
  for (auto& [i, j] : edges) {
    AffinoidElement x(Chain{i}, Q, Prec{}), y(Chain{i}, Q, Prec{});
    for (int t = 0; t < 2; ++t) {
      x.add_term(reg, rng.nonneg_rational(), {rng.integer(-1, 1), rng.integer(-1, 1)},
                 FieldElem(Q, rng.rational()));
      y.add_term(reg, rng.nonneg_rational(), {rng.integer(-1, 1), rng.integer(-1, 1)},
                 FieldElem(Q, rng.rational()));
    }
    Chain e{i, j};
    EXPECT_TRUE(restrict(reg, x.mul(reg, y), e)
                    .same_terms(restrict(reg, x, e).mul(reg, restrict(reg, y, e))));
    EXPECT_TRUE(restrict(reg, x.add(reg, y), e)
                    .same_terms(restrict(reg, x, e).add(reg, restrict(reg, y, e))));
    if (++done > 30) break;
  }
}

TEST(Restrict, WeightsAreMonotone) {
  // chain charts are intersections, so restriction can only raise the
  // polytope-valuation of a term
  ChartAtlas a = fixtures::circle_atlas();
  ChartRegistry reg(a);
  fixtures::Rng rng(43);
  for (int k = 0; k < 200; ++k) {
    Rat l = rng.nonneg_rational();
    ZVec z{rng.integer(-3, 3)};
    Rat w0 = AffinoidElement::weight(reg, {0}, l, z);
    AffinoidElement x = AffinoidElement::monomial(reg, {0}, Q, l, z, FieldElem::one(Q));
    for (Chain target : {Chain{0, 1}, Chain{0, 2}}) {
      AffinoidElement r = restrict(reg, x, target);
      auto& key = r.terms().begin()->first;
      EXPECT_GE(AffinoidElement::weight(reg, target, key.lambda, key.cls), w0);
    }
  }
}

TEST(Restrict, MissingContainmentRejected) {
  ChartAtlas a = fixtures::circle_atlas();
  ChartRegistry reg(a);
  AffinoidElement x = mono(reg, {0, 1}, "0", {1}, "1");
  EXPECT_THROW(restrict(reg, x, Chain{1, 2}), std::invalid_argument);
  EXPECT_THROW(restrict(reg, mono(reg, {0}, "0", {1}, "1"), Chain{0, 1, 2}),
               std::invalid_argument);  // not a chain of the circle
}

TEST(UnitInvert, Monomial) {
  ChartAtlas a = fixtures::circle_atlas();
  ChartRegistry reg(a);
  AffinoidElement x = mono(reg, {0}, "1/2", {2}, "1");
  AffinoidElement r = unit_invert(reg, x);
  ASSERT_EQ(r.terms().size(), 1u);
  EXPECT_EQ(r.terms().begin()->first.lambda, Rat(-1, 2));
  EXPECT_EQ(r.terms().begin()->first.cls, (ZVec{-2}));
}

TEST(UnitInvert, GeometricSeries) {
  // 1 + T z on a chart where w(1,1) > 0: the inverse is the alternating series
  ChartAtlas a = fixtures::circle_atlas();
  ChartRegistry reg(a);
  Prec E(Rat(2));
  AffinoidElement x = AffinoidElement::constant(reg, {0}, Q, 1, E)
                          .add(reg, mono(reg, {0}, "1", {1}, "1", E));
  AffinoidElement inv = unit_invert(reg, x);
  AffinoidElement back = x.mul(reg, inv);
  EXPECT_TRUE(back.same_terms(AffinoidElement::constant(reg, {0}, Q, 1, E)));
  EXPECT_GE(inv.terms().size(), 2u);
}

TEST(UnitInvert, NoDominatingTerm) {
  // z + z^{-1} on the symmetric circle chart has no recognizable unit part
  ChartAtlas a = fixtures::circle_atlas();
  ChartRegistry reg(a);
  AffinoidElement x = mono(reg, {0}, "0", {1}, "1", Prec(Rat(3)))
                          .add(reg, mono(reg, {0}, "0", {-1}, "1", Prec(Rat(3))));
  EXPECT_THROW(unit_invert(reg, x), std::domain_error);
}

TEST(UnitInvert, RandomInverses) {
  ChartAtlas a = fixtures::circle_atlas();
  ChartRegistry reg(a);
  fixtures::Rng rng(47);
  int done = 0;
  for (int k = 0; k < 200; ++k) {
    // dominating monomial plus a strictly smaller tail
    Prec E(Rat(4));
    ZVec z{rng.integer(-2, 2)};
    AffinoidElement x = mono(reg, {0}, "0", z, "1", E);
    x = x.add(reg, mono(reg, {0}, rat_str(Rat(1) + rng.nonneg_rational(2, 2)), z, "1/2", E));
    try {
      AffinoidElement inv = unit_invert(reg, x);
      AffinoidElement prod = x.mul(reg, inv);
      AffinoidElement diff =
          prod.sub(reg, AffinoidElement::constant(reg, {0}, Q, 1, prod.precision()));
      EXPECT_TRUE(diff.is_zero()) << x.str();
      ++done;
    } catch (const std::domain_error&) {
    }
  }
  EXPECT_GT(done, 150);
}

// ---------------------------------------------------------------------------
// The twisting cocycle

TEST(Twisting, ZeroSectionsGiveOne) {
  ChartAtlas a = fixtures::triangle_atlas();
  TwistingCocycle alpha = twisting_cocycle(a);
  auto& m = alpha.at({0, 1, 2});
  EXPECT_EQ(m.lambda, Rat(0));
  EXPECT_TRUE(is_zero(m.cls));
  EXPECT_EQ(m.sign, 1);
}

TEST(Twisting, GradientExample) {
  // f_01 = f_12 = 0 and f_02 affine with gradient 1, value 0 at q2:
  // alpha_012 = z^{-1} in the chart of 2
  ChartAtlas a = fixtures::triangle_atlas();
  a.sections[{0, 2}] = Section{{Rat(1), Rat(0)}, Rat(0)};
  TwistingCocycle alpha = twisting_cocycle(a);
  auto& m = alpha.at({0, 1, 2});
  EXPECT_EQ(m.lambda, Rat(0));
  EXPECT_EQ(m.cls, (ZVec{-1, 0}));
  EXPECT_EQ(m.sign, 1);
}

TEST(Twisting, SignCochainFlips) {
  ChartAtlas a = fixtures::triangle_atlas();
  a.sign_cochain[{0, 1, 2}] = 1;
  TwistingCocycle alpha = twisting_cocycle(a);
  EXPECT_EQ(alpha.at({0, 1, 2}).sign, -1);
}

TEST(Twisting, DegeneratePairsAreOne) {
  ChartAtlas a = fixtures::triangle_atlas();
  TwistingCocycle alpha = twisting_cocycle(a);
  TwistingMonomial m = alpha.pair_value(2, Chain{1, 2}, Chain{1});
  EXPECT_EQ(m.lambda, Rat(0));
  EXPECT_TRUE(is_zero(m.cls));
  EXPECT_EQ(m.sign, 1);
}

TEST(Cocycle, RandomSectionsPass) {
  // delta alpha = 1 holds identically in the section data
  fixtures::Rng rng(53);
  ChartAtlas a = fixtures::torus3_atlas();
  for (int trial = 0; trial < 10; ++trial) {
    fixtures::randomize_sections(a, rng);
    ChartRegistry reg(a);
    TwistingCocycle alpha = twisting_cocycle(a);
    EXPECT_TRUE(cocycle_check(alpha, reg).ok());
  }
}

TEST(Cocycle, CorruptedSectionFails) {
  fixtures::Rng rng(59);
  ChartAtlas a = fixtures::torus3_atlas();
  fixtures::randomize_sections(a, rng);
  ChartRegistry reg(a);
  TwistingCocycle alpha = twisting_cocycle(a);
  ASSERT_TRUE(cocycle_check(alpha, reg).ok());
  // corrupt one alpha value by 1/7 in the exponent
  alpha.values().begin()->second.lambda += Rat(1, 7);
  ValidationReport rep = cocycle_check(alpha, reg);
  EXPECT_FALSE(rep.ok());
  EXPECT_EQ(rep.errors.front().code, "cocycle failure");
}

TEST(Cocycle, NonCocycleSignsFail) {
  // alpha^v passes iff v passes its own cocycle validation
  fixtures::Rng rng(61);
  ChartAtlas a = fixtures::torus3_atlas();
  fixtures::randomize_sections(a, rng);
  for (int trial = 0; trial < 8; ++trial) {
    for (auto& t : enumerate_chains(a, 3))
      if (t.size() == 3) a.sign_cochain[t] = rng.integer(0, 1);
    bool v_ok = atlas_validate(a).ok();
    ChartRegistry reg(a);
    bool alpha_ok = cocycle_check(twisting_cocycle(a), reg).ok();
    EXPECT_EQ(v_ok, alpha_ok);
  }
}

TEST(Affinoid, JsonRoundTrip) {
  ChartAtlas a = fixtures::circle_atlas();
  ChartRegistry reg(a);
  AffinoidElement x = mono(reg, {0, 1}, "1/3", {2}, "-5/7", Prec(Rat(9)));
  x.add_term(reg, Rat(1, 2), {0}, FieldElem(Q, Rat(3)));
  AffinoidElement y = AffinoidElement::from_json(reg, Q, x.to_json());
  EXPECT_TRUE(x == y);
}

}  // namespace
