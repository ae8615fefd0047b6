#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "mirror/sheaf.hpp"

using namespace mirror;

namespace {

const BaseField Q = BaseField::rationals();
const Prec E8 = Prec(Rat(8));

// The categorical identities are exact; computations run untruncated and the
// two sides are compared inside the stated precision window, which is where a
// truncated run is meaningful.
bool morphisms_equal(const ChartRegistry& reg, const SheafMorphism& a, const SheafMorphism& b,
                     Prec window = Prec{}) {
  return morphism_truncate(reg, morphism_sub(reg, a, b), window).is_zero();
}

struct Ctx {
  ChartAtlas atlas;
  std::unique_ptr<ChartRegistry> reg;
  TwistingCocycle alpha;

  explicit Ctx(ChartAtlas a) : atlas(std::move(a)) {
    reg = std::make_unique<ChartRegistry>(atlas);
    alpha = twisting_cocycle(atlas);
  }
};

TEST(SheafValidate, ZeroObject) {
  Ctx s(fixtures::triangle_atlas());
  TwistedSheaf F;
  for (auto& v : s.atlas.vertices) F.modules[v.id] = {SheafGenerator{"x", 0}};
  EXPECT_TRUE(sheaf_validate(*s.reg, s.alpha, F, E8).ok());
}

TEST(SheafValidate, TwistedLineBundle) {
  // u_ik = alpha^v_ijk u_jk u_ij by construction, across random section data
  fixtures::Rng rng(71);
  for (auto make : {fixtures::triangle_atlas, fixtures::circle_atlas}) {
    ChartAtlas atlas = make();
    fixtures::randomize_sections(atlas, rng);
    Ctx s(std::move(atlas));
    std::map<VertexId, std::pair<Rat, ZVec>> gauge;
    for (auto& v : s.atlas.vertices) {
      gauge[v.id] = {rng.nonneg_rational(3, 2), ZVec(s.atlas.dimension, 0)};
      gauge[v.id].second[0] = rng.integer(-1, 1);
    }
    auto [F, rep] =
        line_bundle(*s.reg, s.alpha, fixtures::gauged_transitions(*s.reg, gauge), E8);
    EXPECT_TRUE(rep.ok()) << rep.to_json().dump(2);
  }
}

TEST(SheafValidate, PerturbedBundleFailsWithValuationOne) {
  Ctx s(fixtures::triangle_atlas());
  auto trans = fixtures::trivial_transitions(*s.reg);
  // multiply u_01 by (1 + T)
  AffinoidElement bump = AffinoidElement::constant(*s.reg, {0, 1}, Q, 1, E8)
                             .add(*s.reg, AffinoidElement::monomial(
                                              *s.reg, {0, 1}, Q, 1, ZVec{0, 0},
                                              FieldElem::one(Q), E8));
  trans[{0, 1}] = trans[{0, 1}].mul(*s.reg, bump);
  auto [F, rep] = line_bundle(*s.reg, s.alpha, trans, E8);
  ASSERT_FALSE(rep.ok());
  AffMat res = sheaf_residual(*s.reg, s.alpha, F, {0, 1, 2}, E8);
  ASSERT_FALSE(res.is_zero());
  EXPECT_EQ(res.e[0][0].terms().begin()->first.lambda, Rat(1));
}

TEST(SheafValidate, NonCompatibleTransitionsFail) {
  Ctx s(fixtures::triangle_atlas());
  auto trans = fixtures::trivial_transitions(*s.reg);
  trans[{0, 2}] = AffinoidElement::monomial(*s.reg, {0, 2}, Q, Rat(1, 2), ZVec{1, 0},
                                            FieldElem::one(Q), E8);
  auto [F, rep] = line_bundle(*s.reg, s.alpha, trans, E8);
  EXPECT_FALSE(rep.ok());
  EXPECT_EQ(rep.errors.front().code, "quadratic equation");
}

TEST(SheafValidate, Rank2AndGradedAndDifferential) {
  fixtures::Rng rng(73);
  {
    Ctx s(fixtures::torus2_atlas());
    TwistedSheaf F = fixtures::rank2_constant_gauge(*s.reg, rng, E8);
    EXPECT_TRUE(sheaf_validate(*s.reg, s.alpha, F, E8).ok());
    TwistedSheaf G = fixtures::graded_sum(*s.reg, rng, E8);
    EXPECT_TRUE(sheaf_validate(*s.reg, s.alpha, G, E8).ok());
  }
  {
    Ctx s(fixtures::interval_atlas());
    TwistedSheaf F = fixtures::interval_differential_sheaf(*s.reg, E8);
    EXPECT_TRUE(sheaf_validate(*s.reg, s.alpha, F, E8).ok())
        << sheaf_validate(*s.reg, s.alpha, F, E8).to_json().dump(2);
  }
}

TEST(HomComplex, ChainCountOnCircle) {
  // endomorphisms of a line bundle on the three-vertex circle: one component
  // family per chain, six chains in all
  Ctx s(fixtures::circle_atlas());
  auto [F, rep] = line_bundle(*s.reg, s.alpha, fixtures::trivial_transitions(*s.reg), E8);
  ASSERT_TRUE(rep.ok());
  auto basis = hom_complex_basis(*s.reg, F, F, Rat(8));
  std::set<Chain> chains;
  for (auto& g : basis) chains.insert(g.I);
  EXPECT_EQ(chains.size(), 6u);
  // degree bookkeeping: an edge component between degree-zero generators has
  // total degree 1
  for (auto& g : basis)
    if (g.I.size() == 2) EXPECT_EQ(g.degree, 1);
}

TEST(HomComplex, RankZeroIsEmpty) {
  Ctx s(fixtures::circle_atlas());
  TwistedSheaf F;  // no generators anywhere
  for (auto& v : s.atlas.vertices) F.modules[v.id] = {};
  EXPECT_TRUE(hom_complex_basis(*s.reg, F, F, Rat(8)).empty());
}

TEST(Mu1, IdentityComponentsGiveTransitionDefect) {
  // F differentials zero, T the vertexwise identity: mu1 T lives on edges as
  // (u'_ij - u_ij)-type terms, and vanishes for F = F'
  fixtures::Rng rng(79);
  Ctx s(fixtures::circle_atlas());
  std::map<VertexId, std::pair<Rat, ZVec>> gauge;
  for (auto& v : s.atlas.vertices) gauge[v.id] = {Rat(v.id, 3), ZVec{0}};
  auto [F, repF] = line_bundle(*s.reg, s.alpha, fixtures::trivial_transitions(*s.reg), E8);
  auto [G, repG] = line_bundle(*s.reg, s.alpha, fixtures::gauged_transitions(*s.reg, gauge), E8);
  ASSERT_TRUE(repF.ok() && repG.ok());
  SheafMorphism id = identity_morphism(*s.reg, F, E8);
  SheafMorphism dT = mu1(*s.reg, s.alpha, F, G, id, E8);
  for (auto& [I, m] : dT.components) EXPECT_EQ(I.size(), 2u);
  EXPECT_FALSE(dT.is_zero());
  EXPECT_TRUE(mu1(*s.reg, s.alpha, F, F, id, E8).is_zero());
}

TEST(Mu1, NoVertexPartWithoutVertexDifferentials) {
  Ctx s(fixtures::circle_atlas());
  auto [F, rep] = line_bundle(*s.reg, s.alpha, fixtures::trivial_transitions(*s.reg), E8);
  SheafMorphism T;
  T.degree = 0;
  AffMat m = AffMat::zero(Chain{0}, Q, E8, 1, 1);
  m.e[0][0] = AffinoidElement::constant(*s.reg, {0}, Q, 3, E8);
  T.set(Chain{0}, std::move(m));
  SheafMorphism dT = mu1(*s.reg, s.alpha, F, F, T, E8);
  EXPECT_EQ(dT.components.count(Chain{0}), 0u);
  EXPECT_EQ(dT.components.count(Chain{1}), 0u);
}

// the central property: mu1 squares to zero over validated sheaves
TEST(Mu1, SquaresToZero) {
  fixtures::Rng rng(83);
  auto check = [&](Ctx& s, const TwistedSheaf& F, const TwistedSheaf& G, int count) {
    ASSERT_TRUE(sheaf_validate(*s.reg, s.alpha, F, E8).ok());
    ASSERT_TRUE(sheaf_validate(*s.reg, s.alpha, G, E8).ok());
    for (int k = 0; k < count; ++k) {
      SheafMorphism T =
          fixtures::random_morphism(*s.reg, F, G, rng.integer(0, 2), rng, Prec{});
      SheafMorphism dd =
          mu1(*s.reg, s.alpha, F, G, mu1(*s.reg, s.alpha, F, G, T, Prec{}), Prec{});
      EXPECT_TRUE(dd.is_zero());
      // and the truncated evaluation is consistent with the window
      SheafMorphism ddE = mu1(*s.reg, s.alpha, F, G, mu1(*s.reg, s.alpha, F, G, T, E8), E8);
      EXPECT_TRUE(morphism_truncate(*s.reg, ddE, ddE.is_zero() ? E8 : Prec{}).is_zero());
    }
  };
  {
    Ctx s(fixtures::triangle_atlas());
    fixtures::Rng g(5);
    std::map<VertexId, std::pair<Rat, ZVec>> gauge;
    for (auto& v : s.atlas.vertices) gauge[v.id] = {Rat(v.id, 2), ZVec{g.integer(-1, 1), 0}};
    auto [F, repF] = line_bundle(*s.reg, s.alpha, fixtures::trivial_transitions(*s.reg), E8);
    auto [G, repG] =
        line_bundle(*s.reg, s.alpha, fixtures::gauged_transitions(*s.reg, gauge), E8);
    ASSERT_TRUE(repF.ok() && repG.ok());
    check(s, F, G, 8);
    TwistedSheaf H = fixtures::graded_sum(*s.reg, rng, E8);
    check(s, F, H, 8);
    check(s, H, H, 8);
  }
  {
    Ctx s(fixtures::interval_atlas());
    TwistedSheaf F = fixtures::interval_differential_sheaf(*s.reg, E8);
    auto [L, repL] = line_bundle(*s.reg, s.alpha, fixtures::trivial_transitions(*s.reg), E8);
    ASSERT_TRUE(repL.ok());
    check(s, F, F, 10);
    check(s, L, F, 10);
    check(s, F, L, 10);
  }
}

TEST(Mu2, StrictUnit) {
  fixtures::Rng rng(89);
  Ctx s(fixtures::triangle_atlas());
  TwistedSheaf F = fixtures::graded_sum(*s.reg, rng, E8);
  auto [G, rep] = line_bundle(*s.reg, s.alpha, fixtures::trivial_transitions(*s.reg), E8);
  SheafMorphism idF = identity_morphism(*s.reg, F, E8);
  SheafMorphism idG = identity_morphism(*s.reg, G, E8);
  for (int k = 0; k < 10; ++k) {
    SheafMorphism T = fixtures::random_morphism(*s.reg, F, G, rng.integer(0, 2), rng, E8);
    EXPECT_TRUE(morphisms_equal(*s.reg, mu2(*s.reg, s.alpha, F, G, G, idG, T, E8), T));
    EXPECT_TRUE(morphisms_equal(*s.reg, mu2(*s.reg, s.alpha, F, F, G, T, idF, E8), T));
  }
}

TEST(Mu2, AssociativityAndLeibniz) {
  fixtures::Rng rng(97);
  auto run = [&](Ctx& s, const TwistedSheaf& F, const TwistedSheaf& G, const TwistedSheaf& H,
                 const TwistedSheaf& K, int count) {
    const Prec X{};  // exact
    for (int k = 0; k < count; ++k) {
      SheafMorphism T = fixtures::random_morphism(*s.reg, F, G, rng.integer(0, 2), rng, X);
      SheafMorphism S = fixtures::random_morphism(*s.reg, G, H, rng.integer(0, 2), rng, X);
      SheafMorphism R = fixtures::random_morphism(*s.reg, H, K, rng.integer(0, 2), rng, X);
      // associativity
      SheafMorphism left =
          mu2(*s.reg, s.alpha, F, G, K, mu2(*s.reg, s.alpha, G, H, K, R, S, X), T, X);
      SheafMorphism right =
          mu2(*s.reg, s.alpha, F, H, K, R, mu2(*s.reg, s.alpha, F, G, H, S, T, X), X);
      EXPECT_TRUE(morphisms_equal(*s.reg, left, right));
      // Leibniz, compared inside the window
      SheafMorphism lhs =
          mu1(*s.reg, s.alpha, F, H, mu2(*s.reg, s.alpha, F, G, H, S, T, X), X);
      SheafMorphism rhs = mu2(*s.reg, s.alpha, F, G, H, mu1(*s.reg, s.alpha, G, H, S, X), T, X);
      SheafMorphism second =
          mu2(*s.reg, s.alpha, F, G, H, S, mu1(*s.reg, s.alpha, F, G, T, X), X);
      NovikovScalar sg = NovikovScalar::monomial(Q, 0, FieldElem::sign(Q, S.degree));
      rhs = morphism_axpy(*s.reg, std::move(rhs), sg, second);
      EXPECT_TRUE(morphisms_equal(*s.reg, lhs, rhs, E8));
      EXPECT_TRUE(morphisms_equal(*s.reg, lhs, rhs));
    }
  };
  {
    Ctx s(fixtures::triangle_atlas());
    fixtures::Rng g(7);
    std::map<VertexId, std::pair<Rat, ZVec>> gauge;
    for (auto& v : s.atlas.vertices) gauge[v.id] = {Rat(v.id, 4), ZVec{0, g.integer(-1, 1)}};
    auto [F, repF] = line_bundle(*s.reg, s.alpha, fixtures::trivial_transitions(*s.reg), E8);
    auto [G, repG] =
        line_bundle(*s.reg, s.alpha, fixtures::gauged_transitions(*s.reg, gauge), E8);
    TwistedSheaf H = fixtures::graded_sum(*s.reg, rng, E8);
    run(s, F, G, H, F, 6);
  }
  {
    Ctx s(fixtures::interval_atlas());
    TwistedSheaf F = fixtures::interval_differential_sheaf(*s.reg, E8);
    auto [L, rep] = line_bundle(*s.reg, s.alpha, fixtures::trivial_transitions(*s.reg), E8);
    run(s, F, L, F, L, 8);
    run(s, F, F, F, F, 8);
  }
}

TEST(Mu1, RaisesDegreeByOne) {
  fixtures::Rng rng(101);
  Ctx s(fixtures::triangle_atlas());
  TwistedSheaf F = fixtures::graded_sum(*s.reg, rng, E8);
  SheafMorphism T = fixtures::random_morphism(*s.reg, F, F, 1, rng, E8);
  SheafMorphism dT = mu1(*s.reg, s.alpha, F, F, T, E8);
  EXPECT_EQ(dT.degree, 2);
  EXPECT_TRUE(morphism_shape_check(*s.reg, F, F, dT).ok());
  SheafMorphism S = fixtures::random_morphism(*s.reg, F, F, 0, rng, E8);
  EXPECT_EQ(mu2(*s.reg, s.alpha, F, F, F, S, T, E8).degree, 1);
}

TEST(LineBundle, GConventionFactorIsAUnit) {
  Ctx s(fixtures::triangle_atlas());
  fixtures::Rng rng(103);
  fixtures::randomize_sections(s.atlas, rng);
  s.reg = std::make_unique<ChartRegistry>(s.atlas);
  s.alpha = twisting_cocycle(s.atlas);
  AffinoidElement g = g_convention_factor(*s.reg, s.alpha, {0, 1, 2}, E8);
  EXPECT_EQ(g.terms().size(), 1u);  // a monomial, hence invertible
}

}  // namespace
