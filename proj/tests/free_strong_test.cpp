#include <gtest/gtest.h>

#include "support.hpp"

using namespace sigma;

namespace {

Budget universe(std::size_t size, std::size_t omega) {
  Budget b;
  b.max_finite_size = size;
  b.max_omega_elems = omega;
  return b;
}

Hom<Pm, ExtNat> pm_to_zero(const SigmaInstance<Pm>& pm, const SigmaInstance<ExtNat>& en) {
  return verify_hom<Pm, ExtNat>("const0", [](const Pm&) { return ExtNat{0}; }, pm, en, construction_budget());
}

Hom<ExtNat, ExtNat> ext_nat_id(const SigmaInstance<ExtNat>& en) {
  return verify_hom<ExtNat, ExtNat>("id", [](const ExtNat& x) { return x; }, en, en, construction_budget());
}

using PmClass = QuotientClass<Pm>;

}  // namespace

TEST(LeadsTo, BlocksSumToTheTarget) {
  const auto pm = pm_instance();
  const Family<Pm> a{Pm::plus, Pm::plus, Pm::minus};
  const auto v = leads_to(pm, a, Family<Pm>{Pm::plus});
  ASSERT_TRUE(v.holds);
  EXPECT_EQ(step_target(pm, *v.step), Family<Pm>{Pm::plus});
  // {+,+} has no summable split that yields a single element.
  EXPECT_FALSE(leads_to(pm, Family<Pm>{Pm::plus, Pm::plus}, Family<Pm>{Pm::minus}).holds);
  // Empty blocks add zeros.
  EXPECT_TRUE(leads_to(pm, Family<Pm>{Pm::plus}, Family<Pm>{Pm::plus, Pm::zero, Pm::zero}).holds);
}

TEST(LeadsTo, PreservesSumsInStrongInstances) {
  const auto en = ext_nat_instance();
  const Congruence<ExtNat> c(en, universe(0, 0), 1);
  for (const auto& a : budget_families(en, universe(3, 1))) {
    for (const auto& link : c.successors(a)) {
      EXPECT_EQ(en.sum(link.to), en.sum(a)) << format_family(a, ext_nat_syntax());
    }
  }
}

TEST(StepTarget, RejectsBlocksThatDoNotRecombine) {
  const auto pm = pm_instance();
  LeadsStep<Pm> step{Family<Pm>{Pm::plus}, Family<Family<Pm>>{Family<Pm>{Pm::minus}}, 0};
  EXPECT_FALSE(step_target(pm, step).has_value());
  step.blocks = Family<Family<Pm>>{Family<Pm>{Pm::plus}};
  step.empty_blocks = 2;
  EXPECT_EQ(step_target(pm, step), (Family<Pm>{Pm::plus, Pm::zero, Pm::zero}));
}

TEST(Congruence, ChainsCombineAcrossDisjointUnions) {
  const auto pm = pm_instance();
  const Congruence<Pm> c(pm, universe(3, 0));
  const Family<Pm> a{Pm::plus, Pm::plus, Pm::minus}, a2{Pm::plus};
  const Family<Pm> b{Pm::minus, Pm::plus}, b2{};
  const auto left = c.equivalent(a, a2);
  const auto right = c.equivalent(b, b2);
  ASSERT_TRUE(left.related);
  ASSERT_TRUE(right.related);
  EXPECT_TRUE(verify_chain(pm, a, a2, left.chain));
  EXPECT_TRUE(verify_chain(pm, b, b2, right.chain));
  const auto joined = congruent_union(left.chain, a2, right.chain, b);
  EXPECT_TRUE(verify_chain(pm, disjoint_union(a, b), disjoint_union(a2, b2), joined));
}

TEST(Congruence, VerifyChainRejectsForgedLinks) {
  const auto pm = pm_instance();
  const Congruence<Pm> c(pm, universe(3, 0));
  const Family<Pm> a{Pm::plus, Pm::plus, Pm::minus}, b{Pm::plus};
  auto v = c.equivalent(a, b);
  ASSERT_TRUE(v.related);
  ASSERT_FALSE(v.chain.empty());
  EXPECT_FALSE(verify_chain(pm, a, Family<Pm>{Pm::minus}, v.chain));
  v.chain.front().to = Family<Pm>{Pm::minus};
  EXPECT_FALSE(verify_chain(pm, a, Family<Pm>{Pm::minus}, v.chain));
}

TEST(Congruence, RepresentativeIsTheLeastUniverseMember) {
  const auto pm = pm_instance();
  const Congruence<Pm> c(pm, universe(3, 0));
  for (const auto& members : c.classes()) {
    const auto least = *std::min_element(members.begin(), members.end());
    for (const auto& m : members) EXPECT_EQ(c.representative(m), least);
  }
}

TEST(FreeStrong, ExtNatIdentityClassesAreSums) {
  const auto en = ext_nat_instance();
  const auto id = ext_nat_id(en);
  const auto A = build_Af(en, en, id, universe(2, 1));
  const auto& u = A.congruence->universe();
  for (const auto& a : u) {
    for (const auto& b : u) {
      EXPECT_EQ(A.congruence->representative(a) == A.congruence->representative(b), en.sum(a) == en.sum(b))
          << format_family(a, ext_nat_syntax()) << " vs " << format_family(b, ext_nat_syntax());
    }
  }
  const auto fac = eta_and_factorize(A, id);
  EXPECT_TRUE(fac.diagram_ok());
}

TEST(FreeStrong, PmSeparatesSignsOnlyWithoutOmegaSwindles) {
  // With one ω entry the universe cannot see {+:ω, -:ω}; with two it can,
  // and that family links every class to the empty one.
  const auto pm = pm_instance();
  const auto en = ext_nat_instance();
  const auto f = pm_to_zero(pm, en);
  const auto small = build_Af(pm, en, f, universe(3, 1));
  EXPECT_NE(small.class_of({Pm::plus}), small.class_of({Pm::minus}));

  const auto large = build_Af(pm, en, f, universe(3, 2));
  EXPECT_EQ(large.class_of({Pm::plus}), large.class_of({Pm::minus}));
  EXPECT_EQ(large.class_of({Pm::plus}), large.class_of({}));
}

TEST(FreeStrong, PmQuotientSums) {
  const auto pm = pm_instance();
  const auto en = ext_nat_instance();
  const auto f = pm_to_zero(pm, en);
  const auto A = build_Af(pm, en, f, universe(3, 2));
  EXPECT_EQ(A.class_of({Pm::plus, Pm::plus, Pm::minus}), A.class_of({Pm::plus}));
  const auto chain = A.congruence->equivalent({Pm::plus, Pm::plus, Pm::minus}, {Pm::plus});
  ASSERT_TRUE(chain.related);
  EXPECT_TRUE(verify_chain(pm, Family<Pm>{Pm::plus, Pm::plus, Pm::minus}, Family<Pm>{Pm::plus},
                           chain.chain));
  const auto plus = A.class_of({Pm::plus}), minus = A.class_of({Pm::minus});
  EXPECT_EQ(A.instance.sum(Family<PmClass>{plus, minus}), SumResult<PmClass>(A.class_of({})));
  const auto fac = eta_and_factorize(A, f);
  EXPECT_TRUE(fac.diagram_ok());
}

TEST(FreeStrong, BuildAfNeedsVerifiedMapIntoStrongTarget) {
  const auto pm = pm_instance();
  const Hom<Pm, Pm> id("id", pm, pm, [](const Pm& x) { return x; }, construction_budget());
  EXPECT_THROW(build_Af(pm, pm, id, universe(2, 0)), ConstructionError);
  const Hom<Pm, ExtNat> unverified("c", pm, ext_nat_instance(), [](const Pm&) { return ExtNat{0}; }, std::nullopt);
  EXPECT_THROW(build_Af(pm, ext_nat_instance(), unverified, universe(2, 0)), ConstructionError);
}

TEST(IntersectInstances, SumsWhereEveryPartAgrees) {
  const auto en = ext_nat_instance();
  const SigmaInstance<ExtNat> capped("capped", Carrier<ExtNat>::finite({ExtNat{0}, ExtNat{1}, ExtNat{2}}),
                                     ExtNat{0},
                                     [en](const Family<ExtNat>& f) -> SumResult<ExtNat> {
                                       auto s = en.sum_unchecked(f);
                                       if (!s || s->infinite || s->value > 2) return std::nullopt;
                                       return s;
                                     },
                                     Flavor::strong);
  const auto both = intersect_instances<ExtNat>({en, capped});
  EXPECT_EQ(both.carrier().samples(), (std::vector<ExtNat>{ExtNat{0}, ExtNat{1}, ExtNat{2}}));
  EXPECT_FALSE(both.contains(ExtNat::inf()));
  EXPECT_EQ(both.sum({ExtNat{1}, ExtNat{1}}), SumResult<ExtNat>(ExtNat{2}));
  EXPECT_EQ(both.sum({ExtNat{2}, ExtNat{1}}), SumResult<ExtNat>());
  EXPECT_EQ(both.declared_flavor(), Flavor::strong);
  EXPECT_FALSE(check_strong(both, universe(3, 1)).any_failure());
  EXPECT_THROW(intersect_instances<ExtNat>({}), ConstructionError);
}
