#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

using namespace gpstlab;
using namespace gpstlab::testing;

TEST(Params, BuiltinSetValidates) {
  const auto& P = example_params();
  EXPECT_EQ(P.p, 863u);
  const ValidationReport rep = validate_params(p863_spec());
  EXPECT_TRUE(rep.ok());
  for (const auto& c : rep.checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
  EXPECT_NE(rep.find("supersingular"), nullptr);
  EXPECT_NE(rep.find("basis PA,QA"), nullptr);
}

TEST(Params, DoubledQAFailsBasis) {
  const auto& P = example_params();
  ParamSpec s = p863_spec();
  const Point Q2 = scalar_mul(2, P.QA);
  s.QA = {Q2.x().c0(), Q2.x().c1(), Q2.y().c0(), Q2.y().c1()};
  const ValidationReport rep = validate_params(s);
  EXPECT_FALSE(rep.ok());
  EXPECT_FALSE(rep.find("basis PA,QA")->passed);
  EXPECT_FALSE(rep.find("order QA")->passed);
  EXPECT_EQ(rep.find("order QA")->detail, "order 2^4");
  EXPECT_TRUE(rep.find("basis PB,QB")->passed);
}

TEST(Params, StructuralErrors) {
  ParamSpec s = p863_spec();
  s.f = 2;  // 1727 = 11 * 157
  EXPECT_THROW(make_params(s), param_error);
  const ValidationReport rep = validate_params(s);
  EXPECT_FALSE(rep.ok());
  EXPECT_FALSE(rep.find("p = 2^n 3^m f - 1 prime")->passed);

  s = p863_spec();
  s.beta_rel = {0, 862};  // 863 = 3 mod 4, so x^2 + 1 is irreducible: accepted
  EXPECT_THROW(make_params(s), param_error);  // but the points are no longer on E0
  s = p863_spec();
  s.beta_rel = {0, 4};  // x^2 - 4 has roots
  EXPECT_THROW(make_params(s), param_error);
  s = p863_spec();
  s.PA[3] = (s.PA[3] + 1) % 863;
  EXPECT_THROW(make_params(s), param_error);
  s = p863_spec();
  s.E0 = {900, 0, 0, 0};
  EXPECT_THROW(make_params(s), param_error);
}

TEST(Keys, NormalizeExamples) {
  const auto& P = example_params();
  EXPECT_EQ(normalize_key({1, 10}, 5), (NormalizedKey{KeyForm::FirstUnit, 10}));
  EXPECT_EQ(normalize_key({3, 6}, 5), (NormalizedKey{KeyForm::FirstUnit, 2}));
  EXPECT_EQ(normalize_key({2, 7}, 5), (NormalizedKey{KeyForm::SecondUnit, 14}));
  EXPECT_EQ(14u, 2 * mod2n_inverse(7, 5) % 32);
  EXPECT_TRUE(brute_same_subgroup(scalar_mul(3, P.PA) + scalar_mul(6, P.QA), P.PA + scalar_mul(2, P.QA)));
  EXPECT_TRUE(brute_same_subgroup(scalar_mul(2, P.PA) + scalar_mul(7, P.QA), scalar_mul(14, P.PA) + P.QA));
  try {
    (void)normalize_key({2, 4}, 5);
    FAIL();
  } catch (const key_error& e) {
    EXPECT_STREQ(e.what(), "invalid key: not cyclic of maximal order");
  }
}

TEST(Keys, NormalizationPreservesSubgroup) {
  const auto& P = example_params();
  std::mt19937_64 rng(51);
  int checked = 0;
  while (checked < 100) {
    const u64 a1 = rng() % 32, a2 = rng() % 32;
    if ((a1 & 1) == 0 && (a2 & 1) == 0) {
      EXPECT_THROW(normalize_key({a1, a2}, 5), key_error);
      continue;
    }
    const NormalizedKey k = normalize_key({a1, a2}, 5);
    const Point original = scalar_mul(a1, P.PA) + scalar_mul(a2, P.QA);
    EXPECT_TRUE(brute_same_subgroup(original, key_kernel(k, P.PA, P.QA))) << a1 << "," << a2;
    ++checked;
  }
}

TEST(Exchange, PublishedPublicValues) {
  const auto& P = example_params();
  const AlicePublic A = alice_publics(P, {KeyForm::FirstUnit, 10});
  EXPECT_EQ(*A.EA, *model(P, 535, 40, 768, 720));
  EXPECT_EQ(point_order_smooth(A.phiA_PB, 3, 3), 3u);
  EXPECT_TRUE(is_torsion_basis(A.phiA_PB, A.phiA_QB, 3, 3));
  const BobPublic B = bob_publics(P, 1, 6);
  EXPECT_EQ(*B.EB, *model(P, 105, 0, 254, 0));
  EXPECT_EQ(B.R, pt(P, B.EB, {257, 151, 2, 594}));
  EXPECT_EQ(B.S, pt(P, B.EB, {386, 98, 58, 286}));
  EXPECT_EQ(brute_order(B.R), 32u);
  const SharedSecret s = shared_j(P, {KeyForm::FirstUnit, 10}, 1, 6);
  EXPECT_TRUE(s.agree());
  EXPECT_EQ(s.alice_j, P.element(117));
}

TEST(Exchange, DegenerateKeys) {
  const auto& P = example_params();
  const AlicePublic A = alice_publics(P, {KeyForm::FirstUnit, 0});
  EXPECT_EQ(j_invariant(A.EA), j_invariant(quotient_curve(P.PA, 2, 5)));
  const BobPublic B = bob_publics(P, 1, 0);
  EXPECT_EQ(j_invariant(B.EB), j_invariant(quotient_curve(P.PB, 3, 3)));
  EXPECT_TRUE(shared_j(P, {KeyForm::FirstUnit, 0}, 1, 0).agree());
  EXPECT_THROW(bob_publics(P, 0, 0), isogeny_error);
  EXPECT_THROW(bob_publics(P, 3, 3), isogeny_error);
  try {
    (void)bob_publics(P, 0, 0);
  } catch (const isogeny_error& e) {
    EXPECT_NE(std::string(e.what()).find("kernel generator has wrong order"), std::string::npos);
  }
}

TEST(Exchange, SharedJAgreesOnRandomKeys) {
  const auto& P = example_params();
  std::mt19937_64 rng(61);
  int done = 0;
  while (done < 60) {
    const KeyForm form = rng() % 4 == 0 ? KeyForm::SecondUnit : KeyForm::FirstUnit;
    const NormalizedKey key{form, form == KeyForm::SecondUnit ? (rng() % 16) * 2 : rng() % 32};
    u64 b1 = rng() % 27, b2 = rng() % 27;
    if (b1 % 3 == 0 && b2 % 3 == 0) continue;
    const SharedSecret s = shared_j(P, key, b1, b2);
    EXPECT_TRUE(s.agree()) << key.alpha << " " << b1 << " " << b2;
    ++done;
  }
}

TEST(Exchange, GeneratedParameterSet) {
  const SidhParams big = make_params(generate_params(8, 1));
  EXPECT_EQ(big.p, 62207u);
  EXPECT_TRUE(validate_params(big).ok());
  std::mt19937_64 rng(71);
  for (int k = 0; k < 5; ++k) {
    const NormalizedKey key{KeyForm::FirstUnit, rng() % big.two_torsion()};
    EXPECT_TRUE(shared_j(big, key, 1, rng() % big.three_torsion()).agree());
  }
}
