#include <gtest/gtest.h>

#include <random>
#include <set>
#include <vector>

#include "gpstlab/arith.hpp"

using namespace gpstlab;

namespace {

const Fp2Context& f863() {
  static const auto ctx = Fp2Context::make(863, 1, 863 - 5);
  return *ctx;
}

Fp2Element random_element(const Fp2Context& F, std::mt19937_64& rng) {
  std::uniform_int_distribution<u64> d(0, F.p() - 1);
  const u64 c0 = d(rng);
  return F.element(c0, d(rng));
}

}  // namespace

TEST(PrimeField, RejectsComposites) {
  EXPECT_THROW(PrimeField(1727), arith_error);
  EXPECT_THROW(PrimeField(2), arith_error);
  EXPECT_NO_THROW(PrimeField(863));
  EXPECT_TRUE(is_prime_u64(62207));
  EXPECT_FALSE(is_prime_u64(62209));
}

TEST(Fp2, BetaSquaredFollowsRelation) {
  const auto& F = f863();
  const Fp2Element b2 = F.beta() * F.beta();
  EXPECT_EQ(b2.c0(), 858u);
  EXPECT_EQ(b2.c1(), 1u);
}

TEST(Fp2, MultiplicativeIdentity) {
  const auto& F = f863();
  std::mt19937_64 rng(1);
  for (int k = 0; k < 100; ++k) {
    const auto a = random_element(F, rng);
    EXPECT_EQ(a * F.one(), a);
  }
}

TEST(Fp2, InverseMatchesExhaustiveSearch) {
  const auto& F = f863();
  std::mt19937_64 rng(2);
  for (int k = 0; k < 100; ++k) {
    Fp2Element a = random_element(F, rng);
    if (a.is_zero()) a = F.one();
    // oracle: scan every element of F_{p^2} for the unique x with a*x = 1
    std::optional<Fp2Element> found;
    for (u64 c1 = 0; c1 < F.p() && !found; ++c1) {
      for (u64 c0 = 0; c0 < F.p(); ++c0) {
        const Fp2Element x = F.element(c0, c1);
        if (F.mul(a, x).is_one()) {
          found = x;
          break;
        }
      }
    }
    ASSERT_TRUE(found.has_value());
    EXPECT_EQ(F.inv(a), *found);
  }
}

TEST(Fp2, InverseOfZeroThrows) {
  const auto& F = f863();
  try {
    (void)F.inv(F.zero());
    FAIL();
  } catch (const arith_error& e) {
    EXPECT_STREQ(e.what(), "division by zero in F_{p^2}");
  }
}

TEST(Fp2, ExhaustiveInversesSmallField) {
  const auto ctx = Fp2Context::make(23, 0, 22);  // beta^2 = -1, 23 = 3 mod 4
  const auto& F = *ctx;
  for (u64 c1 = 0; c1 < 23; ++c1)
    for (u64 c0 = 0; c0 < 23; ++c0) {
      const auto a = F.element(c0, c1);
      if (a.is_zero()) continue;
      EXPECT_TRUE((a * F.inv(a)).is_one());
    }
}

TEST(Fp2, ReducibleRelationRejectedLikeRootSearch) {
  const u64 p = 23;
  for (u64 u = 0; u < p; ++u) {
    for (u64 v = 0; v < p; ++v) {
      bool has_root = false;
      for (u64 x = 0; x < p; ++x) {
        if ((x * x % p + p * p - u * x % p - v) % p == 0) has_root = true;
      }
      if (has_root) {
        EXPECT_THROW(Fp2Context(p, u, v), arith_error) << u << " " << v;
      } else {
        EXPECT_NO_THROW(Fp2Context(p, u, v)) << u << " " << v;
      }
    }
  }
}

TEST(Fp2, FieldAxiomsOnRandomTriples) {
  const auto& F = f863();
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    const auto a = random_element(F, rng), b = random_element(F, rng), c = random_element(F, rng);
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ((a + b) + c, a + (b + c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ(a * b, b * a);
    EXPECT_EQ(a + b, b + a);
    EXPECT_TRUE((a - a).is_zero());
    EXPECT_TRUE((a + (-a)).is_zero());
  }
}

TEST(Fp2, SquaresAgreeWithSquaringTable) {
  const auto ctx = Fp2Context::make(23, 0, 22);
  const auto& F = *ctx;
  std::set<std::pair<u64, u64>> squares;
  for (u64 c1 = 0; c1 < 23; ++c1)
    for (u64 c0 = 0; c0 < 23; ++c0) {
      const auto s = F.element(c0, c1) * F.element(c0, c1);
      squares.insert({s.c0(), s.c1()});
    }
  for (u64 c1 = 0; c1 < 23; ++c1)
    for (u64 c0 = 0; c0 < 23; ++c0) {
      const auto a = F.element(c0, c1);
      const bool sq = squares.count({c0, c1}) != 0;
      EXPECT_EQ(F.is_square(a), sq);
      if (sq) {
        const auto r = F.sqrt(a);
        EXPECT_EQ(r * r, a);
      } else {
        EXPECT_THROW((void)F.sqrt(a), arith_error);
      }
    }
}

TEST(Fp2, SqrtOfRandomSquares) {
  const auto& F = f863();
  std::mt19937_64 rng(4);
  for (int k = 0; k < 200; ++k) {
    const auto a = random_element(F, rng);
    const auto r = F.sqrt(a * a);
    EXPECT_TRUE(r == a || r == -a);
  }
}

// ---------------------------------------------------------------------------

TEST(Mod2n, InverseExamples) {
  EXPECT_EQ(mod2n_inverse(17, 5), 17u);
  EXPECT_EQ(mod2n_inverse(9, 5), 25u);
  for (unsigned n = 3; n < 20; ++n) EXPECT_EQ(mod2n_inverse(1, n), 1u);
}

TEST(Mod2n, InverseMatchesExhaustiveSearch) {
  for (unsigned n = 3; n <= 11; ++n) {
    const u64 mod = u64{1} << n;
    for (u64 x = 1; x < mod; x += 2) {
      u64 want = 0;
      for (u64 y = 1; y < mod; y += 2)
        if (x * y % mod == 1) want = y;
      EXPECT_EQ(mod2n_inverse(x, n), want) << x << " mod 2^" << n;
    }
  }
}

TEST(Mod2n, InverseOfEvenThrows) {
  try {
    (void)mod2n_inverse(6, 5);
    FAIL();
  } catch (const arith_error& e) {
    EXPECT_STREQ(e.what(), "not a unit mod 2^n");
  }
}

TEST(Mod2n, SqrtExamples) {
  EXPECT_EQ(mod2n_sqrt(mod2n_inverse(17, 5), 5), 7u);
  EXPECT_EQ(mod2n_sqrt(mod2n_inverse(9, 5), 5), 5u);
  EXPECT_EQ(mod2n_sqrt(1, 5), 1u);
  const auto roots = mod2n_sqrt_roots(1, 5);
  EXPECT_EQ(roots, (std::array<u64, 4>{1, 15, 17, 31}));
}

TEST(Mod2n, SqrtMatchesExhaustiveSearch) {
  for (unsigned n = 3; n <= 12; ++n) {
    const u64 mod = u64{1} << n;
    for (u64 x = 1; x < mod; x += 8) {
      std::vector<u64> want;
      for (u64 r = 0; r < mod; ++r)
        if (r * r % mod == x) want.push_back(r);
      ASSERT_EQ(want.size(), 4u);
      const auto got = mod2n_sqrt_roots(x, n);
      EXPECT_TRUE(std::equal(want.begin(), want.end(), got.begin())) << x << " mod 2^" << n;
      EXPECT_EQ(mod2n_sqrt(x, n), want.front());
    }
  }
}

TEST(Mod2n, NonResiduesThrow) {
  for (u64 x : {3u, 5u, 7u, 2u, 4u, 12u}) {
    try {
      (void)mod2n_sqrt(x, 5);
      FAIL() << x;
    } catch (const arith_error& e) {
      EXPECT_STREQ(e.what(), "no square root mod 2^n");
    }
  }
}

TEST(Mod2n, LargeExponentRoots) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 100; ++k) {
    const unsigned n = 3 + rng() % 60;
    const u64 mask = (u64{1} << n) - 1;
    const u64 x = ((rng() << 3) | 1) & mask;
    for (u64 r : mod2n_sqrt_roots(x, n)) EXPECT_EQ((r * r) & mask, x);
    const u64 odd = rng() | 1;
    EXPECT_EQ((odd * mod2n_inverse(odd, n)) & mask, 1u);
  }
}

TEST(Mod2n, RootEquivalence) {
  EXPECT_TRUE(mod2n_root_equivalent(7, 25, 5));
  EXPECT_TRUE(mod2n_root_equivalent(5, 27, 5));
  EXPECT_FALSE(mod2n_root_equivalent(7, 5, 5));
}
