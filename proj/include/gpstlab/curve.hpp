#pragma once

#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gpstlab/arith.hpp"

namespace gpstlab {

/// Short Weierstrass curve y^2 = x^3 + a x + b over F_{p^2}.
class Curve {
 public:
  Curve(std::shared_ptr<const Fp2Context> field, Fp2Element a, Fp2Element b)
      : field_(std::move(field)), a_(rebind(a)), b_(rebind(b)) {
    if (discriminant_core().is_zero()) throw curve_error("singular curve: 4a^3 + 27b^2 = 0");
  }

  const std::shared_ptr<const Fp2Context>& field_ptr() const { return field_; }
  const Fp2Context& field() const { return *field_; }
  const Fp2Element& a() const { return a_; }
  const Fp2Element& b() const { return b_; }

  /// 4a^3 + 27b^2.
  Fp2Element discriminant_core() const {
    const Fp2Context& F = *field_;
    return F.add(F.scale(F.mul(F.mul(a_, a_), a_), 4), F.scale(F.mul(b_, b_), 27));
  }

  Fp2Element rhs(const Fp2Element& x) const {
    const Fp2Context& F = *field_;
    return F.add(F.mul(F.add(F.mul(x, x), a_), x), b_);
  }

  bool contains(const Fp2Element& x, const Fp2Element& y) const { return field_->mul(y, y) == rhs(x); }

  bool operator==(const Curve& o) const { return field_->same_field(*o.field_) && a_ == o.a_ && b_ == o.b_; }

  std::string to_string() const { return "y^2 = x^3 + (" + a_.to_string() + ")x + (" + b_.to_string() + ")"; }
  friend std::ostream& operator<<(std::ostream& os, const Curve& E) { return os << E.to_string(); }

 private:
  Fp2Element rebind(const Fp2Element& e) const { return field_->element(e.c0(), e.c1()); }

  std::shared_ptr<const Fp2Context> field_;
  Fp2Element a_;
  Fp2Element b_;
};

using CurvePtr = std::shared_ptr<const Curve>;

inline CurvePtr make_curve(std::shared_ptr<const Fp2Context> field, const Fp2Element& a, const Fp2Element& b) {
  return std::make_shared<const Curve>(std::move(field), a, b);
}

inline bool same_curve(const CurvePtr& E1, const CurvePtr& E2) { return E1 == E2 || (E1 && E2 && *E1 == *E2); }

/// Affine point or the identity, tagged with its curve.
class Point {
 public:
  static Point infinity(CurvePtr curve) { return Point(std::move(curve)); }

  /// Affine constructor; rejects coordinates that do not satisfy the curve equation.
  Point(CurvePtr curve, const Fp2Element& x, const Fp2Element& y)
      : curve_(std::move(curve)), infinity_(false), x_(curve_->field().element(x.c0(), x.c1())),
        y_(curve_->field().element(y.c0(), y.c1())) {
    if (!curve_->contains(x_, y_)) throw curve_error("point (" + x_.to_string() + ", " + y_.to_string() + ") is not on " + curve_->to_string());
  }

  const CurvePtr& curve() const { return curve_; }
  bool is_infinity() const { return infinity_; }
  const Fp2Element& x() const { return x_; }
  const Fp2Element& y() const { return y_; }

  bool operator==(const Point& o) const {
    if (!same_curve(curve_, o.curve_)) return false;
    if (infinity_ || o.infinity_) return infinity_ == o.infinity_;
    return x_ == o.x_ && y_ == o.y_;
  }

  /// Lexicographic (x, y) order; the identity sorts first.
  bool coordinate_less(const Point& o) const {
    if (infinity_ || o.infinity_) return infinity_ && !o.infinity_;
    if (!(x_ == o.x_)) return x_ < o.x_;
    return y_ < o.y_;
  }

  inline Point operator+(const Point& o) const;
  inline Point operator-(const Point& o) const;
  Point operator-() const {
    if (infinity_) return *this;
    return Point(curve_, x_, curve_->field().neg(y_), Unchecked{});
  }
  Point& operator+=(const Point& o) { return *this = *this + o; }

  std::string to_string() const {
    if (infinity_) return "O";
    return "(" + x_.to_string() + ", " + y_.to_string() + ")";
  }
  friend std::ostream& operator<<(std::ostream& os, const Point& P) { return os << P.to_string(); }

 private:
  struct Unchecked {};
  explicit Point(CurvePtr curve) : curve_(std::move(curve)), infinity_(true) {}
  Point(CurvePtr curve, const Fp2Element& x, const Fp2Element& y, Unchecked)
      : curve_(std::move(curve)), infinity_(false), x_(x), y_(y) {}

  friend Point point_add(const Point& P, const Point& Q);

  CurvePtr curve_;
  bool infinity_ = true;
  Fp2Element x_;
  Fp2Element y_;
};

/// Chord-and-tangent addition in affine coordinates.
inline Point point_add(const Point& P, const Point& Q) {
  if (!same_curve(P.curve_, Q.curve_)) throw curve_error("curve mismatch");
  if (P.infinity_) return Q;
  if (Q.infinity_) return P;
  const Fp2Context& F = P.curve_->field();
  Fp2Element lambda;
  if (P.x_ == Q.x_) {
    if (!(P.y_ == Q.y_) || P.y_.is_zero()) return Point::infinity(P.curve_);
    const Fp2Element num = F.add(F.scale(F.mul(P.x_, P.x_), 3), P.curve_->a());
    lambda = F.div(num, F.scale(P.y_, 2));
  } else {
    lambda = F.div(F.sub(Q.y_, P.y_), F.sub(Q.x_, P.x_));
  }
  const Fp2Element x3 = F.sub(F.sub(F.mul(lambda, lambda), P.x_), Q.x_);
  const Fp2Element y3 = F.sub(F.mul(lambda, F.sub(P.x_, x3)), P.y_);
  return Point(P.curve_, x3, y3, Point::Unchecked{});
}

inline Point Point::operator+(const Point& o) const { return point_add(*this, o); }
inline Point Point::operator-(const Point& o) const { return point_add(*this, -o); }

/// [k]P by double-and-add.
inline Point scalar_mul(u64 k, const Point& P) {
  Point result = Point::infinity(P.curve());
  Point addend = P;
  while (k != 0) {
    if (k & 1) result = result + addend;
    k >>= 1;
    if (k != 0) addend = addend + addend;
  }
  return result;
}

inline Point operator*(u64 k, const Point& P) { return scalar_mul(k, P); }

inline u64 ipow(u64 base, unsigned e) {
  u64 r = 1;
  while (e-- != 0) r *= base;
  return r;
}

/// Exact e with [ell^e]P = O and [ell^(e-1)]P != O.
inline unsigned point_order_smooth(const Point& P, u64 ell, unsigned e_max) {
  Point T = P;
  for (unsigned e = 0; e <= e_max; ++e) {
    if (T.is_infinity()) return e;
    T = scalar_mul(ell, T);
  }
  throw curve_error("order not ell-smooth within bound");
}

/// Order of P by repeated addition. Only for small subgroups.
inline u64 point_order_naive(const Point& P, u64 limit) {
  Point T = P;
  for (u64 k = 1; k <= limit; ++k) {
    if (T.is_infinity()) return k;
    T = T + P;
  }
  throw curve_error("point order exceeds naive search limit");
}

/// j = 1728 * 4a^3 / (4a^3 + 27b^2).
inline Fp2Element j_invariant(const Curve& E) {
  const Fp2Context& F = E.field();
  const Fp2Element disc = E.discriminant_core();
  if (disc.is_zero()) throw curve_error("singular curve has no j-invariant");
  const Fp2Element a3 = F.scale(F.mul(F.mul(E.a(), E.a()), E.a()), 4);
  return F.div(F.scale(a3, 1728), disc);
}
inline Fp2Element j_invariant(const CurvePtr& E) { return j_invariant(*E); }

/// Seeded sampler of random affine points.
class PointSampler {
 public:
  explicit PointSampler(u64 seed) : rng_(seed) {}

  Fp2Element random_element(const Fp2Context& F) {
    std::uniform_int_distribution<u64> dist(0, F.p() - 1);
    const u64 c0 = dist(rng_);
    const u64 c1 = dist(rng_);
    return F.element(c0, c1);
  }

  Point random_point(const CurvePtr& E) {
    const Fp2Context& F = E->field();
    for (;;) {
      const Fp2Element x = random_element(F);
      const Fp2Element r = E->rhs(x);
      if (!F.is_square(r)) continue;
      Fp2Element y = F.sqrt(r);
      if (coin_(rng_) != 0) y = F.neg(y);
      return Point(E, x, y);
    }
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
  std::uniform_int_distribution<int> coin_{0, 1};
};

/// #E(F_{p^2}) by enumerating every x. Cost O(p^2 log p).
inline u64 count_points_exhaustive(const Curve& E) {
  const Fp2Context& F = E.field();
  const PrimeField& Fp = F.base();
  const u64 p = F.p();
  u64 count = 1;
  for (u64 c1 = 0; c1 < p; ++c1) {
    for (u64 c0 = 0; c0 < p; ++c0) {
      const Fp2Element r = E.rhs(F.element(c0, c1));
      if (r.is_zero()) {
        count += 1;
      } else if (Fp.legendre(F.norm(r)) == 1) {
        count += 2;
      }
    }
  }
  return count;
}

/// Above this p the exhaustive count is replaced by the random-point exponent test.
inline constexpr u64 kExhaustiveSupersingularBound = 1000;

/// Supersingularity over F_{p^2}. For p <= 1000 the point count is computed and E is
/// supersingular iff its trace is divisible by p. Otherwise every one of `samples`
/// random points must be killed by p + 1 (or, for the twist, by p - 1).
inline bool is_supersingular(const CurvePtr& E, u64 seed = 0x5eed, unsigned samples = 20) {
  const u64 p = E->field().p();
  if (p <= kExhaustiveSupersingularBound) {
    // trace t = p^2 + 1 - #E, so p | t iff #E == 1 mod p
    return count_points_exhaustive(*E) % p == 1;
  }
  PointSampler sampler(seed);
  bool plus = true;
  bool minus = true;
  for (unsigned i = 0; i < samples && (plus || minus); ++i) {
    const Point P = sampler.random_point(E);
    if (plus && !scalar_mul(p + 1, P).is_infinity()) plus = false;
    if (minus && !scalar_mul(p - 1, P).is_infinity()) minus = false;
  }
  return plus || minus;
}

/// True iff P, Q both have exact order ell^e and their images in E[ell] are independent.
inline bool is_torsion_basis(const Point& P, const Point& Q, u64 ell, unsigned e) {
  if (!same_curve(P.curve(), Q.curve())) return false;
  if (e == 0) return true;
  const u64 top = ipow(ell, e - 1);
  const Point P1 = scalar_mul(top, P);
  const Point Q1 = scalar_mul(top, Q);
  if (P1.is_infinity() || Q1.is_infinity()) return false;
  if (!scalar_mul(ell, P1).is_infinity() || !scalar_mul(ell, Q1).is_infinity()) return false;
  Point T = Point::infinity(P.curve());
  for (u64 k = 0; k < ell; ++k) {
    if (T == P1) return false;
    T = T + Q1;
  }
  return true;
}

/// All multiples [0]P, [1]P, ..., [ord-1]P.
inline std::vector<Point> subgroup_elements(const Point& P, u64 limit = u64{1} << 20) {
  std::vector<Point> out{Point::infinity(P.curve())};
  Point T = P;
  while (!T.is_infinity()) {
    if (out.size() >= limit) throw curve_error("subgroup too large to enumerate");
    out.push_back(T);
    T = T + P;
  }
  return out;
}

/// <P> == <Q> for points of finite order.
inline bool same_subgroup(const Point& P, const Point& Q) {
  if (!same_curve(P.curve(), Q.curve())) return false;
  if (P.is_infinity() || Q.is_infinity()) return P.is_infinity() && Q.is_infinity();
  const std::vector<Point> elems = subgroup_elements(P);
  bool found = false;
  for (const Point& T : elems) {
    if (T == Q) {
      found = true;
      break;
    }
  }
  if (!found) return false;
  return point_order_naive(Q, elems.size()) == elems.size();
}

/// Generator of <P> with the lexicographically smallest (x, y).
inline Point canonical_generator(const Point& P) {
  if (P.is_infinity()) return P;
  const std::vector<Point> elems = subgroup_elements(P);
  const u64 ord = elems.size();
  std::optional<Point> best;
  for (u64 k = 1; k < ord; ++k) {
    if (std::gcd(k, ord) != 1) continue;
    if (!best || elems[k].coordinate_less(*best)) best = elems[k];
  }
  return *best;
}

/// Random basis of E[ell^e], assuming E(F_{p^2}) contains the full ell^e-torsion
/// and `group_exponent` kills every rational point.
inline std::pair<Point, Point> find_torsion_basis(const CurvePtr& E, u64 ell, unsigned e, u64 group_exponent,
                                                  PointSampler& sampler, unsigned max_tries = 10000) {
  const u64 full = ipow(ell, e);
  if (group_exponent % full != 0) throw curve_error("group exponent not divisible by ell^e");
  const u64 cofactor = group_exponent / full;
  auto draw = [&]() -> std::optional<Point> {
    const Point T = scalar_mul(cofactor, sampler.random_point(E));
    if (e == 0 || !scalar_mul(full / ell, T).is_infinity()) return T;
    return std::nullopt;
  };
  for (unsigned tries = 0; tries < max_tries; ++tries) {
    const auto P = draw();
    if (!P) continue;
    for (unsigned inner = 0; inner < 64; ++inner) {
      const auto Q = draw();
      if (Q && is_torsion_basis(*P, *Q, ell, e)) return {*P, *Q};
    }
  }
  throw curve_error("could not find a torsion basis");
}

}  // namespace gpstlab
