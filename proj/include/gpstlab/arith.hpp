#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <ostream>
#include <string>

#include "gpstlab/error.hpp"

namespace gpstlab {

using u64 = std::uint64_t;

/// Deterministic trial-division primality test. Intended for moduli below 2^32.
inline bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  if (n % 3 == 0) return n == 3;
  for (u64 d = 5; d * d <= n; d += 6) {
    if (n % d == 0 || n % (d + 2) == 0) return false;
  }
  return true;
}

/// Arithmetic in F_p for an odd prime p < 2^32. Products fit in 64 bits.
class PrimeField {
 public:
  explicit PrimeField(u64 p) : p_(p) {
    if (p < 3 || p >= (u64{1} << 32)) throw arith_error("prime modulus out of range (need 2 < p < 2^32)");
    if (!is_prime_u64(p)) throw arith_error("modulus " + std::to_string(p) + " is not prime");
  }

  u64 modulus() const { return p_; }

  u64 reduce(u64 a) const { return a % p_; }
  u64 add(u64 a, u64 b) const {
    u64 s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + p_ - b; }
  u64 neg(u64 a) const { return a == 0 ? 0 : p_ - a; }
  u64 mul(u64 a, u64 b) const { return (a * b) % p_; }

  u64 pow(u64 base, u64 exp) const {
    u64 result = 1;
    base %= p_;
    while (exp != 0) {
      if (exp & 1) result = mul(result, base);
      base = mul(base, base);
      exp >>= 1;
    }
    return result;
  }

  u64 inv(u64 a) const {
    if (a % p_ == 0) throw arith_error("division by zero in F_p");
    return pow(a, p_ - 2);
  }

  /// Euler's criterion: 1 for nonzero squares, p-1 for non-squares, 0 for zero.
  u64 legendre(u64 a) const { return pow(a, (p_ - 1) / 2); }
  bool is_square(u64 a) const {
    a %= p_;
    return a == 0 || legendre(a) == 1;
  }

  bool operator==(const PrimeField& other) const { return p_ == other.p_; }

 private:
  u64 p_;
};

class Fp2Context;

/// Element c0 + c1*beta of F_{p^2}. Carries a non-owning pointer to its field;
/// the context must outlive the element (curves keep it alive).
class Fp2Element {
 public:
  Fp2Element() = default;
  Fp2Element(const Fp2Context* ctx, u64 c0, u64 c1) : ctx_(ctx), c0_(c0), c1_(c1) {}

  u64 c0() const { return c0_; }
  u64 c1() const { return c1_; }
  const Fp2Context* context() const { return ctx_; }

  bool is_zero() const { return c0_ == 0 && c1_ == 0; }
  bool is_one() const { return c0_ == 1 && c1_ == 0; }

  bool operator==(const Fp2Element& o) const { return c0_ == o.c0_ && c1_ == o.c1_; }

  /// Lexicographic order on (c0, c1), used only for canonical choices.
  bool operator<(const Fp2Element& o) const {
    return c0_ != o.c0_ ? c0_ < o.c0_ : c1_ < o.c1_;
  }

  inline Fp2Element operator+(const Fp2Element& o) const;
  inline Fp2Element operator-(const Fp2Element& o) const;
  inline Fp2Element operator*(const Fp2Element& o) const;
  inline Fp2Element operator/(const Fp2Element& o) const;
  inline Fp2Element operator-() const;
  Fp2Element& operator+=(const Fp2Element& o) { return *this = *this + o; }
  Fp2Element& operator-=(const Fp2Element& o) { return *this = *this - o; }
  Fp2Element& operator*=(const Fp2Element& o) { return *this = *this * o; }

  inline Fp2Element operator*(u64 k) const;
  friend Fp2Element operator*(u64 k, const Fp2Element& a) { return a * k; }

  /// Renders as "c1*b + c0" in the style "531b + 538"; pure base-field values print as integers.
  std::string to_string() const {
    if (c1_ == 0) return std::to_string(c0_);
    std::string s = std::to_string(c1_) + "b";
    if (c0_ != 0) s += " + " + std::to_string(c0_);
    return s;
  }
  friend std::ostream& operator<<(std::ostream& os, const Fp2Element& a) { return os << a.to_string(); }

 private:
  const Fp2Context* ctx_ = nullptr;
  u64 c0_ = 0;
  u64 c1_ = 0;
};

/// F_{p^2} = F_p(beta) with the reduction rule beta^2 = u*beta + v.
class Fp2Context {
 public:
  Fp2Context(u64 p, u64 u, u64 v) : base_(p), u_(u % p), v_(v % p) {
    // x^2 - u x - v has no root in F_p iff its discriminant u^2 + 4v is a non-square.
    const u64 disc = base_.add(base_.mul(u_, u_), base_.mul(4, v_));
    if (base_.is_square(disc)) {
      throw arith_error("beta relation x^2 - " + std::to_string(u_) + "x - " + std::to_string(v_) +
                        " is reducible over F_" + std::to_string(p));
    }
    const u64 q_minus_1 = p * p - 1;
    two_adicity_ = 0;
    odd_part_ = q_minus_1;
    while ((odd_part_ & 1) == 0) {
      odd_part_ >>= 1;
      ++two_adicity_;
    }
    find_nonresidue();
  }

  static std::shared_ptr<const Fp2Context> make(u64 p, u64 u, u64 v) { return std::make_shared<const Fp2Context>(p, u, v); }

  const PrimeField& base() const { return base_; }
  u64 p() const { return base_.modulus(); }
  u64 u() const { return u_; }
  u64 v() const { return v_; }
  /// Field size p^2.
  u64 order() const { return p() * p(); }

  bool same_field(const Fp2Context& o) const { return this == &o || (base_ == o.base_ && u_ == o.u_ && v_ == o.v_); }
  bool operator==(const Fp2Context& o) const { return same_field(o); }

  Fp2Element element(u64 c0, u64 c1 = 0) const { return {this, base_.reduce(c0), base_.reduce(c1)}; }
  Fp2Element zero() const { return {this, 0, 0}; }
  Fp2Element one() const { return {this, 1, 0}; }
  Fp2Element beta() const { return {this, 0, 1}; }

  Fp2Element add(const Fp2Element& a, const Fp2Element& b) const {
    return {this, base_.add(a.c0(), b.c0()), base_.add(a.c1(), b.c1())};
  }
  Fp2Element sub(const Fp2Element& a, const Fp2Element& b) const {
    return {this, base_.sub(a.c0(), b.c0()), base_.sub(a.c1(), b.c1())};
  }
  Fp2Element neg(const Fp2Element& a) const { return {this, base_.neg(a.c0()), base_.neg(a.c1())}; }

  Fp2Element mul(const Fp2Element& a, const Fp2Element& b) const {
    const PrimeField& F = base_;
    const u64 hi = F.mul(a.c1(), b.c1());
    const u64 c0 = F.add(F.mul(a.c0(), b.c0()), F.mul(v_, hi));
    const u64 c1 = F.add(F.add(F.mul(a.c0(), b.c1()), F.mul(a.c1(), b.c0())), F.mul(u_, hi));
    return {this, c0, c1};
  }
  Fp2Element scale(const Fp2Element& a, u64 k) const {
    k %= p();
    return {this, base_.mul(a.c0(), k), base_.mul(a.c1(), k)};
  }

  /// Norm to F_p: (c0 + c1 b)(c0 + c1 b') with b + b' = u and b b' = -v.
  u64 norm(const Fp2Element& a) const {
    const PrimeField& F = base_;
    const u64 t = F.add(F.mul(a.c0(), a.c0()), F.mul(u_, F.mul(a.c0(), a.c1())));
    return F.sub(t, F.mul(v_, F.mul(a.c1(), a.c1())));
  }
  Fp2Element conj(const Fp2Element& a) const {
    return {this, base_.add(a.c0(), base_.mul(u_, a.c1())), base_.neg(a.c1())};
  }

  Fp2Element inv(const Fp2Element& a) const {
    if (a.is_zero()) throw arith_error("division by zero in F_{p^2}");
    return scale(conj(a), base_.inv(norm(a)));
  }
  Fp2Element div(const Fp2Element& a, const Fp2Element& b) const { return mul(a, inv(b)); }

  Fp2Element pow(Fp2Element base, u64 exp) const {
    Fp2Element result = one();
    while (exp != 0) {
      if (exp & 1) result = mul(result, base);
      base = mul(base, base);
      exp >>= 1;
    }
    return result;
  }

  /// Squares of F_{p^2} are exactly the elements whose norm is a square in F_p.
  bool is_square(const Fp2Element& a) const { return a.is_zero() || base_.legendre(norm(a)) == 1; }

  /// Square root by Tonelli-Shanks in the multiplicative group of order p^2 - 1.
  /// Returns the root with the smaller (c0, c1) of the pair {r, -r}.
  Fp2Element sqrt(const Fp2Element& a) const {
    if (a.is_zero()) return zero();
    if (!is_square(a)) throw arith_error("element is not a square in F_{p^2}");
    unsigned m = two_adicity_;
    Fp2Element c = nonresidue_power_;
    Fp2Element t = pow(a, odd_part_);
    Fp2Element r = pow(a, (odd_part_ + 1) / 2);
    while (!t.is_one()) {
      unsigned i = 0;
      Fp2Element t2 = t;
      while (!t2.is_one()) {
        t2 = mul(t2, t2);
        ++i;
      }
      Fp2Element b = c;
      for (unsigned k = 0; k + 1 < m - i; ++k) b = mul(b, b);
      m = i;
      c = mul(b, b);
      t = mul(t, c);
      r = mul(r, b);
    }
    const Fp2Element other = neg(r);
    return other < r ? other : r;
  }

 private:
  void find_nonresidue() {
    for (u64 c0 = 0;; ++c0) {
      const Fp2Element z{this, base_.reduce(c0), 1};
      if (!is_square(z)) {
        nonresidue_power_ = pow(z, odd_part_);
        return;
      }
    }
  }

  PrimeField base_;
  u64 u_;
  u64 v_;
  unsigned two_adicity_ = 0;
  u64 odd_part_ = 1;
  Fp2Element nonresidue_power_;
};

namespace detail {
inline const Fp2Context& field_of(const Fp2Element& a, const Fp2Element& b) {
  const Fp2Context* ca = a.context();
  const Fp2Context* cb = b.context();
  if (ca == nullptr || cb == nullptr) throw arith_error("uninitialised F_{p^2} element");
  if (ca != cb && !ca->same_field(*cb)) throw arith_error("operands belong to different fields");
  return *ca;
}
inline const Fp2Context& field_of(const Fp2Element& a) {
  if (a.context() == nullptr) throw arith_error("uninitialised F_{p^2} element");
  return *a.context();
}
}  // namespace detail

inline Fp2Element Fp2Element::operator+(const Fp2Element& o) const { return detail::field_of(*this, o).add(*this, o); }
inline Fp2Element Fp2Element::operator-(const Fp2Element& o) const { return detail::field_of(*this, o).sub(*this, o); }
inline Fp2Element Fp2Element::operator*(const Fp2Element& o) const { return detail::field_of(*this, o).mul(*this, o); }
inline Fp2Element Fp2Element::operator/(const Fp2Element& o) const { return detail::field_of(*this, o).div(*this, o); }
inline Fp2Element Fp2Element::operator-() const { return detail::field_of(*this).neg(*this); }
inline Fp2Element Fp2Element::operator*(u64 k) const { return detail::field_of(*this).scale(*this, k); }

// ---------------------------------------------------------------------------
// Z/2^n

/// The ring Z/2^n for 3 <= n <= 62.
class Mod2nRing {
 public:
  explicit Mod2nRing(unsigned n) : n_(n) {
    if (n < 3 || n > 62) throw arith_error("mod 2^n ring needs 3 <= n <= 62");
  }
  unsigned exponent() const { return n_; }
  u64 modulus() const { return u64{1} << n_; }
  u64 reduce(u64 x) const { return x & (modulus() - 1); }
  u64 add(u64 a, u64 b) const { return reduce(a + b); }
  u64 sub(u64 a, u64 b) const { return reduce(a - b); }
  u64 neg(u64 a) const { return reduce(u64{0} - a); }
  u64 mul(u64 a, u64 b) const { return reduce(a * b); }

 private:
  unsigned n_;
};

/// Inverse of an odd residue modulo 2^n by Newton iteration (each step doubles the precision).
inline u64 mod2n_inverse(u64 x, unsigned n) {
  if (n == 0 || n > 63) throw arith_error("mod 2^n exponent out of range");
  const u64 mask = (u64{1} << n) - 1;
  x &= mask;
  if ((x & 1) == 0) throw arith_error("not a unit mod 2^n");
  u64 y = x;  // correct to 3 bits: x*x == 1 mod 8 for odd x
  for (unsigned bits = 3; bits < n; bits *= 2) y *= 2 - x * y;
  return y & mask;
}

/// All four square roots of x modulo 2^n (n >= 3, x == 1 mod 8), ascending.
inline std::array<u64, 4> mod2n_sqrt_roots(u64 x, unsigned n) {
  if (n < 3 || n > 62) throw arith_error("mod 2^n square root needs 3 <= n <= 62");
  const u64 mod = u64{1} << n;
  const u64 mask = mod - 1;
  x &= mask;
  if ((x & 7) != 1) throw arith_error("no square root mod 2^n");
  // Hensel lift: r^2 == x mod 2^(k+1) from r^2 == x mod 2^k by r += 2^(k-1) when needed.
  u64 r = 1;
  for (unsigned k = 3; k < n; ++k) {
    const u64 next_mask = (u64{1} << (k + 1)) - 1;
    if (((r * r) & next_mask) != (x & next_mask)) r += u64{1} << (k - 1);
  }
  r &= mask;
  const u64 half = mod >> 1;
  std::array<u64, 4> roots{r, (mod - r) & mask, (r + half) & mask, (mod - r + half) & mask};
  std::sort(roots.begin(), roots.end());
  return roots;
}

/// Canonical square root mod 2^n: the least of the four roots.
inline u64 mod2n_sqrt(u64 x, unsigned n) { return mod2n_sqrt_roots(x, n).front(); }

/// True iff a and b are square roots of the same residue modulo 2^n.
inline bool mod2n_root_equivalent(u64 a, u64 b, unsigned n) {
  const u64 mask = (u64{1} << n) - 1;
  return ((a * a) & mask) == ((b * b) & mask);
}

}  // namespace gpstlab
