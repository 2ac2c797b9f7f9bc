#pragma once

#include <utility>
#include <vector>

#include "gpstlab/curve.hpp"

namespace gpstlab {

/// Separable isogeny of prime degree ell with kernel <K>, built with Velu's formulas.
/// The codomain is the normalized short Weierstrass model y^2 = x^3 + (a - 5t)x + (b - 7w).
class IsogenyStep {
 public:
  /// One term per element of S = (2-torsion of <K>) plus one representative of each {Q, -Q}.
  struct KernelTerm {
    Fp2Element x;
    Fp2Element y;
    Fp2Element gx;  // 3x^2 + a
    Fp2Element gy;  // -2y
    Fp2Element v;   // gx for 2-torsion points, 2 gx otherwise
    Fp2Element u;   // gy^2
  };

  IsogenyStep(const CurvePtr& domain, const Point& kernel, u64 ell) : domain_(domain), kernel_(kernel), ell_(ell) {
    if (!same_curve(domain, kernel.curve())) throw curve_error("curve mismatch");
    if (ell < 2 || !is_prime_u64(ell) || ell == domain->field().p()) {
      throw isogeny_error("isogeny degree must be a prime different from the characteristic");
    }
    if (kernel.is_infinity() || !scalar_mul(ell, kernel).is_infinity()) {
      throw isogeny_error("kernel generator has wrong order");
    }
    const Fp2Context& F = domain->field();
    Fp2Element t = F.zero();
    Fp2Element w = F.zero();
    // Points [1]K .. [(ell-1)/2]K represent the pairs {Q, -Q}; for ell = 2 the single
    // nonzero kernel point is its own negative.
    const u64 reps = ell == 2 ? 1 : (ell - 1) / 2;
    Point Q = kernel;
    for (u64 k = 1; k <= reps; ++k) {
      if (Q.is_infinity()) throw isogeny_error("kernel generator has wrong order");
      KernelTerm term;
      term.x = Q.x();
      term.y = Q.y();
      term.gx = F.add(F.scale(F.mul(Q.x(), Q.x()), 3), domain->a());
      term.gy = F.scale(F.neg(Q.y()), 2);
      term.v = Q.y().is_zero() ? term.gx : F.scale(term.gx, 2);
      term.u = F.mul(term.gy, term.gy);
      t = F.add(t, term.v);
      w = F.add(w, F.add(term.u, F.mul(term.x, term.v)));
      terms_.push_back(term);
      Q = Q + kernel;
    }
    codomain_ = make_curve(domain->field_ptr(), F.sub(domain->a(), F.scale(t, 5)), F.sub(domain->b(), F.scale(w, 7)));
  }

  const CurvePtr& domain() const { return domain_; }
  const CurvePtr& codomain() const { return codomain_; }
  const Point& kernel_generator() const { return kernel_; }
  u64 degree() const { return ell_; }
  const std::vector<KernelTerm>& terms() const { return terms_; }

  Point operator()(const Point& P) const { return evaluate(P); }

  Point evaluate(const Point& P) const {
    if (!same_curve(domain_, P.curve())) throw curve_error("curve mismatch");
    if (P.is_infinity()) return Point::infinity(codomain_);
    const Fp2Context& F = domain_->field();
    const Fp2Element& x = P.x();
    const Fp2Element& y = P.y();
    Fp2Element X = x;
    Fp2Element Y = y;
    for (const KernelTerm& T : terms_) {
      const Fp2Element d = F.sub(x, T.x);
      if (d.is_zero()) return Point::infinity(codomain_);  // P lies in the kernel
      const Fp2Element di = F.inv(d);
      const Fp2Element di2 = F.mul(di, di);
      const Fp2Element di3 = F.mul(di2, di);
      X = F.add(X, F.add(F.mul(T.v, di), F.mul(T.u, di2)));
      // Y -= u * 2y / d^3 + v * (y - yQ) / d^2 - gx * gy / d^2
      const Fp2Element s1 = F.mul(F.mul(T.u, F.scale(y, 2)), di3);
      const Fp2Element s2 = F.mul(F.mul(T.v, F.sub(y, T.y)), di2);
      const Fp2Element s3 = F.mul(F.mul(T.gx, T.gy), di2);
      Y = F.sub(Y, F.sub(F.add(s1, s2), s3));
    }
    return Point(codomain_, X, Y);
  }

 private:
  CurvePtr domain_;
  CurvePtr codomain_;
  Point kernel_;
  u64 ell_;
  std::vector<KernelTerm> terms_;
};

inline IsogenyStep velu_prime_step(const CurvePtr& E, const Point& K, u64 ell) { return IsogenyStep(E, K, ell); }

/// Composition of prime-degree steps. An empty chain is the identity on its domain.
class IsogenyChain {
 public:
  explicit IsogenyChain(CurvePtr domain) : domain_(std::move(domain)) {}

  void push_back(IsogenyStep step) {
    if (!same_curve(step.domain(), codomain())) throw isogeny_error("isogeny steps do not compose");
    degree_ *= step.degree();
    steps_.push_back(std::move(step));
  }

  const CurvePtr& domain() const { return domain_; }
  const CurvePtr& codomain() const { return steps_.empty() ? domain_ : steps_.back().codomain(); }
  const std::vector<IsogenyStep>& steps() const { return steps_; }
  u64 degree() const { return degree_; }

  Point operator()(const Point& P) const { return evaluate(P); }

  Point evaluate(Point P) const {
    if (!same_curve(domain_, P.curve())) throw curve_error("curve mismatch");
    for (const IsogenyStep& step : steps_) P = step.evaluate(P);
    return P;
  }

  /// Appends every step of `next`, whose domain must be this chain's codomain.
  IsogenyChain then(const IsogenyChain& next) const {
    IsogenyChain out = *this;
    for (const IsogenyStep& step : next.steps()) out.push_back(step);
    return out;
  }

 private:
  CurvePtr domain_;
  std::vector<IsogenyStep> steps_;
  u64 degree_ = 1;
};

/// Isogeny with cyclic kernel <K> of order ell^e, factored into e steps of degree ell.
/// Step t uses the kernel [ell^(e-t-1)] K_t, where K_t is the image of K after t steps.
inline IsogenyChain isogeny_from_kernel(const Point& K, u64 ell, unsigned e) {
  const CurvePtr& E = K.curve();
  IsogenyChain chain(E);
  if (e == 0) {
    if (!K.is_infinity()) throw isogeny_error("kernel generator has wrong order");
    return chain;
  }
  const u64 full = ipow(ell, e);
  if (!scalar_mul(full, K).is_infinity() || scalar_mul(full / ell, K).is_infinity()) {
    throw isogeny_error("kernel generator has wrong order");
  }
  Point image = K;
  u64 cofactor = full / ell;
  for (unsigned t = 0; t < e; ++t) {
    IsogenyStep step(image.curve(), scalar_mul(cofactor, image), ell);
    image = step.evaluate(image);
    chain.push_back(std::move(step));
    cofactor /= ell;
  }
  return chain;
}

inline Point evaluate_chain(const IsogenyChain& chain, const Point& P) { return chain.evaluate(P); }

/// Codomain of E -> E/<K> without keeping the chain around.
inline CurvePtr quotient_curve(const Point& K, u64 ell, unsigned e) { return isogeny_from_kernel(K, ell, e).codomain(); }

}  // namespace gpstlab
