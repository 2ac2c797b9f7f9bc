#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gpstlab/isogeny.hpp"

namespace gpstlab {

/// Raw parameter description as stored in a parameter file. Field elements are
/// pairs (c0, c1) meaning c0 + c1*beta; points are (x0, x1, y0, y1).
struct ParamSpec {
  unsigned n = 0;
  unsigned m = 0;
  u64 f = 1;
  std::array<u64, 2> beta_rel{0, 0};  // (u, v) in beta^2 = u*beta + v
  std::array<u64, 4> E0{};            // (a0, a1, b0, b1)
  std::array<u64, 4> PA{};
  std::array<u64, 4> QA{};
  std::array<u64, 4> PB{};
  std::array<u64, 4> QB{};

  /// 2^n 3^m f - 1; throws when it would not fit below 2^32.
  u64 prime() const {
    if (n == 0 || n > 31 || m > 20 || f == 0) throw param_error("exponents out of range");
    const u64 p1 = ipow(2, n) * ipow(3, m) * f;
    if (p1 >= (u64{1} << 32)) throw param_error("p = 2^n 3^m f - 1 exceeds 2^32");
    return p1 - 1;
  }

  bool operator==(const ParamSpec&) const = default;
};

/// The constants of the worked p = 863 instance: beta^2 = beta - 5,
/// E0: y^2 = x^3 + (531b + 538)x + (720b + 375).
inline ParamSpec p863_spec() {
  ParamSpec s;
  s.n = 5;
  s.m = 3;
  s.f = 1;
  s.beta_rel = {1, 863 - 5};
  s.E0 = {538, 531, 375, 720};
  s.PA = {726, 834, 130, 642};
  s.QA = {276, 583, 854, 180};
  s.PB = {697, 254, 268, 516};
  s.QB = {317, 753, 532, 234};
  return s;
}

/// Public SIDH parameters over F_{p^2}, p = 2^n 3^m f - 1.
struct SidhParams {
  ParamSpec spec;
  unsigned n = 0;
  unsigned m = 0;
  u64 f = 1;
  u64 p = 0;
  std::shared_ptr<const Fp2Context> field;
  CurvePtr E0;
  Point PA;
  Point QA;
  Point PB;
  Point QB;

  u64 two_torsion() const { return u64{1} << n; }
  u64 three_torsion() const { return ipow(3, m); }
  Fp2Element element(u64 c0, u64 c1 = 0) const { return field->element(c0, c1); }
};

/// Builds the parameter objects. Throws param_error for structural problems
/// (non-prime p, reducible beta relation, singular curve, off-curve points);
/// semantic checks live in validate_params.
inline SidhParams make_params(const ParamSpec& spec) {
  const u64 p = spec.prime();
  if (!is_prime_u64(p)) throw param_error("p = " + std::to_string(p) + " is not prime");
  auto in_range = [p](const auto& values, const char* what) {
    for (u64 v : values)
      if (v >= p) throw param_error(std::string(what) + ": residue " + std::to_string(v) + " not reduced mod p");
  };
  in_range(spec.beta_rel, "beta_rel");
  in_range(spec.E0, "E0");
  in_range(spec.PA, "PA");
  in_range(spec.QA, "QA");
  in_range(spec.PB, "PB");
  in_range(spec.QB, "QB");
  SidhParams P{.spec = spec, .n = spec.n, .m = spec.m, .f = spec.f, .p = p,
               .field = nullptr, .E0 = nullptr, .PA = Point::infinity(nullptr), .QA = Point::infinity(nullptr),
               .PB = Point::infinity(nullptr), .QB = Point::infinity(nullptr)};
  try {
    P.field = Fp2Context::make(p, spec.beta_rel[0], spec.beta_rel[1]);
    const Fp2Context& F = *P.field;
    P.E0 = make_curve(P.field, F.element(spec.E0[0], spec.E0[1]), F.element(spec.E0[2], spec.E0[3]));
    auto pt = [&](const std::array<u64, 4>& c) {
      return Point(P.E0, F.element(c[0], c[1]), F.element(c[2], c[3]));
    };
    P.PA = pt(spec.PA);
    P.QA = pt(spec.QA);
    P.PB = pt(spec.PB);
    P.QB = pt(spec.QB);
  } catch (const param_error&) {
    throw;
  } catch (const error& e) {
    throw param_error(e.what());
  }
  return P;
}

struct ValidationCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool ok() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return !checks.empty();
  }
  const ValidationCheck* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

/// Semantic checks on already-built parameters.
inline void validate_params_into(const SidhParams& P, ValidationReport& report, u64 seed = 0x5eed) {
  auto add = [&](std::string name, bool ok, std::string detail = {}) {
    report.checks.push_back({std::move(name), ok, std::move(detail)});
  };
  add("supersingular", is_supersingular(P.E0, seed), "E0: " + P.E0->to_string());
  auto order_check = [&](const char* name, const Point& pt, u64 ell, unsigned e) {
    std::string detail;
    bool ok = false;
    try {
      const unsigned got = point_order_smooth(pt, ell, e);
      ok = got == e;
      detail = "order " + std::to_string(ell) + "^" + std::to_string(got);
    } catch (const curve_error& ex) {
      detail = ex.what();
    }
    add(std::string("order ") + name, ok, detail);
  };
  order_check("PA", P.PA, 2, P.n);
  order_check("QA", P.QA, 2, P.n);
  order_check("PB", P.PB, 3, P.m);
  order_check("QB", P.QB, 3, P.m);
  add("basis PA,QA", is_torsion_basis(P.PA, P.QA, 2, P.n), "E0[2^" + std::to_string(P.n) + "]");
  add("basis PB,QB", is_torsion_basis(P.PB, P.QB, 3, P.m), "E0[3^" + std::to_string(P.m) + "]");
}

inline ValidationReport validate_params(const SidhParams& P, u64 seed = 0x5eed) {
  ValidationReport report;
  report.checks.push_back({"p = 2^n 3^m f - 1 prime", is_prime_u64(P.p), "p = " + std::to_string(P.p)});
  validate_params_into(P, report, seed);
  return report;
}

/// Full validation from a raw parameter description: every check is reported individually; checks that
/// cannot be evaluated because an earlier structural check failed are reported as failed.
inline ValidationReport validate_params(const ParamSpec& spec, u64 seed = 0x5eed) {
  ValidationReport report;
  u64 p = 0;
  try {
    p = spec.prime();
  } catch (const param_error& e) {
    report.checks.push_back({"p = 2^n 3^m f - 1 prime", false, e.what()});
    return report;
  }
  const bool prime = is_prime_u64(p);
  report.checks.push_back({"p = 2^n 3^m f - 1 prime", prime, "p = " + std::to_string(p)});
  if (!prime) {
    report.checks.push_back({"structure", false, "not evaluated: p is not prime"});
    return report;
  }
  std::optional<SidhParams> params;
  try {
    params = make_params(spec);
    report.checks.push_back({"structure", true, "field, curve and points well formed"});
  } catch (const param_error& e) {
    report.checks.push_back({"structure", false, e.what()});
    return report;
  }
  validate_params_into(*params, report, seed);
  return report;
}

// ---------------------------------------------------------------------------
// Keys

/// Alice's static key (a1, a2) modulo 2^n.
struct SecretKey {
  u64 a1 = 1;
  u64 a2 = 0;
};

enum class KeyForm { FirstUnit, SecondUnit };

/// (1, alpha) for FirstUnit, (alpha, 1) for SecondUnit.
struct NormalizedKey {
  KeyForm form = KeyForm::FirstUnit;
  u64 alpha = 0;

  SecretKey as_pair() const { return form == KeyForm::FirstUnit ? SecretKey{1, alpha} : SecretKey{alpha, 1}; }
  bool operator==(const NormalizedKey&) const = default;
};

inline NormalizedKey normalize_key(const SecretKey& key, unsigned n) {
  const Mod2nRing R(n);
  const u64 a1 = R.reduce(key.a1);
  const u64 a2 = R.reduce(key.a2);
  if ((a1 & 1) == 1) return {KeyForm::FirstUnit, R.mul(a2, mod2n_inverse(a1, n))};
  if ((a2 & 1) == 1) return {KeyForm::SecondUnit, R.mul(a1, mod2n_inverse(a2, n))};
  throw key_error("invalid key: not cyclic of maximal order");
}

/// [a1]P + [a2]Q for the normalized form.
inline Point key_kernel(const NormalizedKey& key, const Point& P, const Point& Q) {
  return key.form == KeyForm::FirstUnit ? P + scalar_mul(key.alpha, Q) : scalar_mul(key.alpha, P) + Q;
}

struct AlicePublic {
  CurvePtr EA;
  Point phiA_PB;
  Point phiA_QB;
};

struct BobPublic {
  CurvePtr EB;
  Point R;  // phi_B(PA)
  Point S;  // phi_B(QA)
};

inline AlicePublic alice_publics(const SidhParams& P, const NormalizedKey& key) {
  const IsogenyChain phiA = isogeny_from_kernel(key_kernel(key, P.PA, P.QA), 2, P.n);
  return {phiA.codomain(), phiA(P.PB), phiA(P.QB)};
}

/// Bob's side for secret scalars (b1, b2) modulo 3^m. The kernel must have order 3^m.
inline BobPublic bob_publics(const SidhParams& P, u64 b1, u64 b2) {
  const u64 mod = P.three_torsion();
  const Point KB = scalar_mul(b1 % mod, P.PB) + scalar_mul(b2 % mod, P.QB);
  try {
    const IsogenyChain phiB = isogeny_from_kernel(KB, 3, P.m);
    return {phiB.codomain(), phiB(P.PA), phiB(P.QA)};
  } catch (const isogeny_error&) {
    throw isogeny_error("kernel generator has wrong order: (b1, b2) = (" + std::to_string(b1) + ", " +
                        std::to_string(b2) + ") does not give a point of order 3^" + std::to_string(P.m));
  }
}

/// E_AB computed by Alice: E_A / <[b1] phiA(PB) + [b2] phiA(QB)>.
inline CurvePtr shared_curve_alice(const SidhParams& P, const AlicePublic& alice, u64 b1, u64 b2) {
  const u64 mod = P.three_torsion();
  return quotient_curve(scalar_mul(b1 % mod, alice.phiA_PB) + scalar_mul(b2 % mod, alice.phiA_QB), 3, P.m);
}

/// E_AB computed by Bob: E_B / <[a1] R + [a2] S>.
inline CurvePtr shared_curve_bob(const SidhParams& P, const BobPublic& bob, const NormalizedKey& key) {
  return quotient_curve(key_kernel(key, bob.R, bob.S), 2, P.n);
}

struct SharedSecret {
  Fp2Element alice_j;
  Fp2Element bob_j;
  bool agree() const { return alice_j == bob_j; }
};

/// Shared j-invariant from both sides of the exchange, computed independently.
inline SharedSecret shared_j(const SidhParams& P, const NormalizedKey& key, u64 b1, u64 b2) {
  const AlicePublic alice = alice_publics(P, key);
  const BobPublic bob = bob_publics(P, b1, b2);
  return {j_invariant(shared_curve_alice(P, alice, b1, b2)), j_invariant(shared_curve_bob(P, bob, key))};
}

}  // namespace gpstlab
