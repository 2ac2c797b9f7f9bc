#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "gpstlab/gpst.hpp"

namespace gpstlab {

/// One generator per cyclic subgroup of order ell^e of E[ell^e] = <P, Q>:
/// {P + [c]Q : c mod ell^e} followed by {[ell c]P + Q : c mod ell^(e-1)}.
inline std::vector<Point> enumerate_cyclic_subgroups(const CurvePtr& E, u64 ell, unsigned e, const std::pair<Point, Point>& basis) {
  const auto& [P, Q] = basis;
  if (!same_curve(E, P.curve()) || !is_torsion_basis(P, Q, ell, e)) throw analysis_error("basis check failure");
  std::vector<Point> out;
  if (e == 0) return {Point::infinity(E)};
  const u64 full = ipow(ell, e);
  out.reserve(full + full / ell);
  Point T = P;  // P + [c]Q
  for (u64 c = 0; c < full; ++c) {
    out.push_back(T);
    T = T + Q;
  }
  const Point step = scalar_mul(ell, P);
  Point U = Q;  // [ell c]P + Q
  for (u64 c = 0; c < full / ell; ++c) {
    out.push_back(U);
    U = U + step;
  }
  return out;
}

struct IsogenyCount {
  u64 count = 0;
  std::vector<Point> generators;  // kernels G with j(E1/G) == j(E2)

  /// True iff <K> is one of the listed kernels.
  bool contains(const Point& K) const {
    return std::any_of(generators.begin(), generators.end(), [&](const Point& G) { return same_subgroup(G, K); });
  }
};

/// Cyclic kernels of order ell^e on E1 whose quotient is isomorphic to E2.
inline IsogenyCount count_isogenies_to(const CurvePtr& E1, const CurvePtr& E2, u64 ell, unsigned e, const std::pair<Point, Point>& basis) {
  IsogenyCount out;
  const Fp2Element target = j_invariant(E2);
  for (const Point& G : enumerate_cyclic_subgroups(E1, ell, e, basis)) {
    if (j_invariant(quotient_curve(G, ell, e)) == target) {
      ++out.count;
      out.generators.push_back(G);
    }
  }
  return out;
}

/// Everything needed to replay one attack with white-box knowledge of the key (1, alpha).
struct AttackInstance {
  SidhParams params;
  u64 alpha = 0;
  u64 b1 = 1;
  u64 b2 = 0;
  AlicePublic alice;
  BobPublic bob;
  CurvePtr EAB;

  NormalizedKey key() const { return {KeyForm::FirstUnit, alpha}; }
  unsigned bit(unsigned i) const { return (alpha >> i) & 1; }
};

inline AttackInstance make_instance(const SidhParams& P, u64 alpha, u64 b1, u64 b2) {
  const NormalizedKey key{KeyForm::FirstUnit, alpha % P.two_torsion()};
  AlicePublic alice = alice_publics(P, key);
  BobPublic bob = bob_publics(P, b1, b2);
  CurvePtr EAB = shared_curve_alice(P, alice, b1, b2);
  return {P, key.alpha, b1, b2, std::move(alice), std::move(bob), std::move(EAB)};
}

struct FailureReport {
  unsigned iteration = 0;
  bool cond_i = false;    // at least two distinct 2^n-isogenies E_B -> E_AB
  bool cond_ii = false;   // <R + [a]S> and <R'_i + [a]S'_i> are two distinct such kernels
  bool cond_iii = false;  // alpha_i == 1
  std::vector<Point> collision_kernels;
  bool oracle_answer = false;
  bool misreported = false;  // oracle answer disagrees with the actual bit

  bool all_conditions() const { return cond_i && cond_ii && cond_iii; }
};

namespace detail {
inline void check_iteration_range(const AttackInstance& inst, unsigned i) {
  if (i + 4 > inst.params.n) {
    throw analysis_error("iteration " + std::to_string(i) + " out of range [0, " + std::to_string(inst.params.n - 4) + "]");
  }
}
inline u64 low_bits(u64 x, unsigned i) { return i >= 64 ? x : (x & ((u64{1} << i) - 1)); }
}  // namespace detail

/// Evaluates conditions (i)-(iii) at iteration i assuming the earlier bits were recovered correctly.
inline FailureReport check_failure_conditions(const AttackInstance& inst, unsigned i,
                                              const IsogenyCount* precomputed = nullptr) {
  detail::check_iteration_range(inst, i);
  const unsigned n = inst.params.n;
  const Point& R = inst.bob.R;
  const Point& S = inst.bob.S;
  const MalformedPoints mp = malformed_points(i, detail::low_bits(inst.alpha, i), R, S, n);
  const Point P1 = R + scalar_mul(inst.alpha, S);
  const Point P2 = mp.Rprime + scalar_mul(inst.alpha, mp.Sprime);

  IsogenyCount local;
  if (precomputed == nullptr) {
    local = count_isogenies_to(inst.bob.EB, inst.EAB, 2, n, {R, S});
    precomputed = &local;
  }
  FailureReport rep;
  rep.iteration = i;
  rep.collision_kernels = precomputed->generators;
  rep.cond_i = precomputed->count >= 2;
  rep.cond_ii = rep.cond_i && !same_subgroup(P1, P2) && precomputed->contains(P1) && precomputed->contains(P2);
  rep.cond_iii = inst.bit(i) == 1;
  rep.oracle_answer = Oracle(inst.key(), n).query(inst.bob.EB, mp.Rprime, mp.Sprime, inst.EAB);
  rep.misreported = rep.oracle_answer != (inst.bit(i) == 0);
  return rep;
}

struct ThetaRelation {
  bool holds = false;          // [theta]P1 - P2 == [theta 2^(n-1) alpha_i]S
  bool printed_form = false;   // [theta]P1 - P2 == [theta 2^(n-i-1) alpha_i]S
  Point difference = Point::infinity(nullptr);
};

/// Relation between P1 = R + [a]S and P2 = R'_i + [a]S'_i when the low i bits of K are correct.
/// Expanding a 2^(n-i-1) with a = K + 2^i a_i + ... leaves [theta][2^(n-1) a_i]S, so this is the
/// identity that holds for properly built malformed points; the variant with 2^(n-i-1) in place
/// of 2^(n-1) is evaluated alongside it.
inline ThetaRelation theta_relation(const AttackInstance& inst, unsigned i) {
  detail::check_iteration_range(inst, i);
  const unsigned n = inst.params.n;
  const Mod2nRing ring(n);
  const Point& R = inst.bob.R;
  const Point& S = inst.bob.S;
  const MalformedPoints mp = malformed_points(i, detail::low_bits(inst.alpha, i), R, S, n);
  const Point P1 = R + scalar_mul(inst.alpha, S);
  const Point P2 = mp.Rprime + scalar_mul(inst.alpha, mp.Sprime);
  ThetaRelation out;
  out.difference = scalar_mul(mp.theta, P1) - P2;
  const u64 bit = inst.bit(i);
  out.holds = out.difference == scalar_mul(ring.mul(mp.theta, ring.mul(u64{1} << (n - 1), bit)), S);
  out.printed_form = out.difference == scalar_mul(ring.mul(mp.theta, ring.mul(u64{1} << (n - i - 1), bit)), S);
  return out;
}

inline bool theta_relation_check(const AttackInstance& inst, unsigned i) { return theta_relation(inst, i).holds; }

struct PropagationException {
  unsigned iteration = 0;
  bool confirmed = false;  // both kernels found among the collision kernels and distinct
};

struct PropagationReport {
  unsigned failed_i = 0;
  unsigned first_post = 0;
  bool identity_holds = false;       // <R'_j + [a]S'_j> == <R + [a]S + [2^(n-2) + 2^(n-1) a_j]S>
  bool subgroup_differs = false;     // ... and differs from <R + [a]S>
  bool offset_nonzero = false;       // [2^(n-2) + 2^(n-1) a_j]S != O
  bool prior_bits_correct = false;   // bits before failed_i were recovered correctly
  std::vector<unsigned> post_failure_bits;
  std::vector<PropagationException> exceptions;
  u64 collision_count = 0;
  AttackTranscript transcript;

  /// Every post-failure bit is 1 or is a confirmed collision.
  bool all_ones_modulo_collisions() const {
    for (const auto& ex : exceptions)
      if (!ex.confirmed) return false;
    return true;
  }
};

/// Injects a missed one-bit at failed_i and follows the consequences.
inline PropagationReport error_propagation_check(const AttackInstance& inst, unsigned failed_i) {
  const unsigned n = inst.params.n;
  if (failed_i + 5 > n) throw analysis_error("no post-failure iterations available");
  if (inst.bit(failed_i) == 0) throw analysis_error("key bit at the injected iteration is zero: nothing to miss");
  const Mod2nRing ring(n);
  const Point& R = inst.bob.R;
  const Point& S = inst.bob.S;

  PropagationReport rep;
  rep.failed_i = failed_i;
  const unsigned j = failed_i + 1;
  rep.first_post = j;
  {
    // Attacker's partial key: correct below failed_i, zero at failed_i.
    const u64 K = detail::low_bits(inst.alpha, failed_i);
    const MalformedPoints mp = malformed_points(j, K, R, S, n);
    const Point lhs = mp.Rprime + scalar_mul(inst.alpha, mp.Sprime);
    const Point base = R + scalar_mul(inst.alpha, S);
    const u64 offset = ring.add(u64{1} << (n - 2), ring.mul(u64{1} << (n - 1), inst.bit(j)));
    const Point shifted = base + scalar_mul(offset, S);
    rep.offset_nonzero = !scalar_mul(offset, S).is_infinity();
    rep.identity_holds = same_subgroup(lhs, shifted);
    rep.subgroup_differs = !same_subgroup(lhs, base);
  }

  const Oracle oracle(inst.key(), n);
  AttackOptions opts;
  opts.inject_miss_at = failed_i;
  opts.record_canonical = false;
  rep.transcript = gpst_attack(oracle, inst.params, inst.alice, inst.b1, inst.b2, opts);
  rep.prior_bits_correct = detail::low_bits(rep.transcript.iterations[failed_i].K, failed_i) ==
                           detail::low_bits(inst.alpha, failed_i);

  const IsogenyCount collisions = count_isogenies_to(inst.bob.EB, inst.EAB, 2, n, {R, S});
  rep.collision_count = collisions.count;
  const Point P1 = R + scalar_mul(inst.alpha, S);
  for (const IterationRecord& rec : rep.transcript.iterations) {
    if (rec.i <= failed_i) continue;
    rep.post_failure_bits.push_back(rec.bit);
    if (rec.bit == 1) continue;
    const Point P2 = rec.Rprime + scalar_mul(inst.alpha, rec.Sprime);
    PropagationException ex;
    ex.iteration = rec.i;
    ex.confirmed = !same_subgroup(P1, P2) && collisions.contains(P1) && collisions.contains(P2);
    rep.exceptions.push_back(ex);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepVerdict { Recovered, KeyNotFound, WrongKey, InvalidKernel };

inline const char* to_string(SweepVerdict v) {
  switch (v) {
    case SweepVerdict::Recovered: return "Recovered";
    case SweepVerdict::KeyNotFound: return "KeyNotFound";
    case SweepVerdict::WrongKey: return "WrongKey";
    case SweepVerdict::InvalidKernel: return "InvalidKernel";
  }
  return "?";
}

/// Why a cell did not recover the key.
enum class Explanation {
  None,               // recovered
  FailureConditions,  // first wrong bit satisfies (i)-(iii)
  TailCollision,      // loop bits correct; the tail hit another key with the same j(E_A)
  Unexplained,
};

inline const char* to_string(Explanation e) {
  switch (e) {
    case Explanation::None: return "none";
    case Explanation::FailureConditions: return "failure-conditions";
    case Explanation::TailCollision: return "tail-collision";
    case Explanation::Unexplained: return "unexplained";
  }
  return "?";
}

struct SweepRow {
  u64 alpha = 0;
  u64 b1 = 0;
  u64 b2 = 0;
  SweepVerdict verdict = SweepVerdict::Recovered;
  std::optional<unsigned> first_failed_i;
  bool cond_i = false;
  bool cond_ii = false;
  bool cond_iii = false;
  u64 collision_count = 0;
  Explanation explanation = Explanation::None;
  std::optional<u64> found_key;
  std::optional<FailureReport> report;
};

/// Attack plus white-box classification of one (alpha, b1, b2) cell.
inline SweepRow run_sweep_cell(const SidhParams& P, u64 alpha, u64 b1, u64 b2) {
  SweepRow row;
  row.alpha = alpha;
  row.b1 = b1;
  row.b2 = b2;
  std::optional<AttackInstance> inst;
  try {
    inst = make_instance(P, alpha, b1, b2);
  } catch (const isogeny_error&) {
    row.verdict = SweepVerdict::InvalidKernel;
    row.explanation = Explanation::Unexplained;
    return row;
  }
  const Oracle oracle(inst->key(), P.n);
  AttackOptions opts;
  opts.record_canonical = false;
  const AttackTranscript tr = gpst_attack(oracle, P, inst->alice, b1, b2, opts);
  row.found_key = tr.tail.found;
  if (!tr.tail.found) {
    row.verdict = SweepVerdict::KeyNotFound;
  } else {
    row.verdict = *tr.tail.found == inst->alpha ? SweepVerdict::Recovered : SweepVerdict::WrongKey;
  }
  for (const IterationRecord& rec : tr.iterations) {
    if (rec.bit != inst->bit(rec.i)) {
      row.first_failed_i = rec.i;
      break;
    }
  }
  if (row.verdict == SweepVerdict::Recovered) return row;

  if (row.first_failed_i) {
    const IsogenyCount collisions = count_isogenies_to(inst->bob.EB, inst->EAB, 2, P.n, {inst->bob.R, inst->bob.S});
    FailureReport rep = check_failure_conditions(*inst, *row.first_failed_i, &collisions);
    row.cond_i = rep.cond_i;
    row.cond_ii = rep.cond_ii;
    row.cond_iii = rep.cond_iii;
    row.collision_count = collisions.count;
    row.explanation = rep.all_conditions() && rep.misreported ? Explanation::FailureConditions : Explanation::Unexplained;
    row.report = std::move(rep);
  } else if (row.verdict == SweepVerdict::WrongKey && *tr.tail.found != inst->alpha &&
             j_invariant(quotient_curve(P.PA + scalar_mul(*tr.tail.found, P.QA), 2, P.n)) == j_invariant(inst->alice.EA)) {
    row.explanation = Explanation::TailCollision;
  } else {
    row.explanation = Explanation::Unexplained;
  }
  return row;
}

/// Runs every (alpha, b1, b2) cell; rows are ordered alpha-major, then b1, then b2,
/// independent of the number of workers.
inline std::vector<SweepRow> search_failure_instances(const SidhParams& P, const std::vector<u64>& alphas,
                                                      const std::vector<u64>& b1s, const std::vector<u64>& b2s,
                                                      unsigned workers = 1) {
  struct Cell {
    u64 alpha, b1, b2;
  };
  std::vector<Cell> cells;
  for (u64 a : alphas)
    for (u64 b1 : b1s)
      for (u64 b2 : b2s) cells.push_back({a, b1, b2});
  std::vector<SweepRow> rows(cells.size());
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(cells.size(), 1))));
  auto work = [&](unsigned w) {
    for (std::size_t k = w; k < cells.size(); k += workers) rows[k] = run_sweep_cell(P, cells[k].alpha, cells[k].b1, cells[k].b2);
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  return rows;
}

inline std::vector<u64> integer_range(u64 lo, u64 hi) {
  std::vector<u64> out;
  for (u64 k = lo; k < hi; ++k) out.push_back(k);
  return out;
}

/// Failing alphas for which no other (b1, b2) in the sweep recovers the key.
inline std::vector<u64> retry_counterexamples(const std::vector<SweepRow>& rows) {
  std::vector<u64> failing, out;
  for (const auto& r : rows)
    if (r.verdict != SweepVerdict::Recovered && r.verdict != SweepVerdict::InvalidKernel) failing.push_back(r.alpha);
  std::sort(failing.begin(), failing.end());
  failing.erase(std::unique(failing.begin(), failing.end()), failing.end());
  for (u64 a : failing) {
    const bool rescued = std::any_of(rows.begin(), rows.end(),
                                     [&](const SweepRow& r) { return r.alpha == a && r.verdict == SweepVerdict::Recovered; });
    if (!rescued) out.push_back(a);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Larger parameter sets

/// Smallest prime p = 2^n 3^m f - 1 with n >= min_n, 3^m closest to 2^n and f in [1, 50].
/// Returns (n, m, f).
inline std::array<u64, 3> find_sidh_prime(unsigned min_n) {
  for (unsigned n = min_n; n <= 31; ++n) {
    const double ratio = n * std::log(2.0) / std::log(3.0);
    const unsigned m = static_cast<unsigned>(std::lround(ratio));
    for (u64 f = 1; f <= 50; ++f) {
      const u64 p1 = ipow(2, n) * ipow(3, m) * f;
      if (p1 >= (u64{1} << 32)) break;
      if (is_prime_u64(p1 - 1)) return {n, m, f};
    }
  }
  throw param_error("no SIDH prime found below 2^32");
}

/// Parameter set on the prime found by find_sidh_prime(min_n): beta^2 = -1,
/// E0 = (y^2 = x^3 + x) / <T> for a seeded random T of order 2^n, random torsion bases.
inline ParamSpec generate_params(unsigned min_n, u64 seed = 1) {
  const auto [n, m, f] = find_sidh_prime(min_n);
  const u64 p = ipow(2, n) * ipow(3, m) * f - 1;
  if (p % 4 != 3) throw param_error("generated prime is not 3 mod 4");
  auto field = Fp2Context::make(p, 0, p - 1);
  const Fp2Context& F = *field;
  const CurvePtr start = make_curve(field, F.one(), F.zero());
  PointSampler sampler(seed);
  const auto walk = find_torsion_basis(start, 2, static_cast<unsigned>(n), p + 1, sampler);
  const CurvePtr E0 = quotient_curve(walk.first, 2, static_cast<unsigned>(n));
  const auto [PA, QA] = find_torsion_basis(E0, 2, static_cast<unsigned>(n), p + 1, sampler);
  const auto [PB, QB] = find_torsion_basis(E0, 3, static_cast<unsigned>(m), p + 1, sampler);
  auto coords = [](const Point& X) {
    return std::array<u64, 4>{X.x().c0(), X.x().c1(), X.y().c0(), X.y().c1()};
  };
  ParamSpec s;
  s.n = static_cast<unsigned>(n);
  s.m = static_cast<unsigned>(m);
  s.f = f;
  s.beta_rel = {0, p - 1};
  s.E0 = {E0->a().c0(), E0->a().c1(), E0->b().c0(), E0->b().c1()};
  s.PA = coords(PA);
  s.QA = coords(QA);
  s.PB = coords(PB);
  s.QB = coords(QB);
  return s;
}

}  // namespace gpstlab
