#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gpstlab/sidh.hpp"

namespace gpstlab {

/// Honest party holding a static key. Answers whether j(E / <[a1]R + [a2]S>) == j(E').
class Oracle {
 public:
  Oracle(SecretKey key, unsigned n) : key_(key), n_(n) {}
  Oracle(const NormalizedKey& key, unsigned n) : key_(key.as_pair()), n_(n) {}

  /// A kernel point whose order is not 2^n makes the honest side's check fail: the answer is false.
  bool query(const CurvePtr& E, const Point& R, const Point& S, const CurvePtr& Eprime) const {
    ++queries_;
    if (!same_curve(E, R.curve()) || !same_curve(E, S.curve())) throw curve_error("curve mismatch");
    const u64 mod = u64{1} << n_;
    const Point K = scalar_mul(key_.a1 % mod, R) + scalar_mul(key_.a2 % mod, S);
    try {
      return j_invariant(quotient_curve(K, 2, n_)) == j_invariant(Eprime);
    } catch (const isogeny_error&) {
      return false;
    }
  }

  unsigned exponent() const { return n_; }
  u64 queries() const { return queries_; }

 private:
  SecretKey key_;
  unsigned n_;
  mutable u64 queries_ = 0;
};

inline bool oracle_query(const Oracle& oracle, const CurvePtr& E, const Point& R, const Point& S, const CurvePtr& Eprime) {
  return oracle.query(E, R, S, Eprime);
}

struct MalformedPoints {
  u64 theta;
  Point Rprime;
  Point Sprime;
};

/// R' = [theta](R - [2^(n-i-1) K]S), S' = [theta][1 + 2^(n-i-1)]S for an explicit theta.
inline MalformedPoints malformed_points_with_theta(u64 theta, unsigned i, u64 K, const Point& R, const Point& S, unsigned n) {
  const Mod2nRing ring(n);
  const u64 shift = u64{1} << (n - i - 1);
  const Point Rp = scalar_mul(theta, R - scalar_mul(ring.mul(shift, K), S));
  const Point Sp = scalar_mul(ring.mul(theta, 1 + shift), S);
  return {theta, Rp, Sp};
}

/// theta_i = sqrt((1 + 2^(n-i-1))^-1) mod 2^n, canonical (least) root.
inline u64 attack_theta(unsigned i, unsigned n) {
  if (i + 4 > n) throw analysis_error("iteration index out of range for the oracle loop");
  const u64 inverse = mod2n_inverse(1 + (u64{1} << (n - i - 1)), n);
  try {
    return mod2n_sqrt(inverse, n);
  } catch (const arith_error&) {
    throw error("internal: theta undefined at iteration " + std::to_string(i));
  }
}

inline MalformedPoints malformed_points(unsigned i, u64 K, const Point& R, const Point& S, unsigned n) {
  return malformed_points_with_theta(attack_theta(i, n), i, K, R, S, n);
}

struct IterationRecord {
  unsigned i = 0;
  u64 theta = 0;
  Point Rprime = Point::infinity(nullptr);
  Point Sprime = Point::infinity(nullptr);
  Point Rprime_canonical = Point::infinity(nullptr);  // smallest-(x, y) generator of <R'>
  Point Sprime_canonical = Point::infinity(nullptr);
  bool oracle_answer = false;
  unsigned bit = 0;
  u64 K = 0;
  bool injected = false;  // answer forced true by the test harness
};

struct TailResult {
  unsigned tested = 0;
  std::optional<u64> found;
};

enum class Verdict { RecoveredKey, KeyNotFound };

struct AttackTranscript {
  std::string params_ref;
  u64 b1 = 0;
  u64 b2 = 0;
  unsigned n = 0;
  CurvePtr EB;
  CurvePtr EAB;
  Point R = Point::infinity(nullptr);
  Point S = Point::infinity(nullptr);
  std::vector<IterationRecord> iterations;
  u64 K = 0;
  TailResult tail;
  Verdict verdict = Verdict::KeyNotFound;

  std::optional<NormalizedKey> recovered() const {
    if (verdict != Verdict::RecoveredKey || !tail.found) return std::nullopt;
    return NormalizedKey{KeyForm::FirstUnit, *tail.found};
  }
};

/// Tries K + i 2^(n-3) + j 2^(n-2) + k 2^(n-1) for (i, j, k) in lexicographic order and
/// returns the first key with j(E0 / <PA + [key]QA>) == j(EA).
inline TailResult brute_force_tail(u64 K, unsigned n, const SidhParams& P, const CurvePtr& EA) {
  TailResult out;
  const Fp2Element target = j_invariant(EA);
  const u64 mod = u64{1} << n;
  const unsigned low = n >= 3 ? n - 3 : 0;
  for (u64 i = 0; i < 2; ++i) {
    for (u64 j = 0; j < 2; ++j) {
      for (u64 k = 0; k < 2; ++k) {
        const u64 key = (K + (i << low) + (j << (low + 1)) + (k << (low + 2))) % mod;
        ++out.tested;
        if (j_invariant(quotient_curve(P.PA + scalar_mul(key, P.QA), 2, n)) == target) {
          out.found = key;
          return out;
        }
      }
    }
  }
  return out;
}

struct AttackOptions {
  /// Forces the oracle answer at this iteration to true (a missed one-bit),
  /// for studying how a single wrong bit propagates.
  std::optional<unsigned> inject_miss_at;
  bool record_canonical = true;
};

/// Full attack against a key of the form (1, alpha): n - 3 oracle iterations deducing
/// bits LSB-first, then the three top bits by brute force.
inline AttackTranscript gpst_attack(const Oracle& oracle, const SidhParams& P, const AlicePublic& alice, u64 b1, u64 b2,
                                    const AttackOptions& options = {}, std::string params_ref = {}) {
  AttackTranscript tr;
  tr.params_ref = std::move(params_ref);
  tr.b1 = b1;
  tr.b2 = b2;
  tr.n = P.n;
  const BobPublic bob = bob_publics(P, b1, b2);
  tr.EB = bob.EB;
  tr.R = bob.R;
  tr.S = bob.S;
  tr.EAB = shared_curve_alice(P, alice, b1, b2);
  const unsigned n = P.n;
  u64 K = 0;
  for (unsigned i = 0; i + 3 < n; ++i) {
    const MalformedPoints mp = malformed_points(i, K, bob.R, bob.S, n);
    IterationRecord rec;
    rec.i = i;
    rec.theta = mp.theta;
    rec.Rprime = mp.Rprime;
    rec.Sprime = mp.Sprime;
    if (options.record_canonical) {
      rec.Rprime_canonical = canonical_generator(mp.Rprime);
      rec.Sprime_canonical = canonical_generator(mp.Sprime);
    }
    if (options.inject_miss_at && *options.inject_miss_at == i) {
      rec.oracle_answer = true;
      rec.injected = true;
    } else {
      rec.oracle_answer = oracle.query(bob.EB, mp.Rprime, mp.Sprime, tr.EAB);
    }
    rec.bit = rec.oracle_answer ? 0 : 1;
    K += u64{rec.bit} << i;
    rec.K = K;
    tr.iterations.push_back(rec);
  }
  tr.K = K;
  tr.tail = brute_force_tail(K, n, P, alice.EA);
  tr.verdict = tr.tail.found ? Verdict::RecoveredKey : Verdict::KeyNotFound;
  return tr;
}

inline const char* to_string(Verdict v) { return v == Verdict::RecoveredKey ? "RecoveredKey" : "KeyNotFound"; }

/// "10 = 0b01010" with the binary expansion padded to n bits (most significant first).
inline std::string key_bits(u64 key, unsigned n) {
  std::string bits;
  for (unsigned k = n; k-- > 0;) bits.push_back(((key >> k) & 1) ? '1' : '0');
  return std::to_string(key) + " = 0b" + bits;
}

}  // namespace gpstlab
