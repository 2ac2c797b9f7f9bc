#pragma once

#include <array>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "gpstlab/io.hpp"

namespace gpstlab::cli {

enum ExitCode : int { kOk = 0, kVerdictFailure = 1, kConfigError = 2 };

inline constexpr const char* kBuiltinRef = "builtin:p863";

/// Expected outcome of the worked p = 863 instance (alpha = 10, b1 = 1, b2 = 6).
struct GoldenIteration {
  unsigned i;
  u64 theta;  // compared up to the choice of square root
  bool oracle;
  unsigned bit;
  u64 K;
};

struct GoldenTranscript {
  std::vector<GoldenIteration> iterations;
  unsigned tail_tested;
  std::optional<u64> tail_found;
  Verdict verdict;
};

inline GoldenTranscript p863_golden() {
  return {{{0, 7, true, 0, 0}, {1, 5, true, 0, 0}}, 8, std::nullopt, Verdict::KeyNotFound};
}

/// First field at which `tr` departs from `golden`, or nullopt when they agree.
inline std::optional<std::string> first_divergence(const AttackTranscript& tr, const GoldenTranscript& golden, unsigned n) {
  if (tr.iterations.size() != golden.iterations.size()) return std::string("iterations.length");
  for (std::size_t k = 0; k < golden.iterations.size(); ++k) {
    const auto& got = tr.iterations[k];
    const auto& want = golden.iterations[k];
    const std::string at = "iterations[" + std::to_string(k) + "].";
    if (got.i != want.i) return at + "i";
    if (!mod2n_root_equivalent(got.theta, want.theta, n)) return at + "theta";
    if (got.oracle_answer != want.oracle) return at + "oracle";
    if (got.bit != want.bit) return at + "bit";
    if (got.K != want.K) return at + "K";
  }
  if (tr.tail.tested != golden.tail_tested) return std::string("tail.tested");
  if (tr.tail.found != golden.tail_found) return std::string("tail.found");
  if (tr.verdict != golden.verdict) return std::string("verdict");
  return std::nullopt;
}

/// Models and points printed for the worked example, as (c0, c1) pairs.
struct PublishedFigures {
  std::array<u64, 4> EA{535, 40, 768, 720};
  std::array<u64, 4> EB{105, 0, 254, 0};
  std::array<u64, 4> EAB{698, 0, 605, 516};
  std::array<u64, 4> R{257, 151, 2, 594};
  std::array<u64, 4> S{386, 98, 58, 286};
  std::array<std::array<u64, 4>, 2> Rprime{{{129, 527, 163, 700}, {261, 97, 545, 795}}};
  std::array<std::array<u64, 4>, 2> Sprime{{{377, 164, 641, 566}, {214, 718, 844, 450}}};
  u64 shared_j = 117;
};

inline bool coeffs_equal(const Curve& E, const std::array<u64, 4>& c) {
  return E.a().c0() == c[0] && E.a().c1() == c[1] && E.b().c0() == c[2] && E.b().c1() == c[3];
}
inline bool coords_equal(const Point& P, const std::array<u64, 4>& c) {
  return !P.is_infinity() && P.x().c0() == c[0] && P.x().c1() == c[1] && P.y().c0() == c[2] && P.y().c1() == c[3];
}

struct RunConfig {
  std::string params_path;
  std::optional<u64> alpha;
  std::optional<u64> b1;
  std::optional<u64> b2;
  std::string alpha_range;
  std::string b_range;
  std::string json_path;
  std::string csv_path;
  u64 seed = 0x5eed;
  unsigned workers = 0;
};

/// "A..B" as the half-open range [A, B).
inline std::pair<u64, u64> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw param_error("range '" + text + "' must look like A..B");
  try {
    std::size_t used = 0;
    const std::string lo_s = text.substr(0, dots), hi_s = text.substr(dots + 2);
    const u64 lo = std::stoull(lo_s, &used);
    if (used != lo_s.size()) throw std::invalid_argument("lo");
    const u64 hi = std::stoull(hi_s, &used);
    if (used != hi_s.size()) throw std::invalid_argument("hi");
    if (hi < lo) throw param_error("range '" + text + "' is reversed");
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw param_error("range '" + text + "' must look like A..B");
  }
}

struct LoadedParams {
  SidhParams params;
  std::string ref;
};

/// Parses and validates the parameter set; prints failed checks and throws on any failure.
inline LoadedParams load_validated(const RunConfig& cfg, std::ostream& err) {
  const ParamSpec spec = cfg.params_path.empty() ? p863_spec() : load_params_file(cfg.params_path);
  const ValidationReport report = validate_params(spec, cfg.seed);
  if (!report.ok()) {
    for (const auto& c : report.checks)
      if (!c.passed) err << "validation failed: " << c.name << " (" << c.detail << ")\n";
    throw param_error("parameter set failed validation");
  }
  return {make_params(spec), cfg.params_path.empty() ? std::string(kBuiltinRef) : cfg.params_path};
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw param_error("cannot write '" + path + "'");
  out << contents;
}

inline void print_transcript(std::ostream& out, const AttackTranscript& tr, unsigned n) {
  for (const IterationRecord& r : tr.iterations) {
    out << "iteration " << r.i << ": theta = " << r.theta << ", R' = " << r.Rprime << ", S' = " << r.Sprime
        << ", oracle = " << (r.oracle_answer ? "true" : "false") << ", bit " << r.i << " = " << r.bit
        << ", K = " << key_bits(r.K, n) << "\n";
  }
  out << "brute force over the top 3 bits: tested " << tr.tail.tested << " completions, ";
  if (tr.tail.found) {
    out << "found " << key_bits(*tr.tail.found, n) << "\n";
  } else {
    out << "no completion matches j(E_A)\n";
  }
}

inline void print_verdict(std::ostream& out, const AttackTranscript& tr, unsigned n) {
  if (tr.verdict == Verdict::RecoveredKey) {
    out << "verdict: RecoveredKey(1, " << *tr.tail.found << ")  [alpha = " << key_bits(*tr.tail.found, n)
        << ", bits read LSB-first from the right]\n";
  } else {
    out << "verdict: Key not found\n";
  }
}

inline int cmd_demo(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const LoadedParams lp = load_validated(cfg, err);
  const SidhParams& P = lp.params;
  const u64 alpha = cfg.alpha.value_or(10);
  const u64 b1 = cfg.b1.value_or(1);
  const u64 b2 = cfg.b2.value_or(6);
  const bool golden_run = P.spec == p863_spec() && alpha == 10 && b1 == 1 && b2 == 6;

  const AttackInstance inst = make_instance(P, alpha, b1, b2);
  out << "p = " << P.p << " = 2^" << P.n << " * 3^" << P.m << " * " << P.f << " - 1, beta^2 = " << P.field->u()
      << "*beta + " << P.field->v() << "\n";
  out << "E0: " << *P.E0 << "\n";
  out << "Alice's key (1, alpha) with alpha = " << key_bits(inst.alpha, P.n) << "\n";
  out << "Bob's scalars (b1, b2) = (" << b1 << ", " << b2 << ")\n";
  out << "E_A: " << *inst.alice.EA << ", j = " << j_invariant(inst.alice.EA) << "\n";
  out << "E_B: " << *inst.bob.EB << ", j = " << j_invariant(inst.bob.EB) << "\n";
  out << "R = phi_B(PA) = " << inst.bob.R << ", S = phi_B(QA) = " << inst.bob.S << "\n";
  out << "E_AB: " << *inst.EAB << ", j = " << j_invariant(inst.EAB) << "\n";

  const Oracle oracle(inst.key(), P.n);
  const AttackTranscript tr = gpst_attack(oracle, P, inst.alice, b1, b2, {}, lp.ref);
  print_transcript(out, tr, P.n);
  print_verdict(out, tr, P.n);

  if (!cfg.json_path.empty()) write_file(cfg.json_path, transcript_to_json(tr).dump(2) + "\n");

  if (!golden_run) return kOk;

  const PublishedFigures fig;
  auto report = [&](const char* what, bool same) {
    out << "  " << what << ": " << (same ? "matches" : "differs") << "\n";
  };
  out << "coefficient-level comparison with the published figures:\n";
  report("E_A model", coeffs_equal(*inst.alice.EA, fig.EA));
  report("E_B model", coeffs_equal(*inst.bob.EB, fig.EB));
  report("E_AB model", coeffs_equal(*inst.EAB, fig.EAB));
  report("R", coords_equal(inst.bob.R, fig.R));
  report("S", coords_equal(inst.bob.S, fig.S));
  for (std::size_t k = 0; k < tr.iterations.size() && k < 2; ++k) {
    report(k == 0 ? "R'_0" : "R'_1", coords_equal(tr.iterations[k].Rprime, fig.Rprime[k]));
    report(k == 0 ? "S'_0" : "S'_1", coords_equal(tr.iterations[k].Sprime, fig.Sprime[k]));
  }
  const auto diverge = first_divergence(tr, p863_golden(), P.n);
  if (diverge) {
    err << "golden transcript mismatch at " << *diverge << "\n";
    return kVerdictFailure;
  }
  if (!(j_invariant(inst.EAB) == P.element(fig.shared_j))) {
    err << "golden transcript mismatch at shared j-invariant\n";
    return kVerdictFailure;
  }
  out << "golden transcript: match\n";
  return kOk;
}

inline int cmd_attack(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.alpha || !cfg.b1 || !cfg.b2) {
    err << "attack needs --alpha, --b1 and --b2\n";
    return kConfigError;
  }
  const LoadedParams lp = load_validated(cfg, err);
  const SidhParams& P = lp.params;
  std::optional<AttackInstance> inst;
  try {
    inst = make_instance(P, *cfg.alpha, *cfg.b1, *cfg.b2);
  } catch (const isogeny_error& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  const Oracle oracle(inst->key(), P.n);
  const AttackTranscript tr = gpst_attack(oracle, P, inst->alice, *cfg.b1, *cfg.b2, {}, lp.ref);
  out << "target key (1, alpha) with alpha = " << key_bits(inst->alpha, P.n) << "\n";
  print_transcript(out, tr, P.n);
  print_verdict(out, tr, P.n);
  if (!cfg.json_path.empty()) write_file(cfg.json_path, transcript_to_json(tr).dump(2) + "\n");
  if (tr.verdict != Verdict::RecoveredKey) return kVerdictFailure;
  if (*tr.tail.found != inst->alpha) {
    out << "recovered key differs from the secret: j-collision on Alice's side\n";
    return kVerdictFailure;
  }
  return kOk;
}

inline int cmd_search(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const LoadedParams lp = load_validated(cfg, err);
  const SidhParams& P = lp.params;
  const auto [alo, ahi] = cfg.alpha_range.empty() ? std::pair<u64, u64>{0, P.two_torsion()} : parse_range(cfg.alpha_range);
  const auto [blo, bhi] = cfg.b_range.empty() ? std::pair<u64, u64>{0, P.three_torsion()} : parse_range(cfg.b_range);
  if (ahi > P.two_torsion() || bhi > P.three_torsion()) throw param_error("range exceeds the scalar space");
  const unsigned workers = cfg.workers != 0 ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
  const std::vector<SweepRow> rows =
      search_failure_instances(P, integer_range(alo, ahi), {cfg.b1.value_or(1)}, integer_range(blo, bhi), workers);
  const std::string csv = sweep_csv(rows);
  if (!cfg.csv_path.empty()) {
    write_file(cfg.csv_path, csv);
  } else {
    out << csv;
  }
  std::size_t recovered = 0, not_found = 0, wrong = 0, invalid = 0, unexplained = 0;
  for (const SweepRow& r : rows) {
    switch (r.verdict) {
      case SweepVerdict::Recovered: ++recovered; break;
      case SweepVerdict::KeyNotFound: ++not_found; break;
      case SweepVerdict::WrongKey: ++wrong; break;
      case SweepVerdict::InvalidKernel: ++invalid; break;
    }
    if (r.verdict != SweepVerdict::Recovered && r.verdict != SweepVerdict::InvalidKernel &&
        r.explanation == Explanation::Unexplained) {
      ++unexplained;
    }
  }
  out << "rows: " << rows.size() << ", recovered: " << recovered << ", not-found: " << not_found
      << ", wrong-key: " << wrong << ", invalid-kernel: " << invalid << ", unexplained: " << unexplained << "\n";
  for (const SweepRow& r : rows) {
    if (r.verdict == SweepVerdict::Recovered) continue;
    out << "failing cell alpha=" << r.alpha << " b1=" << r.b1 << " b2=" << r.b2 << ": " << to_string(r.verdict);
    if (r.first_failed_i) out << " at iteration " << *r.first_failed_i;
    out << " (" << to_string(r.explanation) << ")\n";
  }
  return kOk;
}

inline int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.params_path.empty()) {
    err << "validate needs --params PATH\n";
    return kConfigError;
  }
  const ParamSpec spec = load_params_file(cfg.params_path);
  const ValidationReport report = validate_params(spec, cfg.seed);
  for (const auto& c : report.checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) out << "  (" << c.detail << ")";
    out << "\n";
  }
  return report.ok() ? kOk : kConfigError;
}

/// Entry point shared by the executable and the tests.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"GPST adaptive attack laboratory for toy SIDH parameters"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::optional<u64> alpha, b1, b2;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--params", cfg.params_path, "parameter file (JSON); defaults to the built-in p = 863 set");
    sub->add_option("--seed", cfg.seed, "seed for randomized checks");
  };
  auto* demo = app.add_subcommand("demo", "reproduce the worked p = 863 failure");
  add_common(demo);
  demo->add_option("--alpha", alpha, "Alice's alpha");
  demo->add_option("--b1", b1, "Bob's b1");
  demo->add_option("--b2", b2, "Bob's b2");
  demo->add_option("--json", cfg.json_path, "write the transcript as JSON");

  auto* attack = app.add_subcommand("attack", "run one attack against a simulated oracle");
  add_common(attack);
  attack->add_option("--alpha", alpha, "Alice's alpha");
  attack->add_option("--b1", b1, "Bob's b1");
  attack->add_option("--b2", b2, "Bob's b2");
  attack->add_option("--json", cfg.json_path, "write the transcript as JSON");

  auto* search = app.add_subcommand("search", "sweep keys and Bob scalars, classify failures");
  add_common(search);
  search->add_option("--alpha-range", cfg.alpha_range, "A..B, half-open (default: whole keyspace)");
  search->add_option("--b1", b1, "fixed b1 (default 1)");
  search->add_option("--b-range", cfg.b_range, "A..B for b2, half-open (default: [0, 3^m))");
  search->add_option("--csv", cfg.csv_path, "write the table here instead of stdout");
  search->add_option("--workers", cfg.workers, "parallel workers (default: hardware threads)");

  auto* validate = app.add_subcommand("validate", "check a parameter file");
  add_common(validate);

  std::vector<std::string> argv_store{"gpstlab"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }
  cfg.alpha = alpha;
  cfg.b1 = b1;
  cfg.b2 = b2;

  try {
    if (demo->parsed()) return cmd_demo(cfg, out, err);
    if (attack->parsed()) return cmd_attack(cfg, out, err);
    if (search->parsed()) return cmd_search(cfg, out, err);
    if (validate->parsed()) return cmd_validate(cfg, out, err);
  } catch (const param_error& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const error& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace gpstlab::cli
