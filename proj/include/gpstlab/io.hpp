#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "gpstlab/analysis.hpp"

namespace gpstlab {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline std::string line_context(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < text.size() && k + 1 < byte; ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  std::size_t start = text.rfind('\n', byte == 0 ? 0 : byte - 1);
  start = start == std::string::npos ? 0 : start + 1;
  std::size_t end = text.find('\n', start);
  if (end == std::string::npos) end = text.size();
  return "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + text.substr(start, end - start);
}

inline u64 get_uint(const ordered_json& j, const char* key) {
  if (!j.contains(key)) throw param_error(std::string("missing field '") + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw param_error(std::string("field '") + key + "' must be a non-negative integer");
  }
  return v.get<u64>();
}

template <std::size_t N>
std::array<u64, N> get_uint_array(const ordered_json& j, const char* key) {
  if (!j.contains(key)) throw param_error(std::string("missing field '") + key + "'");
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != N) {
    throw param_error(std::string("field '") + key + "' must be an array of " + std::to_string(N) + " integers");
  }
  std::array<u64, N> out{};
  for (std::size_t k = 0; k < N; ++k) {
    if (!v[k].is_number_unsigned() && !(v[k].is_number_integer() && v[k].get<long long>() >= 0)) {
      throw param_error(std::string("field '") + key + "' must contain non-negative integers");
    }
    out[k] = v[k].get<u64>();
  }
  return out;
}

}  // namespace detail

/// Parameter file: {n, m, f, beta_rel: [u, v], E0: [a0, a1, b0, b1], PA/QA/PB/QB: [x0, x1, y0, y1]}.
inline ParamSpec params_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw param_error(std::string("parse error at ") + detail::line_context(text, e.byte) + " (" + e.what() + ")");
  }
  if (!j.is_object()) throw param_error("parameter file must contain a JSON object");
  ParamSpec s;
  s.n = static_cast<unsigned>(detail::get_uint(j, "n"));
  s.m = static_cast<unsigned>(detail::get_uint(j, "m"));
  s.f = detail::get_uint(j, "f");
  s.beta_rel = detail::get_uint_array<2>(j, "beta_rel");
  s.E0 = detail::get_uint_array<4>(j, "E0");
  s.PA = detail::get_uint_array<4>(j, "PA");
  s.QA = detail::get_uint_array<4>(j, "QA");
  s.PB = detail::get_uint_array<4>(j, "PB");
  s.QB = detail::get_uint_array<4>(j, "QB");
  return s;
}

inline ordered_json params_to_json(const ParamSpec& s) {
  ordered_json j;
  j["n"] = s.n;
  j["m"] = s.m;
  j["f"] = s.f;
  j["beta_rel"] = s.beta_rel;
  j["E0"] = s.E0;
  j["PA"] = s.PA;
  j["QA"] = s.QA;
  j["PB"] = s.PB;
  j["QB"] = s.QB;
  return j;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw param_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ParamSpec load_params_file(const std::string& path) {
  try {
    return params_from_json(read_text_file(path));
  } catch (const param_error& e) {
    throw param_error(path + ": " + e.what());
  }
}

/// {params_ref, b1, b2, iterations: [{i, theta, oracle, bit, K}], tail: {tested, found}, verdict}.
inline ordered_json transcript_to_json(const AttackTranscript& tr) {
  ordered_json j;
  j["params_ref"] = tr.params_ref;
  j["b1"] = tr.b1;
  j["b2"] = tr.b2;
  ordered_json its = ordered_json::array();
  for (const IterationRecord& r : tr.iterations) {
    ordered_json it;
    it["i"] = r.i;
    it["theta"] = r.theta;
    it["oracle"] = r.oracle_answer;
    it["bit"] = r.bit;
    it["K"] = r.K;
    its.push_back(std::move(it));
  }
  j["iterations"] = std::move(its);
  ordered_json tail;
  tail["tested"] = tr.tail.tested;
  if (tr.tail.found) {
    tail["found"] = *tr.tail.found;
  } else {
    tail["found"] = nullptr;
  }
  j["tail"] = std::move(tail);
  j["verdict"] = to_string(tr.verdict);
  return j;
}

inline ordered_json point_to_json(const Point& P) {
  if (P.is_infinity()) return "O";
  return ordered_json::array({P.x().c0(), P.x().c1(), P.y().c0(), P.y().c1()});
}

inline ordered_json failure_report_to_json(const FailureReport& r) {
  ordered_json j;
  j["iteration"] = r.iteration;
  j["condition_i"] = r.cond_i;
  j["condition_ii"] = r.cond_ii;
  j["condition_iii"] = r.cond_iii;
  ordered_json kernels = ordered_json::array();
  for (const Point& G : r.collision_kernels) kernels.push_back(point_to_json(G));
  j["collision_kernels"] = std::move(kernels);
  j["oracle_answer"] = r.oracle_answer;
  j["misreported"] = r.misreported;
  return j;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "alpha,b1,b2,verdict,first_failed_i,cond_i,cond_ii,cond_iii,collision_count\n";
  for (const SweepRow& r : rows) {
    os << r.alpha << ',' << r.b1 << ',' << r.b2 << ',' << to_string(r.verdict) << ',';
    if (r.first_failed_i) os << *r.first_failed_i;
    os << ',' << (r.cond_i ? "true" : "false") << ',' << (r.cond_ii ? "true" : "false") << ','
       << (r.cond_iii ? "true" : "false") << ',' << r.collision_count << '\n';
  }
  return os.str();
}

}  // namespace gpstlab
