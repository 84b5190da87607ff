#pragma once
// Run manifests and report serialization. Everything is written in the same
// key/value format as scenario files.

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <openssl/evp.h>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "fcbf/io/config.hpp"
#include "fcbf/sim.hpp"
#include "fcbf/verify.hpp"

namespace fcbf::io {

/// Object id git assigns to a file with this content ("blob <size>\0" + bytes, SHA-1).
inline std::string git_blob_sha1(std::string_view content) {
  const std::string head = "blob " + std::to_string(content.size()) + '\0';
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  const bool ok = ctx && EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, head.data(), head.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, md, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("SHA-1 digest failed");
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

inline std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(now)));
}

struct RunManifest {
  std::string command;
  std::string config_path;
  std::string config_hash;
  std::string controller;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;
  std::string started_utc;
  std::string finished_utc;

  [[nodiscard]] std::string to_text() const {
    KeyValueWriter w;
    w.put("command", command);
    if (!config_path.empty()) w.put("config_path", config_path).put("config_sha1", config_hash);
    if (!controller.empty()) w.put("controller", controller);
    for (std::size_t i = 0; i < inputs.size(); ++i) w.put("input." + std::to_string(i), inputs[i]);
    for (std::size_t i = 0; i < outputs.size(); ++i) w.put("output." + std::to_string(i), outputs[i]);
    w.put("seed", std::to_string(seed)).put("started_utc", started_utc).put("finished_utc", finished_utc);
    return w.str();
  }
};

inline void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// Reports

inline std::string summary_text(const RunSummary& s, const std::string& prefix = "summary.") {
  KeyValueWriter w;
  w.put(prefix + "status", to_string(s.status))
      .put(prefix + "steps_completed", s.steps_completed)
      .put(prefix + "min_b", s.min_b)
      .put(prefix + "min_psi1", s.min_psi1)
      .put(prefix + "max_rate", s.max_rate)
      .put(prefix + "goal_distance", s.goal_distance)
      .put(prefix + "cost_proxy", s.cost_proxy);
  if (!s.diagnostic.empty()) w.put(prefix + "diagnostic", s.diagnostic);
  return w.str();
}

inline std::string deriv_report_text(const std::vector<DerivCheckReport>& reports) {
  KeyValueWriter w;
  for (const auto& r : reports) {
    const std::string p = "deriv." + r.operation + ".";
    w.put(p + "max_rel_error", r.max_rel_error)
        .put(p + "threshold", r.threshold)
        .put(p + "n_samples", r.n_samples)
        .put(p + "seed", std::to_string(r.seed))
        .put(p + "pass", r.pass);
  }
  return w.str();
}

inline std::string startup_report_text(const StartupReport& s) {
  KeyValueWriter w;
  for (const auto& c : s.checks) {
    w.put("startup." + c.name + ".value", c.value).put("startup." + c.name + ".pass", c.pass);
  }
  return w.str();
}

inline std::string smoothness_text(const SmoothnessReport& r, const std::string& prefix) {
  KeyValueWriter w;
  w.put(prefix + "max_rate", r.max_rate)
      .put(prefix + "total_variation", r.total_variation)
      .put(prefix + "lipschitz_estimate", r.lipschitz_estimate)
      .put(prefix + "bound_checked_steps", static_cast<int>(r.bound_trace.size()))
      .put(prefix + "bound_holds", r.bound_holds);
  return w.str();
}

/// Plain-text comparison table, one line per run.
inline std::string comparison_table(const std::vector<ComparisonRow>& rows) {
  std::string s = fmt::format("{:<24} {:<14} {:>5} {:>12} {:>12} {:>14} {:>14} {:>12}\n", "run", "status",
                              "steps", "min_b", "goal_dist", "max|du1|/dt", "max|du2|/dt", "mean_qp_s");
  for (const auto& r : rows) {
    s += fmt::format("{:<24} {:<14} {:>5} {:>12.6g} {:>12.6g} {:>14.6g} {:>14.6g} {:>12.3g}\n", r.name,
                     r.status, r.steps, r.min_b, r.goal_distance, r.max_rate[0], r.max_rate[1],
                     r.mean_solve_time);
  }
  return s;
}

}  // namespace fcbf::io
