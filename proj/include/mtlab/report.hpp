#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtlab/errors.hpp"
#include "mtlab/version.hpp"

namespace mtlab {

using json = nlohmann::ordered_json;

enum class Verdict { Pass, Fail, Inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    default: return "INCONCLUSIVE";
  }
}

// Exit-code contract of the experiment runner.
inline int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Pass: return 0;
    case Verdict::Fail: return 2;
    default: return 3;
  }
}
inline constexpr int exit_config_error = 1;

inline json make_report(const std::string& experiment, const std::string& quantity,
                        std::uint64_t seed) {
  json j;
  j["tool"] = "mtlab";
  j["version"] = version_string;
  j["experiment"] = experiment;
  j["quantity"] = quantity;  // what is being computed/tested, in formula terms
  j["seed"] = seed;
  return j;
}

inline void stamp_and_finalize(json& j, Verdict v) {
  j["verdict"] = to_string(v);
  const auto now = std::chrono::system_clock::now();
  j["timestamp"] = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
}

// Atomic write: temporary file in the same directory, then rename.
inline void write_report(const json& j, const std::string& path) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw input_error("cannot write report: " + path);
    out << j.dump(2) << "\n";
  }
  fs::rename(tmp, target);
}

inline void write_csv(const std::string& path, const std::string& header,
                      const std::vector<std::vector<double>>& rows) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  std::ofstream out(target);
  if (!out) throw input_error("cannot write csv: " + path);
  out << header << "\n";
  out.precision(15);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

}  // namespace mtlab
