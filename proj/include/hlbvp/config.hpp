#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "hlbvp/problem.hpp"

namespace hlbvp {

/// Schema violation or embedded-expression parse failure; `path()` is the
/// dotted key path of the offending entry (e.g. "problem.alpha").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Builds a ProblemSpec from a parsed config document. Invariant screening
/// is not run here; call validate() on the result.
ProblemSpec load_spec(const nlohmann::json& config);

nlohmann::json read_config_file(const std::filesystem::path& path);
ProblemSpec load_spec_file(const std::filesystem::path& path);

/// FNV-1a hash of the raw config bytes, as a fixed-width hex string.
std::string config_hash(const std::string& raw_bytes);

}  // namespace hlbvp
