#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "loewner/driver.hpp"
#include "loewner/error.hpp"
#include "loewner/map_chain.hpp"

namespace loewner::cli {

class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// A run finished but its result violates an asserted requirement (exit status 2).
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Typed access to a JSON object; finish() rejects fields that were never read.
class Fields {
 public:
  Fields(const nlohmann::json& object, std::string path);

  bool has(std::string_view key) const;
  double number(std::string_view key);
  double number(std::string_view key, double fallback);
  // Accepts a number or the string "inf".
  double extended(std::string_view key, double fallback);
  std::uint64_t count(std::string_view key);
  std::uint64_t count(std::string_view key, std::uint64_t fallback);
  bool flag(std::string_view key, bool fallback);
  std::string text(std::string_view key);
  std::string text(std::string_view key, std::string fallback);
  std::vector<double> numbers(std::string_view key);
  std::vector<double> numbers(std::string_view key, std::vector<double> fallback);
  std::vector<std::uint64_t> counts(std::string_view key);
  std::vector<std::string> texts(std::string_view key, std::vector<std::string> fallback);
  Complex point(std::string_view key);
  Fields object(std::string_view key);
  void finish() const;

  const std::string& path() const noexcept { return path_; }

 private:
  const nlohmann::json& at(std::string_view key);
  [[noreturn]] void fail(std::string_view key, const std::string& what) const;

  const nlohmann::json* object_;
  std::string path_;
  std::set<std::string, std::less<>> used_;
};

struct Artifact {
  std::string name;
  std::string content;
};

struct Outcome {
  std::vector<Artifact> files;
  nlohmann::json summary;
};

struct Experiment {
  using RunFn = std::function<Outcome(unsigned threads)>;

  std::string kind;
  std::uint64_t seed = 1;
  nlohmann::json config;  // effective configuration, seed included
  RunFn run;
};

const std::vector<std::string>& experiment_kinds();

// Validates the whole document up front. Relative file references resolve
// against base_dir.
Experiment parse_experiment(const std::string& kind, const nlohmann::json& document,
                            std::optional<std::uint64_t> seed_override, const std::filesystem::path& base_dir);

// Builds a driver from a spec object: zero | linear | sqrt | values | file | brownian.
Driver parse_driver(Fields spec, std::uint64_t seed, const std::filesystem::path& base_dir);

}  // namespace loewner::cli
