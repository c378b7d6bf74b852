#include "loewner_cli/config.hpp"

#include <cmath>
#include <limits>

#include "loewner/csv_io.hpp"

namespace loewner::cli {

using nlohmann::json;

Fields::Fields(const json& object, std::string path) : object_(&object), path_(std::move(path)) {
  if (!object.is_object()) throw ConfigError(path_ + ": expected a JSON object");
}

void Fields::fail(std::string_view key, const std::string& what) const {
  throw ConfigError(path_ + "." + std::string(key) + ": " + what);
}

bool Fields::has(std::string_view key) const { return object_->contains(key); }

const json& Fields::at(std::string_view key) {
  const auto it = object_->find(key);
  if (it == object_->end()) fail(key, "missing required field");
  used_.emplace(key);
  return *it;
}

double Fields::number(std::string_view key) {
  const auto& v = at(key);
  if (!v.is_number()) fail(key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(key, "expected a finite number");
  return x;
}

double Fields::number(std::string_view key, double fallback) { return has(key) ? number(key) : fallback; }

double Fields::extended(std::string_view key, double fallback) {
  if (!has(key)) return fallback;
  const auto& v = at(key);
  if (v.is_string() && v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
  return number(key);
}

std::uint64_t Fields::count(std::string_view key) {
  const auto& v = at(key);
  if (!v.is_number_unsigned()) fail(key, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

std::uint64_t Fields::count(std::string_view key, std::uint64_t fallback) { return has(key) ? count(key) : fallback; }

bool Fields::flag(std::string_view key, bool fallback) {
  if (!has(key)) return fallback;
  const auto& v = at(key);
  if (!v.is_boolean()) fail(key, "expected true or false");
  return v.get<bool>();
}

std::string Fields::text(std::string_view key) {
  const auto& v = at(key);
  if (!v.is_string()) fail(key, "expected a string");
  return v.get<std::string>();
}

std::string Fields::text(std::string_view key, std::string fallback) {
  return has(key) ? text(key) : std::move(fallback);
}

std::vector<double> Fields::numbers(std::string_view key) {
  const auto& v = at(key);
  if (!v.is_array()) fail(key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number() || !std::isfinite(e.get<double>())) fail(key, "expected an array of finite numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<double> Fields::numbers(std::string_view key, std::vector<double> fallback) {
  return has(key) ? numbers(key) : std::move(fallback);
}

std::vector<std::uint64_t> Fields::counts(std::string_view key) {
  const auto& v = at(key);
  if (!v.is_array()) fail(key, "expected an array of integers");
  std::vector<std::uint64_t> out;
  for (const auto& e : v) {
    if (!e.is_number_unsigned()) fail(key, "expected an array of non-negative integers");
    out.push_back(e.get<std::uint64_t>());
  }
  return out;
}

std::vector<std::string> Fields::texts(std::string_view key, std::vector<std::string> fallback) {
  if (!has(key)) return fallback;
  const auto& v = at(key);
  if (!v.is_array()) fail(key, "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) fail(key, "expected an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

Complex Fields::point(std::string_view key) {
  const auto& v = at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    fail(key, "expected [re, im]");
  return {v[0].get<double>(), v[1].get<double>()};
}

Fields Fields::object(std::string_view key) { return Fields(at(key), path_ + "." + std::string(key)); }

void Fields::finish() const {
  for (const auto& [key, value] : object_->items())
    if (!used_.contains(key)) throw ConfigError(path_ + "." + key + ": unknown field");
}

Driver parse_driver(Fields spec, std::uint64_t seed, const std::filesystem::path& base_dir) {
  const auto type = spec.text("type");
  Driver driver = Driver::make({0.0, 0.0}, 1.0);
  auto grid = [&](auto&& value_at) {
    const auto steps = spec.count("steps", 1024);
    const double horizon = spec.number("horizon", 1.0);
    if (steps == 0) throw ConfigError(spec.path() + ".steps: must be positive");
    if (!(horizon > 0.0)) throw ConfigError(spec.path() + ".horizon: must be positive");
    std::vector<double> v(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) v[k] = value_at(horizon * double(k) / double(steps));
    return Driver::make(std::move(v), horizon);
  };
  if (type == "zero") {
    driver = grid([](double) { return 0.0; });
  } else if (type == "linear") {
    const double slope = spec.number("slope");
    driver = grid([&](double t) { return slope * t; });
  } else if (type == "sqrt") {
    const double c = spec.number("coefficient");
    driver = grid([&](double t) { return c * std::sqrt(t); });
  } else if (type == "values") {
    const auto values = spec.numbers("values");
    const double horizon = spec.number("horizon", 1.0);
    auto nodes = Driver::make(values, horizon);
    const auto steps = spec.count("steps", nodes.steps());
    if (steps == 0 || steps % nodes.steps() != 0)
      throw ConfigError(spec.path() + ".steps: must be a positive multiple of the node count");
    std::vector<double> v(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) v[k] = nodes.at(horizon * double(k) / double(steps));
    v.back() = values.back();
    for (std::size_t j = 0; j < nodes.steps(); ++j) v[j * (steps / nodes.steps())] = values[j];
    driver = Driver::make(std::move(v), horizon);
  } else if (type == "file") {
    auto path = std::filesystem::path(spec.text("path"));
    if (path.is_relative()) path = base_dir / path;
    driver = read_driver_csv(path);
  } else if (type == "brownian") {
    const double kappa = spec.number("kappa");
    const auto steps = spec.count("steps", 1024);
    const double horizon = spec.number("horizon", 1.0);
    driver = sample_brownian_driver(kappa, horizon, steps, seed);
  } else {
    throw ConfigError(spec.path() + ".type: unknown driver type '" + type + "'");
  }
  spec.finish();
  return driver;
}

}  // namespace loewner::cli
