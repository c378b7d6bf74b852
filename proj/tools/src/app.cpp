#include "loewner_cli/app.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "loewner/serialize.hpp"
#include "loewner_cli/config.hpp"

#ifndef LOEWNER_LAB_VERSION
#define LOEWNER_LAB_VERSION "0.0.0"
#endif

namespace loewner::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view version() { return LOEWNER_LAB_VERSION; }

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::string hex(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

void report_error(std::ostream& err, std::string_view category, std::string_view message) {
  err << json{{"error", category}, {"message", message}}.dump() << '\n';
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json read_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return json::parse(text.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Loewner-evolution laboratory", "loewner_lab"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  for (const auto& kind : experiment_kinds()) {
    auto* sub = app.add_subcommand(kind, kind + " experiment");
    sub->add_option("--config", config_path, "experiment JSON")->required();
    sub->add_option("--out", out_dir, "output directory (default: $LOEWNER_LAB_OUT, config output, ./loewner_out)");
    sub->add_option("--seed", seed, "seed overriding the config");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "validation", e.what());
    return kExitValidation;
  }
  const std::string kind = app.get_subcommands().front()->get_name();

  Experiment experiment;
  fs::path directory;
  try {
    const fs::path config_file(config_path);
    const auto document = read_config(config_file);
    experiment = parse_experiment(kind, document, seed, config_file.parent_path());
    if (!out_dir.empty()) {
      directory = out_dir;
    } else if (document.contains("output")) {
      directory = document["output"].get<std::string>();
    } else if (const char* env = std::getenv("LOEWNER_LAB_OUT"); env && *env) {
      directory = env;
    } else {
      directory = "loewner_out";
    }
  } catch (const std::invalid_argument& e) {
    report_error(err, "validation", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    report_error(err, "runtime", e.what());
    return kExitRuntime;
  }

  try {
    const auto outcome = experiment.run(threads);
    fs::create_directories(directory);
    json files = json::array();
    for (const auto& f : outcome.files) {
      write_file(directory / f.name, f.content);
      files.push_back({{"path", f.name}, {"bytes", f.content.size()}, {"fnv1a64", hex(fnv1a(f.content))}});
    }
    const json manifest = {{"tool", "loewner_lab"},
                           {"version", version()},
                           {"kind", kind},
                           {"seed", experiment.seed},
                           {"config_hash", hex(fnv1a(experiment.config.dump()))},
                           {"config", experiment.config},
                           {"threads", threads},
                           {"files", files},
                           {"created_utc", utc_now()}};
    write_file(directory / "manifest.json", dump(manifest));
    out << json{{"kind", kind}, {"out", directory.string()}, {"result", outcome.summary}}.dump() << '\n';
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    report_error(err, "validation", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    report_error(err, "runtime", e.what());
    return kExitRuntime;
  }
}

}  // namespace loewner::cli
