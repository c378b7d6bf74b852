#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "loewner/csv_io.hpp"
#include "loewner_cli/app.hpp"

using namespace loewner;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("loewner_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir.parent_path());
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  fs::create_directories(dir);
  const auto path = dir / "config.json";
  std::ofstream(path) << text;
  return path;
}

struct Run {
  int status;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "loewner_lab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("trace of the zero driver") {
    const auto dir = scratch("trace");
    const auto cfg = write_config(dir / "in", R"({"driver": {"type": "zero", "steps": 10000}})");
    const auto r = invoke({"trace", "--config", cfg.string(), "--out", (dir / "out").string()});
    REQUIRE(r.status == cli::kExitOk);
    const auto curve = read_curve_csv(dir / "out" / "curve.csv");
    CHECK(std::abs(curve.points().back() - Complex(0.0, 2.0)) <= 1e-3);
    const auto manifest = json::parse(slurp(dir / "out" / "manifest.json"));
    CHECK(manifest["kind"] == "trace");
    CHECK(manifest["seed"] == 1);
    std::set<std::string> listed;
    for (const auto& f : manifest["files"]) listed.insert(f["path"].get<std::string>());
    for (const auto& entry : fs::directory_iterator(dir / "out")) {
      const auto name = entry.path().filename().string();
      if (name != "manifest.json") CHECK(listed.contains(name));
    }
    CHECK(listed.size() == 3);
  }

  TEST_CASE("validation errors exit 1 without output") {
    const auto dir = scratch("invalid");
    const auto bad = write_config(dir / "in", "{\"driver\": ");
    auto r = invoke({"trace", "--config", bad.string(), "--out", (dir / "out").string()});
    CHECK(r.status == cli::kExitValidation);
    CHECK(json::parse(r.err)["error"] == "validation");
    CHECK_FALSE(fs::exists(dir / "out"));

    const auto unknown = write_config(dir / "in2", R"({"driver": {"type": "zero", "stepz": 10}})");
    r = invoke({"trace", "--config", unknown.string(), "--out", (dir / "out").string()});
    CHECK(r.status == cli::kExitValidation);
    CHECK(json::parse(r.err)["message"].get<std::string>().find("stepz") != std::string::npos);

    const auto mismatch = write_config(dir / "in3", R"({"kind": "zip", "driver": {"type": "zero"}})");
    CHECK(invoke({"trace", "--config", mismatch.string(), "--out", (dir / "out").string()}).status ==
          cli::kExitValidation);

    const auto zeta = write_config(dir / "in4", R"({"nodes": [8], "zeta": 0.1, "steps": 64})");
    CHECK(invoke({"approx-converge", "--config", zeta.string(), "--out", (dir / "out").string()}).status ==
          cli::kExitValidation);

    CHECK(invoke({"trace"}).status == cli::kExitValidation);
    CHECK(invoke({"bogus", "--config", "x"}).status == cli::kExitValidation);
    CHECK_FALSE(fs::exists(dir / "out"));
  }

  TEST_CASE("asserted feasibility failure exits 2") {
    const auto dir = scratch("infeasible");
    const auto cfg = write_config(dir / "in", R"({
      "constraint": {"type": "avoid_disk", "center": [0, 1.4142135623730951], "radius": 3},
      "segments": 4, "trace_steps": 32, "perturbed_starts": 0, "assert_feasible": true})");
    const auto r = invoke({"optimize", "--config", cfg.string(), "--out", (dir / "out").string()});
    CHECK(r.status == cli::kExitRuntime);
    CHECK(json::parse(r.err)["error"] == "runtime");
    CHECK_FALSE(fs::exists(dir / "out"));
  }

  TEST_CASE("ldp-slope writes one row per kappa") {
    const auto dir = scratch("ldp");
    const auto cfg = write_config(dir / "in", R"({
      "event": {"type": "driver_sup", "level": 1.0},
      "kappas": [0.4, 0.2, 0.1], "replicas": 2000, "steps": 64, "seed": 5})");
    REQUIRE(invoke({"ldp-slope", "--config", cfg.string(), "--out", (dir / "out").string()}).status == 0);
    std::istringstream csv(slurp(dir / "out" / "ldp_slope.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "event,kappa,N,hits,p_hat,se,kappa_log_p,seed,indeterminate");
    int rows = 0;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 3);
  }

  TEST_CASE("payloads are byte-identical across thread counts and reruns") {
    const auto dir = scratch("determinism");
    const std::vector<std::pair<std::string, std::string>> runs = {
        {"mc", R"({"experiment": "event", "event": {"type": "oscillation", "delta": 0.1, "threshold": 0.8},
                   "kappa": 1.0, "replicas": 300, "steps": 64})"},
        {"ldp-slope", R"({"event": {"type": "tube", "target": {"type": "linear", "slope": 1, "steps": 64},
                          "radius": 0.3}, "kappas": [0.4, 0.2], "replicas": 200, "steps": 64})"},
        {"verify-bounds", R"({"instances": 10, "steps": 32})"},
        {"approx-converge", R"({"nodes": [8, 16], "replicas": 20, "steps": 64})"},
        {"optimize", R"({"constraint": {"type": "endpoint", "point": [0.3, 1.8]}, "segments": 4,
                        "trace_steps": 16, "max_inner": 20})"},
    };
    for (const auto& [kind, text] : runs) {
      const auto cfg = write_config(dir / kind / "in", text);
      std::vector<fs::path> outs;
      for (const char* threads : {"1", "8", "8"}) {
        const auto out = dir / kind / ("out" + std::to_string(outs.size()));
        const auto r = invoke({kind, "--config", cfg.string(), "--out", out.string(), "--threads", threads,
                               "--seed", "77"});
        REQUIRE_MESSAGE(r.status == 0, r.err);
        outs.push_back(out);
      }
      const auto m0 = json::parse(slurp(outs[0] / "manifest.json"));
      CHECK(m0["seed"] == 77);
      for (const auto& f : m0["files"]) {
        const auto name = f["path"].get<std::string>();
        CHECK_MESSAGE(slurp(outs[0] / name) == slurp(outs[1] / name), kind << "/" << name);
        CHECK(slurp(outs[1] / name) == slurp(outs[2] / name));
      }
      CHECK(json::parse(slurp(outs[1] / "manifest.json"))["config_hash"] == m0["config_hash"]);
    }
  }

  TEST_CASE("output directory defaults to LOEWNER_LAB_OUT") {
    const auto dir = scratch("env");
    const auto cfg = write_config(dir / "in", R"({"driver": {"type": "values", "values": [0, 0.3, -0.1]}})");
    ::setenv("LOEWNER_LAB_OUT", (dir / "env_out").string().c_str(), 1);
    const auto r = invoke({"energy", "--config", cfg.string()});
    ::unsetenv("LOEWNER_LAB_OUT");
    REQUIRE(r.status == 0);
    const auto report = json::parse(slurp(dir / "env_out" / "energy.json"));
    CHECK(report["energy"].get<double>() == doctest::Approx(0.25).epsilon(1e-14));
  }

  TEST_CASE("zip recovers a traced driver") {
    const auto dir = scratch("zip");
    const auto cfg =
        write_config(dir / "in", R"({"driver": {"type": "linear", "slope": 0.5, "steps": 1000}})");
    REQUIRE(invoke({"zip", "--config", cfg.string(), "--out", (dir / "out").string()}).status == 0);
    const auto summary = json::parse(slurp(dir / "out" / "zip.json"));
    CHECK(summary["sup_error"].get<double>() <= 5e-2);
    CHECK(fs::exists(dir / "out" / "recovered_driver.csv"));
  }
}
