// Acceptance suite: one PASS/FAIL line per criterion. Exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "loewner/csv_io.hpp"
#include "loewner/curve.hpp"
#include "loewner/driver.hpp"
#include "loewner/map_chain.hpp"
#include "loewner/rate_optimizer.hpp"
#include "loewner/rng.hpp"
#include "loewner/zipper.hpp"
#include "loewner_cli/app.hpp"

using namespace loewner;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path g_root;
int g_failures = 0;

void verdict(bool pass, const std::string& name, const std::string& detail) {
  std::cout << (pass ? "PASS" : "FAIL") << "  " << name << ": " << detail << std::endl;
  if (!pass) ++g_failures;
}

void info(const std::string& text) { std::cout << "      " << text << std::endl; }

std::string fmt(double x, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Runs the CLI in-process; returns the output directory.
fs::path run_cli(const std::string& name, const std::string& kind, const std::string& config, unsigned threads) {
  const auto dir = g_root / name;
  fs::create_directories(dir);
  const auto cfg = dir / "config.json";
  std::ofstream(cfg) << config;
  const auto out = dir / ("threads" + std::to_string(threads));
  fs::remove_all(out);
  const std::string t = std::to_string(threads);
  const char* argv[] = {"loewner_lab", kind.c_str(), "--config", cfg.c_str(), "--out", out.c_str(), "--threads", t.c_str()};
  std::ostringstream o, e;
  const int status = cli::run(8, argv, o, e);
  if (status != 0) throw std::runtime_error(name + " failed (" + std::to_string(status) + "): " + e.str());
  return out;
}

std::vector<std::map<std::string, std::string>> read_table(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header;
  {
    std::istringstream h(line);
    std::string cell;
    while (std::getline(h, cell, ',')) header.push_back(cell);
  }
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(in, line)) {
    std::istringstream r(line);
    std::string cell;
    std::map<std::string, std::string> row;
    for (const auto& key : header) {
      std::getline(r, cell, ',');
      row[key] = cell;
    }
    rows.push_back(row);
  }
  return rows;
}

double num(const std::map<std::string, std::string>& row, const std::string& key) {
  return parse_double(row.at(key));
}

Driver random_pwl(GaussianStream& g, std::size_t steps, double max_energy) {
  const std::size_t nodes = 2 + static_cast<std::size_t>(g.uniform() * 7.0);
  std::vector<double> v(nodes + 1, 0.0);
  for (std::size_t k = 1; k <= nodes; ++k) v[k] = v[k - 1] + g.normal() / std::sqrt(double(nodes));
  auto coarse = make_driver(v, 1.0);
  const double e = dirichlet_energy(coarse).value();
  const double target = max_energy * (0.1 + 0.9 * g.uniform());
  if (e > 0.0) coarse = scaled(coarse, std::sqrt(target / e));
  std::vector<double> fine(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) fine[k] = coarse.at(double(k) / double(steps));
  return make_driver(fine, 1.0);
}

// ---------------------------------------------------------------------------

void forward_oracle() {
  const auto start = std::chrono::steady_clock::now();
  const auto curve = trace(make_driver(std::vector<double>(10001, 0.0), 1.0));
  const double elapsed = seconds_since(start);
  double err = 0.0;
  for (std::size_t k = 0; k < curve.size(); ++k)
    err = std::max(err, std::abs(curve[k] - Complex(0.0, 2.0 * std::sqrt(curve.times()[k]))));
  verdict(err <= 1e-3 && elapsed <= 5.0, "forward solver oracle",
          "sup error " + fmt(err) + " (<= 1e-3), " + fmt(elapsed, 3) + " s (<= 5 s)");
}

void zipper_roundtrip() {
  double worst = 0.0, worst_gain = 1e300;
  for (int i = 0; i < 20; ++i) {
    const std::uint64_t state = mix_seed(2024, 100 + i);
    GaussianStream a(state), b(state);
    const auto coarse = random_pwl(a, 1000, 2.0);
    const auto fine = random_pwl(b, 4000, 2.0);
    const double e1 = sup_distance_on_grid(coarse, *zip_curve(trace(coarse)).driver);
    const double e4 = sup_distance_on_grid(fine, *zip_curve(trace(fine)).driver);
    worst = std::max(worst, e1);
    worst_gain = std::min(worst_gain, e1 / e4);
  }
  verdict(worst <= 5e-2 && worst_gain >= 1.5, "zipper roundtrip",
          "worst sup error at n=1000 " + fmt(worst) + " (<= 0.05), smallest gain at n=4000 " + fmt(worst_gain) +
              "x (>= 1.5x)");
}

void energy_exactness() {
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    GaussianStream g(mix_seed(7, s));
    const std::size_t n = 1 + static_cast<std::size_t>(g.uniform() * 500.0);
    const double T = 0.1 + 3.0 * g.uniform();
    std::vector<double> v(n + 1, 0.0);
    for (std::size_t k = 1; k <= n; ++k) v[k] = v[k - 1] + g.normal();
    long double hand = 0.0L;
    const long double dt = static_cast<long double>(T) / static_cast<long double>(n);
    for (std::size_t k = 1; k <= n; ++k) {
      const long double d = static_cast<long double>(v[k]) - static_cast<long double>(v[k - 1]);
      hand += d * d / dt;
    }
    hand *= 0.5L;
    const double got = dirichlet_energy(make_driver(v, T)).value();
    worst = std::max(worst, static_cast<double>(std::abs((got - hand) / hand)));
  }
  verdict(worst <= 1e-12, "energy exactness", "worst relative error " + fmt(worst) + " over 200 drivers (<= 1e-12)");
}

void bound_suite() {
  const auto start = std::chrono::steady_clock::now();
  const auto out = run_cli("bounds", "verify-bounds", R"({"instances": 1000, "seed": 11})", 8);
  const double elapsed = seconds_since(start);
  const auto doc = json::parse(slurp(out / "bounds.json"));
  bool all = true;
  for (const auto& r : doc["reports"]) {
    const bool pass = r["pass"].get<bool>() && r["failed_instances"].get<int>() == 0;
    all = all && pass;
    std::string line = r["bound_id"].get<std::string>() + ": " + std::to_string(r["instances"].get<int>()) +
                       " instances, worst ratio " + fmt(r["worst_ratio"].get<double>()) + ", tolerance " +
                       fmt(r["tolerance"].get<double>()) + ", violations " +
                       std::to_string(r["failed_instances"].get<int>());
    if (r["bound_id"] == "dyadic_implication")
      line += ", corner hypothesis held in " + std::to_string(r["hypothesis_held"].get<int>());
    info(line);
  }
  verdict(all && elapsed <= 300.0, "deterministic bound suite",
          std::to_string(doc["reports"].size()) + " checks, " + fmt(elapsed, 3) + " s (<= 300 s)");
}

struct McRun {
  std::string name, kind, config;
  std::vector<std::string> csv;
};
std::vector<McRun> g_mc_runs;

fs::path mc_run(const std::string& name, const std::string& kind, const std::string& config,
                std::vector<std::string> csv) {
  const auto start = std::chrono::steady_clock::now();
  const auto out = run_cli(name, kind, config, 8);
  info(name + " ran in " + fmt(seconds_since(start), 3) + " s");
  g_mc_runs.push_back({name, kind, config, std::move(csv)});
  return out;
}

void moment_estimate() {
  const auto out = mc_run("moments", "mc",
                          R"({"experiment": "moment", "kappas": [1, 2, 4], "ys": [0.1, 0.5], "t": 1,
                              "replicas": 10000, "steps": 2048, "seed": 21})",
                          {"moments.csv"});
  bool all = true;
  for (const auto& row : read_table(out / "moments.csv")) {
    const bool ok = num(row, "mean") <= 1.0 + 3.0 * num(row, "se");
    all = all && ok;
    info("kappa " + row.at("kappa") + ", y " + row.at("y") + ": mean " + fmt(num(row, "mean")) + " +- " +
         fmt(num(row, "se")));
  }
  verdict(all, "moment estimate", "sample mean of |f'|^(2/kappa) <= 1 + 3 SE on all 6 (kappa, y) cells");
}

void chi_square() {
  const auto out = mc_run("chi_square", "mc",
                          R"({"experiment": "chi-square", "kappas": [1, 4], "nodes": 20, "replicas": 100000,
                              "seed": 31})",
                          {"chi_square.csv"});
  const auto doc = json::parse(slurp(out / "chi_square.json"));
  const auto rows = read_table(out / "chi_square.csv");
  std::string means;
  for (const auto& r : rows) means += "kappa " + r.at("kappa") + " mean " + fmt(num(r, "mean"), 6) + "; ";
  const double p = doc["ks"]["p_value"].get<double>();
  verdict(doc["means_within_band"].get<bool>() && p > 0.01, "chi-square law",
          means + "band 20 +- " + fmt(3.0 * std::sqrt(40.0 / 1e5)) + "; KS p-value " + fmt(p) + " (> 0.01)");
}

void oscillation_tail() {
  const auto out = mc_run("oscillation_tail", "mc",
                          R"({"experiment": "oscillation-tail", "kappa": 1, "delta": 0.1, "c0": 8, "r": 16,
                              "replicas": 100000, "steps": 2048, "seed": 41})",
                          {"mc.csv"});
  const auto doc = json::parse(slurp(out / "oscillation_tail.json"));
  verdict(doc["pass"].get<bool>(), "oscillation tail",
          "c0 = " + fmt(doc["c0"].get<double>()) + ", p_hat " + fmt(doc["p_hat"].get<double>()) + " (SE " +
              fmt(doc["se"].get<double>()) + ") vs bound " + fmt(doc["bound"].get<double>()));
}

void complement_bound() {
  const auto out = mc_run("complement", "mc",
                          R"({"experiment": "complement", "beta": 0.8, "kappa": 0.4, "n": 2, "m_max": 4,
                              "replicas": 10000, "steps": 256, "seed": 51})",
                          {"mc.csv"});
  const auto doc = json::parse(slurp(out / "complement.json"));
  const double bound = doc["bound"].get<double>();
  const auto& v = doc["violation"];
  const auto& c = doc["corner_failure"];
  const double vp = v["p_hat"].get<double>() - 3.0 * v["se"].get<double>();
  const double cp = c["p_hat"].get<double>() - 3.0 * c["se"].get<double>();
  verdict(std::abs(bound - 1.0 / 12.0) <= 1e-12 && vp <= bound && cp <= bound, "complement bound",
          "bound " + fmt(bound, 10) + " (= 1/12); E_n complement frequency " + fmt(v["p_hat"].get<double>()) +
              ", corner failure frequency " + fmt(c["p_hat"].get<double>()) + " (minus 3 SE <= bound)");
}

void schilder() {
  const auto out = mc_run("schilder", "ldp-slope",
                          R"({"event": {"type": "driver_sup", "level": 1}, "kappas": [0.4, 0.2, 0.1],
                              "replicas": 1000000, "steps": 256, "seed": 61})",
                          {"ldp_slope.csv"});
  const auto rows = read_table(out / "ldp_slope.csv");
  for (const auto& r : rows) info("kappa " + r.at("kappa") + ": kappa log p " + fmt(num(r, "kappa_log_p")));
  const double last = num(rows.back(), "kappa_log_p");
  verdict(std::abs(last + 0.5) <= 0.15, "Schilder desk check", "kappa log p at kappa 0.1 = " + fmt(last) + " (-0.5 +- 0.15)");
}

void ldp_tube() {
  const auto out = mc_run("ldp_tube", "ldp-slope",
                          R"({"event": {"type": "tube", "radius": 0.3,
                                        "target": {"type": "linear", "slope": 1, "steps": 256}},
                              "kappas": [0.4, 0.2, 0.1], "replicas": 10000, "steps": 256, "seed": 71})",
                          {"ldp_slope.csv"});
  const auto rows = read_table(out / "ldp_slope.csv");
  bool above = true, consistent = true;
  std::vector<double> v, se;
  for (const auto& r : rows) {
    const double p = num(r, "p_hat");
    v.push_back(num(r, "kappa_log_p"));
    se.push_back(p > 0.0 ? num(r, "kappa") * num(r, "se") / p : INFINITY);
    above = above && v.back() >= -0.7;
    info("kappa " + r.at("kappa") + ": hits " + r.at("hits") + ", kappa log p " + fmt(v.back()) + " +- " +
         fmt(se.back()));
  }
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] - v[i - 1] > 2.0 * std::sqrt(se[i] * se[i] + se[i - 1] * se[i - 1])) consistent = false;

  const auto start = std::chrono::steady_clock::now();
  std::vector<double> lin(129);
  for (std::size_t k = 0; k <= 128; ++k) lin[k] = double(k) / 128.0;
  opt::Options o;
  const auto r = opt::minimize_energy(opt::TubeMembership{trace(make_driver(lin, 1.0)), 0.3}, 32, o);
  info("I(tube, radius 0.3) = " + fmt(r.energy) + " (feasible " + (r.feasible ? "yes" : "no") + ", " +
       fmt(seconds_since(start), 3) + " s)");
  const bool lower = r.feasible && r.energy <= -v.back() + 0.2;
  verdict(above && consistent && lower, "LDP tube check",
          std::string("all kappa log p >= -0.7: ") + (above ? "yes" : "no") + "; no increase beyond 2 SE: " +
              (consistent ? "yes" : "no") + "; I(tube) " + fmt(r.energy) + " <= -kappa log p + 0.2 = " +
              fmt(-v.back() + 0.2));
}

void rate_optimizer() {
  const auto start = std::chrono::steady_clock::now();
  opt::Options o;
  const auto endpoint = opt::minimize_energy(opt::Endpoint{Complex(0.0, 2.0), 0.05}, 32, o);
  std::vector<double> lin(129);
  for (std::size_t k = 0; k <= 128; ++k) lin[k] = double(k) / 128.0;
  const std::vector<double> radii = {0.4, 0.2, 0.1, 0.05};
  const auto rows = opt::neighborhood_limit(trace(make_driver(lin, 1.0)), radii, 32, o);
  const double elapsed = seconds_since(start);
  bool monotone = true;
  std::string table;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    table += fmt(rows[i].radius) + ": " + fmt(rows[i].result.energy) + (rows[i].result.feasible ? "" : " (infeasible)") + "; ";
    for (std::size_t j = i + 1; j < rows.size(); ++j)
      if (rows[j].result.energy < rows[i].result.energy - 0.05) monotone = false;
  }
  const double final_energy = rows.back().result.energy;
  const bool feasible = std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.result.feasible; });
  verdict(endpoint.energy <= 1e-3 && monotone && feasible && final_energy >= 0.4 && final_energy <= 0.52 &&
              elapsed <= 600.0,
          "rate optimizer",
          "endpoint energy " + fmt(endpoint.energy) + " (<= 1e-3); neighborhood " + table + "final in [0.4, 0.52]; " +
              fmt(elapsed, 3) + " s (<= 600 s)");
}

void pwl_convergence() {
  const auto out = mc_run("convergence", "approx-converge",
                          R"({"kappa": 1, "nodes": [8, 16, 32, 64], "beta": 0.5, "zeta": 0.05,
                              "replicas": 200, "steps": 1024, "seed": 81})",
                          {"convergence.csv"});
  const auto rows = read_table(out / "convergence.csv");
  bool decreasing = true, within = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && !(num(rows[i], "median_sup_error") < num(rows[i - 1], "median_sup_error"))) decreasing = false;
    if (num(rows[i], "violation_freq") > num(rows[i], "bound") + 3.0 * num(rows[i], "se")) within = false;
    info("n " + rows[i].at("nodes") + ": median sup error " + fmt(num(rows[i], "median_sup_error")) +
         ", violation frequency " + fmt(num(rows[i], "violation_freq")) + ", bound " + rows[i].at("bound") +
         (rows[i].at("in_regime") == "1" ? "" : " (kappa >= beta: outside the proposition's regime, bound vacuous)"));
  }
  verdict(decreasing && within, "PWL convergence",
          std::string("median strictly decreasing: ") + (decreasing ? "yes" : "no") +
              "; violation frequency <= bound + 3 SE: " + (within ? "yes" : "no"));

  const auto regime = mc_run("convergence_in_regime", "approx-converge",
                             R"({"kappa": 0.25, "nodes": [8, 16, 32, 64], "beta": 0.5, "zeta": 0.05,
                                 "replicas": 200, "steps": 1024, "seed": 82})",
                             {"convergence.csv"});
  for (const auto& r : read_table(regime / "convergence.csv"))
    info("kappa 0.25, n " + r.at("nodes") + ": violation frequency " + fmt(num(r, "violation_freq")) + ", bound " +
         fmt(num(r, "bound")));
}

void determinism() {
  bool all = true;
  std::string detail;
  for (const auto& run : g_mc_runs) {
    const auto single = run_cli(run.name, run.kind, run.config, 1);
    const auto multi = g_root / run.name / "threads8";
    for (const auto& f : run.csv) {
      const bool same = slurp(single / f) == slurp(multi / f) && !slurp(single / f).empty();
      all = all && same;
      if (!same) detail += run.name + "/" + f + " differs; ";
    }
  }
  verdict(all, "determinism",
          std::to_string(g_mc_runs.size()) + " runs, CSV payloads byte-identical for --threads 1 and --threads 8" +
              (detail.empty() ? "" : " except " + detail));
}

}  // namespace

int main(int argc, char** argv) {
  g_root = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  fs::create_directories(g_root);
  const std::vector<std::pair<const char*, std::function<void()>>> criteria = {
      {"forward solver oracle", forward_oracle},
      {"zipper roundtrip", zipper_roundtrip},
      {"energy exactness", energy_exactness},
      {"deterministic bound suite", bound_suite},
      {"moment estimate", moment_estimate},
      {"chi-square law", chi_square},
      {"oscillation tail", oscillation_tail},
      {"complement bound", complement_bound},
      {"Schilder desk check", schilder},
      {"LDP tube check", ldp_tube},
      {"rate optimizer", rate_optimizer},
      {"PWL convergence", pwl_convergence},
      {"determinism", determinism},
  };
  for (const auto& [name, fn] : criteria) {
    try {
      fn();
    } catch (const std::exception& e) {
      verdict(false, name, std::string("threw: ") + e.what());
    }
  }
  std::cout << (g_failures == 0 ? "all criteria passed" : std::to_string(g_failures) + " criteria failed") << std::endl;
  return g_failures == 0 ? 0 : 1;
}
