#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "loewner/csv_io.hpp"
#include "loewner/curve.hpp"
#include "loewner/montecarlo.hpp"
#include "loewner/rate_optimizer.hpp"
#include "loewner/serialize.hpp"
#include "loewner/stats.hpp"
#include "loewner/zipper.hpp"
#include "loewner_cli/config.hpp"
#include "loewner_cli/suite.hpp"

namespace loewner::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

template <class F>
std::string render(F&& write) {
  std::ostringstream s;
  write(s);
  return s.str();
}

std::string driver_text(const Driver& d) {
  return render([&](std::ostream& o) { write_driver_csv(o, d); });
}
std::string curve_text(const Curve& c) {
  return render([&](std::ostream& o) { write_curve_csv(o, c); });
}
std::string mc_text(const std::vector<mc::McResult>& rows) {
  return render([&](std::ostream& o) { write_mc_csv(o, rows); });
}

json point_json(Complex z) { return {{"re", json_number(z.real())}, {"im", json_number(z.imag())}}; }

json mc_json(const mc::McResult& r) {
  return {{"event", r.event},   {"kappa", r.kappa},     {"N", r.replicas},
          {"hits", r.hits},     {"p_hat", r.p_hat},     {"se", r.se},
          {"kappa_log_p", json_number(r.kappa_log_p)}, {"indeterminate", r.indeterminate}};
}

mc::RunOptions run_options(Fields& f, std::uint64_t seed, std::size_t default_replicas, std::size_t default_steps) {
  mc::RunOptions o;
  o.replicas = f.count("replicas", default_replicas);
  o.steps = f.count("steps", default_steps);
  o.seed = seed;
  if (o.replicas == 0) throw ConfigError(f.path() + ".replicas: must be positive");
  if (o.steps == 0) throw ConfigError(f.path() + ".steps: must be positive");
  return o;
}

void require_decreasing(const std::vector<double>& xs, const std::string& where) {
  if (xs.empty()) throw ConfigError(where + ": must not be empty");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] < xs[i - 1])) throw ConfigError(where + ": must be strictly decreasing");
}

mc::Event parse_event(Fields f, std::uint64_t seed, const fs::path& base, std::size_t steps) {
  const auto type = f.text("type");
  mc::Event event = mc::DriverSupEvent{};
  if (type == "tube") {
    const auto target = parse_driver(f.object("target"), seed, base);
    if (target.steps() != steps || target.horizon() != 1.0)
      throw ConfigError(f.path() + ".target: must live on [0, 1] with the run's " + std::to_string(steps) + " steps");
    event = mc::TubeEvent{trace(target), f.number("radius"), f.flag("complement", false)};
  } else if (type == "driver_sup") {
    event = mc::DriverSupEvent{f.number("level")};
  } else if (type == "derivative") {
    mc::DerivativeEvent e;
    e.beta = f.number("beta", e.beta);
    e.n = static_cast<int>(f.count("n", 2));
    const auto scale = f.text("scale", "dyadic");
    if (scale != "dyadic" && scale != "sqrt") throw ConfigError(f.path() + ".scale: expected dyadic or sqrt");
    e.scale = scale == "dyadic" ? mc::DerivativeScale::dyadic : mc::DerivativeScale::sqrt;
    const auto form = f.text("form", "q");
    if (form != "q" && form != "psi") throw ConfigError(f.path() + ".form: expected q or psi");
    e.form = form == "q" ? bounds::BoundForm::random_q : bounds::BoundForm::deterministic_psi;
    e.m_max = static_cast<int>(f.count("m_max", static_cast<std::uint64_t>(e.n + 2)));
    event = e;
  } else if (type == "oscillation") {
    event = mc::OscillationEvent{f.number("delta"), f.number("threshold")};
  } else {
    throw ConfigError(f.path() + ".type: unknown event type '" + type + "'");
  }
  f.finish();
  mc::validate(event);
  return event;
}

// ---- trace / zip / energy ---------------------------------------------------

Experiment::RunFn parse_trace(Fields& f, std::uint64_t seed, const fs::path& base) {
  auto driver = parse_driver(f.object("driver"), seed, base);
  return [driver](unsigned) {
    const auto curve = trace(driver);
    Outcome out;
    out.files = {{"driver.csv", driver_text(driver)}, {"curve.csv", curve_text(curve)}};
    const json summary = {{"steps", driver.steps()},
                          {"horizon", driver.horizon()},
                          {"energy", json_number(dirichlet_energy(driver).value())},
                          {"tip", point_json(curve.points().back())}};
    out.files.push_back({"trace.json", dump(summary)});
    out.summary = summary;
    return out;
  };
}

Experiment::RunFn parse_zip(Fields& f, std::uint64_t seed, const fs::path& base) {
  std::optional<Curve> curve;
  std::optional<Driver> source;
  if (f.has("curve") == f.has("driver")) throw ConfigError(f.path() + ": give exactly one of curve or driver");
  if (f.has("curve")) {
    auto path = fs::path(f.text("curve"));
    if (path.is_relative()) path = base / path;
    curve = read_curve_csv(path);
  } else {
    source = parse_driver(f.object("driver"), seed, base);
  }
  return [curve, source](unsigned) {
    const Curve input = curve ? *curve : trace(*source);
    const auto zipped = zip_curve(input);
    Outcome out;
    std::ostringstream slits;
    slits << "k,level,increment,cumulative\n";
    for (std::size_t k = 0; k < zipped.levels.size(); ++k)
      slits << k + 1 << ',' << format_double(zipped.levels[k]) << ',' << format_double(zipped.increments[k]) << ','
            << format_double(zipped.cumulative[k + 1]) << '\n';
    json summary = {{"points", input.size()},
                    {"horizon", json_number(zipped.horizon())},
                    {"residual", json_number(zipped.residual)}};
    if (zipped.driver) {
      out.files.push_back({"recovered_driver.csv", driver_text(*zipped.driver)});
      if (source) summary["sup_error"] = json_number(sup_distance_on_grid(*source, *zipped.driver));
    }
    out.files.push_back({"slits.csv", slits.str()});
    out.files.push_back({"zip.json", dump(summary)});
    out.summary = summary;
    return out;
  };
}

Experiment::RunFn parse_energy(Fields& f, std::uint64_t seed, const fs::path& base) {
  auto driver = parse_driver(f.object("driver"), seed, base);
  const auto nodes = f.count("nodes", 0);
  const double eps = f.number("mollify_eps", 0.0);
  if (nodes != 0 && driver.steps() % nodes != 0)
    throw ConfigError(f.path() + ".nodes: must divide the driver's " + std::to_string(driver.steps()) + " steps");
  if (eps < 0.0) throw ConfigError(f.path() + ".mollify_eps: must be positive");
  return [driver, nodes, eps](unsigned) {
    Outcome out;
    json summary = {{"steps", driver.steps()},
                    {"horizon", driver.horizon()},
                    {"energy", json_number(dirichlet_energy(driver).value())},
                    {"sup_norm", json_number(driver.sup_norm())}};
    if (nodes != 0) {
      const auto pwl = pwl_approximation(driver, nodes);
      summary["pwl"] = {{"nodes", nodes},
                        {"energy", json_number(dirichlet_energy(pwl).value())},
                        {"sup_distance", json_number(sup_distance(pwl, driver))}};
    }
    if (eps > 0.0) {
      const auto m = mollify_with_report(driver, eps);
      summary["mollify"] = {{"eps", eps},
                            {"bandwidth", json_number(m.bandwidth)},
                            {"energy_gap", json_number(m.energy_gap)},
                            {"sup_gap", json_number(m.sup_gap)}};
      out.files.push_back({"mollified_driver.csv", driver_text(m.smoothed)});
    }
    out.files.push_back({"energy.json", dump(summary)});
    out.summary = summary;
    return out;
  };
}

// ---- bounds -----------------------------------------------------------------

Experiment::RunFn parse_verify_bounds(Fields& f, std::uint64_t seed, const fs::path&) {
  SuiteOptions o;
  o.instances = f.count("instances", o.instances);
  o.steps = f.count("steps", o.steps);
  o.beta = f.number("beta", o.beta);
  o.dyadic_n = static_cast<int>(f.count("dyadic_n", 2));
  o.dyadic_m_max = static_cast<int>(f.count("dyadic_m_max", 4));
  o.bounds = f.texts("bounds", {});
  o.seed = seed;
  if (o.instances == 0) throw ConfigError(f.path() + ".instances: must be positive");
  if (!(o.beta > 0.0 && o.beta < 1.0)) throw ConfigError(f.path() + ".beta: must lie in (0, 1)");
  for (const auto& b : o.bounds)
    if (std::find(bound_ids().begin(), bound_ids().end(), b) == bound_ids().end())
      throw ConfigError(f.path() + ".bounds: unknown bound '" + b + "'");
  return [o](unsigned threads) mutable {
    o.threads = threads;
    const auto entries = run_bound_suite(o);
    json reports = json::array();
    bool all_pass = true;
    for (const auto& e : entries) {
      auto j = to_json(e.merged);
      j["instances"] = e.instances;
      j["failed_instances"] = e.failed;
      j["hypothesis_held"] = e.hypothesis_held;
      reports.push_back(j);
      all_pass = all_pass && e.merged.pass;
    }
    const json doc = {{"instances", o.instances}, {"reports", reports}, {"all_pass", all_pass}};
    Outcome out;
    out.files.push_back({"bounds.json", dump(doc)});
    out.summary = {{"all_pass", all_pass}, {"bounds", entries.size()}};
    return out;
  };
}

// ---- Monte Carlo --------------------------------------------------------------

Experiment::RunFn parse_mc(Fields& f, std::uint64_t seed, const fs::path& base) {
  const auto experiment = f.text("experiment", "event");
  if (experiment == "event") {
    auto options = run_options(f, seed, 1000, 2048);
    auto event = parse_event(f.object("event"), seed, base, options.steps);
    const double kappa = f.number("kappa");
    return [options, event, kappa](unsigned threads) mutable {
      options.threads = threads;
      const auto r = mc::estimate_event(event, kappa, options);
      Outcome out;
      out.files.push_back({"mc.csv", mc_text({r})});
      out.summary = mc_json(r);
      return out;
    };
  }
  if (experiment == "moment") {
    auto options = run_options(f, seed, 10000, 2048);
    const auto kappas = f.numbers("kappas");
    const auto ys = f.numbers("ys");
    const double t = f.number("t", 1.0);
    if (kappas.empty() || ys.empty()) throw ConfigError(f.path() + ": kappas and ys must not be empty");
    return [options, kappas, ys, t](unsigned threads) mutable {
      options.threads = threads;
      std::ostringstream csv;
      csv << "kappa,y,t,N,mean,se,within_bound\n";
      bool all = true;
      for (double kappa : kappas)
        for (double y : ys) {
          const auto m = mc::derivative_moment(kappa, y, t, options);
          const bool ok = m.mean <= 1.0 + 3.0 * m.se;
          all = all && ok;
          csv << format_double(kappa) << ',' << format_double(y) << ',' << format_double(t) << ',' << m.replicas
              << ',' << format_double(m.mean) << ',' << format_double(m.se) << ',' << (ok ? 1 : 0) << '\n';
        }
      Outcome out;
      out.files.push_back({"moments.csv", csv.str()});
      out.summary = {{"all_within_bound", all}};
      return out;
    };
  }
  if (experiment == "chi-square") {
    const auto kappas = f.numbers("kappas");
    const auto nodes = f.count("nodes", 20);
    const auto replicas = f.count("replicas", 100000);
    const auto fine = f.count("fine_factor", 4);
    if (kappas.empty()) throw ConfigError(f.path() + ".kappas: must not be empty");
    if (nodes == 0 || replicas < 2 || fine == 0) throw ConfigError(f.path() + ": nodes, replicas, fine_factor invalid");
    return [=](unsigned threads) {
      std::ostringstream csv;
      csv << "kappa,nodes,N,mean,variance,mean_low,mean_high,seed\n";
      std::vector<std::vector<double>> samples;
      json summary = {{"nodes", nodes}};
      bool means_ok = true;
      for (std::size_t j = 0; j < kappas.size(); ++j) {
        const auto s = mc::chi_square_energy(kappas[j], nodes, replicas, seed + j, threads, fine);
        const double half = 3.0 * std::sqrt(2.0 * double(nodes) / double(replicas));
        const bool ok = std::abs(s.mean - double(nodes)) <= half;
        means_ok = means_ok && ok;
        csv << format_double(kappas[j]) << ',' << nodes << ',' << replicas << ',' << format_double(s.mean) << ','
            << format_double(s.variance) << ',' << format_double(double(nodes) - half) << ','
            << format_double(double(nodes) + half) << ',' << seed + j << '\n';
        samples.push_back(s.samples);
      }
      summary["means_within_band"] = means_ok;
      if (samples.size() >= 2) {
        const auto ks = stats::ks_two_sample(samples[0], samples[1]);
        summary["ks"] = {{"statistic", ks.statistic}, {"p_value", ks.p_value}};
      }
      Outcome out;
      out.files.push_back({"chi_square.csv", csv.str()});
      out.files.push_back({"chi_square.json", dump(summary)});
      out.summary = summary;
      return out;
    };
  }
  if (experiment == "oscillation-tail") {
    auto options = run_options(f, seed, 100000, 2048);
    const double kappa = f.number("kappa");
    const double delta = f.number("delta");
    const double c0 = f.number("c0", 8.0);
    const double r = f.number("r", 2.0 * c0);
    if (!(r > c0)) throw ConfigError(f.path() + ".r: must exceed c0");
    return [=](unsigned threads) mutable {
      options.threads = threads;
      const auto tail = mc::oscillation_tail(kappa, delta, r, options, c0);
      const json summary = {{"kappa", kappa},        {"delta", delta},         {"r", r},
                            {"c0", tail.c0},         {"level", tail.level},    {"bound", json_number(tail.bound)},
                            {"p_hat", tail.result.p_hat}, {"se", tail.result.se}, {"pass", tail.pass}};
      Outcome out;
      out.files.push_back({"mc.csv", mc_text({tail.result})});
      out.files.push_back({"oscillation_tail.json", dump(summary)});
      out.summary = summary;
      return out;
    };
  }
  if (experiment == "complement") {
    auto options = run_options(f, seed, 10000, 256);
    const double beta = f.number("beta", 0.8);
    const double kappa = f.number("kappa", 0.4);
    const auto n = static_cast<int>(f.count("n", 2));
    const auto m_max = static_cast<int>(f.count("m_max", static_cast<std::uint64_t>(n + 2)));
    if (!(kappa > 0.0 && kappa <= beta)) throw ConfigError(f.path() + ".kappa: must lie in (0, beta]");
    return [=](unsigned threads) mutable {
      options.threads = threads;
      const auto c = mc::complement_bound_check(beta, kappa, n, options, m_max);
      const json summary = {{"beta", beta},
                            {"kappa", kappa},
                            {"n", n},
                            {"m_max", c.m_max},
                            {"bound", json_number(c.bound)},
                            {"bound_psi", json_number(c.bound_psi)},
                            {"violation", mc_json(c.violation)},
                            {"corner_failure", mc_json(c.corner_failure)},
                            {"pass", c.pass}};
      Outcome out;
      out.files.push_back({"mc.csv", mc_text({c.violation, c.corner_failure})});
      out.files.push_back({"complement.json", dump(summary)});
      out.summary = summary;
      return out;
    };
  }
  throw ConfigError(f.path() + ".experiment: unknown Monte Carlo experiment '" + experiment + "'");
}

Experiment::RunFn parse_ldp_slope(Fields& f, std::uint64_t seed, const fs::path& base) {
  auto options = run_options(f, seed, 10000, 2048);
  auto event = parse_event(f.object("event"), seed, base, options.steps);
  const auto kappas = f.numbers("kappas");
  require_decreasing(kappas, f.path() + ".kappas");
  return [options, event, kappas](unsigned threads) mutable {
    options.threads = threads;
    const auto rows = mc::ldp_slope(event, kappas, options);
    std::vector<mc::McResult> results;
    json flags = json::array();
    for (const auto& r : rows) {
      results.push_back(r.result);
      flags.push_back({{"kappa", r.result.kappa}, {"low_hits", r.low_hits}});
    }
    const json summary = {{"event", mc::describe(event)}, {"rows", flags}};
    Outcome out;
    out.files.push_back({"ldp_slope.csv", mc_text(results)});
    out.files.push_back({"ldp_slope.json", dump(summary)});
    out.summary = summary;
    return out;
  };
}

// ---- optimizer ------------------------------------------------------------------

Experiment::RunFn parse_optimize(Fields& f, std::uint64_t seed, const fs::path& base) {
  opt::Options o;
  o.seed = seed;
  o.horizon = f.number("horizon", o.horizon);
  o.trace_steps = f.count("trace_steps", o.trace_steps);
  o.fd_step = f.number("fd_step", o.fd_step);
  o.mu0 = f.number("mu0", o.mu0);
  o.rounds = static_cast<int>(f.count("rounds", 6));
  o.max_inner = static_cast<int>(f.count("max_inner", 300));
  o.residual_tol = f.number("residual_tol", o.residual_tol);
  o.perturbed_starts = static_cast<int>(f.count("perturbed_starts", 4));
  o.perturbation_scale = f.number("perturbation_scale", o.perturbation_scale);
  const auto segments = f.count("segments", 32);
  const bool assert_feasible = f.flag("assert_feasible", false);
  if (o.rounds < 1 || o.max_inner < 1) throw ConfigError(f.path() + ": rounds and max_inner must be positive");

  auto cf = f.object("constraint");
  const auto type = cf.text("type");
  std::optional<opt::Constraint> constraint;
  std::optional<Curve> target;
  std::vector<double> radii;
  if (type == "tube") {
    target = trace(parse_driver(cf.object("target"), seed, base));
    if (cf.has("radii")) {
      radii = cf.numbers("radii");
      require_decreasing(radii, cf.path() + ".radii");
    } else {
      constraint = opt::TubeMembership{*target, cf.extended("radius", 0.1)};
    }
  } else if (type == "endpoint") {
    constraint = opt::Endpoint{cf.point("point"), cf.number("tolerance", 0.05)};
  } else if (type == "avoid_disk") {
    constraint = opt::AvoidDisk{cf.point("center"), cf.number("radius")};
  } else {
    throw ConfigError(cf.path() + ".type: unknown constraint type '" + type + "'");
  }
  cf.finish();
  // Fail fast on bad dimensions before any work.
  opt::PenaltyProblem(constraint ? *constraint : opt::Constraint{opt::TubeMembership{*target, radii.front()}}, segments, o);

  return [=](unsigned threads) mutable {
    o.threads = threads;
    Outcome out;
    auto check = [&](const opt::OptResult& r, const std::string& what) {
      if (assert_feasible && !r.feasible)
        throw RuntimeFailure("optimizer infeasible for " + what + " (residual " + format_double(r.residual) + ")");
    };
    if (constraint) {
      const auto r = opt::minimize_energy(*constraint, segments, o);
      check(r, opt::describe(*constraint));
      out.files.push_back({"minimizer.csv", driver_text(r.driver)});
      out.summary = to_json(r, opt::describe(*constraint), "minimizer.csv");
      out.files.push_back({"optimize.json", dump(out.summary)});
      return out;
    }
    const auto rows = opt::neighborhood_limit(*target, radii, segments, o);
    std::ostringstream csv;
    csv << "radius,energy,residual,iterations,converged,feasible,driver_file\n";
    json table = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i].result;
      const auto desc = opt::describe(opt::TubeMembership{*target, rows[i].radius});
      check(r, desc);
      const auto file = "minimizer_" + std::to_string(i) + ".csv";
      out.files.push_back({file, driver_text(r.driver)});
      csv << format_double(rows[i].radius) << ',' << format_double(r.energy) << ',' << format_double(r.residual)
          << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ',' << (r.feasible ? 1 : 0) << ',' << file
          << '\n';
      table.push_back(to_json(r, desc, file));
    }
    out.files.push_back({"neighborhood.csv", csv.str()});
    out.summary = {{"rows", table}};
    out.files.push_back({"optimize.json", dump(out.summary)});
    return out;
  };
}

// ---- PWL convergence ------------------------------------------------------------

Experiment::RunFn parse_approx_converge(Fields& f, std::uint64_t seed, const fs::path&) {
  auto options = run_options(f, seed, 200, 1024);
  const double kappa = f.number("kappa", 1.0);
  const auto node_list = f.counts("nodes");
  const double beta = f.number("beta", 0.5);
  const double zeta = f.number("zeta", 0.05);
  const double c0 = f.number("c0", 8.0);
  if (node_list.empty()) throw ConfigError(f.path() + ".nodes: must not be empty");
  for (auto n : node_list)
    if (n == 0 || options.steps % n != 0) throw ConfigError(f.path() + ".nodes: every count must divide steps");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError(f.path() + ".beta: must lie in (0, 1)");
  if (!(zeta > 0.0 && zeta < mc::max_zeta(beta)))
    throw ConfigError(f.path() + ".zeta: must lie in (0, " + format_double(mc::max_zeta(beta)) + ")");
  const std::vector<std::size_t> nodes(node_list.begin(), node_list.end());
  return [=](unsigned threads) mutable {
    options.threads = threads;
    const auto rows = mc::pwl_convergence(kappa, nodes, beta, zeta, options, c0);
    const json summary = {{"kappa", kappa},   {"beta", beta},         {"zeta", zeta},
                          {"c0", c0},         {"max_zeta", mc::max_zeta(beta)},
                          {"in_regime", kappa < beta}, {"replicas", options.replicas}, {"steps", options.steps}};
    Outcome out;
    out.files.push_back({"convergence.csv", render([&](std::ostream& s) { write_convergence_csv(s, rows); })});
    out.files.push_back({"convergence.json", dump(summary)});
    out.summary = summary;
    return out;
  };
}

}  // namespace

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {"trace", "zip",      "energy",   "verify-bounds",
                                                 "mc",    "ldp-slope", "optimize", "approx-converge"};
  return kinds;
}

Experiment parse_experiment(const std::string& kind, const json& document, std::optional<std::uint64_t> seed_override,
                            const fs::path& base_dir) {
  Fields f(document, "config");
  if (f.has("kind") && f.text("kind") != kind)
    throw ConfigError("config.kind: '" + document["kind"].get<std::string>() + "' does not match subcommand '" + kind + "'");
  // The output directory may be named in the config; the CLI reads it separately.
  if (f.has("output")) f.text("output");
  Experiment e;
  e.kind = kind;
  const auto config_seed = f.count("seed", 1);
  e.seed = seed_override ? *seed_override : config_seed;
  e.config = document;
  e.config["kind"] = kind;
  e.config["seed"] = e.seed;
  e.config.erase("output");

  if (kind == "trace") e.run = parse_trace(f, e.seed, base_dir);
  else if (kind == "zip") e.run = parse_zip(f, e.seed, base_dir);
  else if (kind == "energy") e.run = parse_energy(f, e.seed, base_dir);
  else if (kind == "verify-bounds") e.run = parse_verify_bounds(f, e.seed, base_dir);
  else if (kind == "mc") e.run = parse_mc(f, e.seed, base_dir);
  else if (kind == "ldp-slope") e.run = parse_ldp_slope(f, e.seed, base_dir);
  else if (kind == "optimize") e.run = parse_optimize(f, e.seed, base_dir);
  else if (kind == "approx-converge") e.run = parse_approx_converge(f, e.seed, base_dir);
  else throw ConfigError("unknown experiment kind '" + kind + "'");
  f.finish();
  return e;
}

}  // namespace loewner::cli
