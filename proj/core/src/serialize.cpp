#include "loewner/serialize.hpp"

#include <cmath>
#include <ostream>

#include "loewner/csv_io.hpp"

namespace loewner {

nlohmann::json json_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

nlohmann::json to_json(const bounds::BoundReport& report) {
  nlohmann::json j = {
      {"bound_id", report.bound_id},
      {"points", report.points},
      {"worst_ratio", json_number(report.worst_ratio)},
      {"witness", {{"t", json_number(report.witness.t)}, {"y", json_number(report.witness.y)}, {"driver", report.witness.driver}}},
      {"pass", report.pass},
      {"tolerance", report.tolerance},
      {"hypothesis_satisfied", report.hypothesis_satisfied},
  };
  if (report.empirical_constant) j["empirical_constant"] = json_number(*report.empirical_constant);
  if (!report.note.empty()) j["note"] = report.note;
  return j;
}

nlohmann::json to_json(const opt::OptResult& result, const std::string& constraint, const std::string& driver_file) {
  return {
      {"constraint", constraint},
      {"m", result.driver.steps()},
      {"energy", json_number(result.energy)},
      {"residual", json_number(result.residual)},
      {"iterations", result.iterations},
      {"converged", result.converged},
      {"feasible", result.feasible},
      {"driver_file", driver_file},
  };
}

std::string dump(const nlohmann::json& document) { return document.dump(2) + "\n"; }

namespace {

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

}  // namespace

void write_mc_csv(std::ostream& out, std::span<const mc::McResult> rows) {
  out << kMcHeader << '\n';
  for (const auto& r : rows) {
    out << csv_field(r.event) << ',' << format_double(r.kappa) << ',' << r.replicas << ',' << r.hits << ','
        << format_double(r.p_hat) << ',' << format_double(r.se) << ',' << format_double(r.kappa_log_p) << ','
        << r.seed << ',' << r.indeterminate << '\n';
  }
}

void write_convergence_csv(std::ostream& out, std::span<const mc::ConvergenceRow> rows) {
  out << kConvergenceHeader << '\n';
  for (const auto& r : rows) {
    out << r.nodes << ',' << format_double(r.median_sup_error) << ',' << format_double(r.violation_freq) << ','
        << format_double(r.se) << ',' << format_double(r.bound) << ',' << (r.in_regime ? 1 : 0) << ','
        << r.indeterminate << '\n';
  }
}

}  // namespace loewner
