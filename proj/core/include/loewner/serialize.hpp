#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "loewner/bounds.hpp"
#include "loewner/montecarlo.hpp"
#include "loewner/rate_optimizer.hpp"

namespace loewner {

// Finite values as numbers; infinities and NaN as the strings "inf", "-inf", "nan".
nlohmann::json json_number(double value);

nlohmann::json to_json(const bounds::BoundReport& report);
nlohmann::json to_json(const opt::OptResult& result, const std::string& constraint, const std::string& driver_file);

// Pretty JSON with a trailing newline.
std::string dump(const nlohmann::json& document);

inline constexpr const char* kMcHeader = "event,kappa,N,hits,p_hat,se,kappa_log_p,seed,indeterminate";
void write_mc_csv(std::ostream& out, std::span<const mc::McResult> rows);

inline constexpr const char* kConvergenceHeader = "nodes,median_sup_error,violation_freq,se,bound,in_regime,indeterminate";
void write_convergence_csv(std::ostream& out, std::span<const mc::ConvergenceRow> rows);

}  // namespace loewner
