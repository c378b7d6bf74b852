#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "loewner/bounds.hpp"

namespace loewner::cli {

// Randomized instances for the deterministic bound checks.
struct SuiteOptions {
  std::size_t instances = 1000;
  std::size_t steps = 64;  // driver grid for all checks except the dyadic one
  double beta = 0.8;
  int dyadic_n = 2;
  int dyadic_m_max = 4;  // dyadic drivers live on 4^m_max steps
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::vector<std::string> bounds;  // empty: all of bound_ids()
};

struct SuiteEntry {
  bounds::BoundReport merged;
  std::size_t instances = 0;
  std::size_t failed = 0;           // instances whose report did not pass
  std::size_t hypothesis_held = 0;  // instances with a satisfied hypothesis
};

const std::vector<std::string>& bound_ids();

// Instance i of bound b draws from GaussianStream(mix_seed(seed, b * instances + i)).
std::vector<SuiteEntry> run_bound_suite(const SuiteOptions& options);

}  // namespace loewner::cli
