#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>

namespace loewner::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

std::string_view version();

// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

// Entry point of loewner_lab: `<kind> --config PATH [--out DIR] [--seed N] [--threads N]`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace loewner::cli
