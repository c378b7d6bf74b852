#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "loewner/curve.hpp"
#include "loewner/driver.hpp"

namespace loewner {

// Formats with 17 significant digits ("%.17g"), enough to round-trip a double.
std::string format_double(double x);
double parse_double(std::string_view text);

// Driver CSV: header `t,lambda`, rows in increasing t, first row `0,0`, t_k on the
// uniform grid k T / n. Reading rejects nonuniform time columns.
void write_driver_csv(std::ostream& out, const Driver& driver);
Driver read_driver_csv(std::istream& in);
void write_driver_csv(const std::filesystem::path& path, const Driver& driver);
Driver read_driver_csv(const std::filesystem::path& path);

// Curve CSV: header `t,re,im`.
void write_curve_csv(std::ostream& out, const Curve& curve);
Curve read_curve_csv(std::istream& in);
void write_curve_csv(const std::filesystem::path& path, const Curve& curve);
Curve read_curve_csv(const std::filesystem::path& path);

}  // namespace loewner
