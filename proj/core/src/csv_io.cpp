#include "loewner/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "loewner/error.hpp"

namespace loewner {

std::string format_double(double x) {
  char buf[40];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", x);
  return std::string(buf, static_cast<std::size_t>(len));
}

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw InvalidArgument("cannot parse number '" + std::string(text) + "'");
  return value;
}

namespace {

std::vector<std::vector<double>> read_rows(std::istream& in, std::string_view header, std::size_t columns) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("empty CSV input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw InvalidArgument("expected CSV header '" + std::string(header) + "', got '" + line + "'");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      row.push_back(parse_double(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (row.size() != columns)
      throw InvalidArgument("CSV row " + std::to_string(rows.size() + 1) + " has " + std::to_string(row.size()) +
                            " fields, expected " + std::to_string(columns));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidArgument("CSV input has no data rows");
  return rows;
}

template <class Fn>
auto with_input(const std::filesystem::path& path, Fn fn) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return fn(in);
}

template <class Fn>
void with_output(const std::filesystem::path& path, Fn fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  fn(out);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

void write_driver_csv(std::ostream& out, const Driver& driver) {
  out << "t,lambda\n";
  for (std::size_t k = 0; k <= driver.steps(); ++k)
    out << format_double(driver.time(k)) << ',' << format_double(driver[k]) << '\n';
}

Driver read_driver_csv(std::istream& in) {
  const auto rows = read_rows(in, "t,lambda", 2);
  if (rows.front()[0] != 0.0 || rows.front()[1] != 0.0) throw InvalidArgument("driver CSV must start with the row 0,0");
  if (rows.size() < 2) return Driver::make({0.0}, 1.0);
  const std::size_t n = rows.size() - 1;
  const double horizon = rows.back()[0];
  std::vector<double> values;
  values.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double expected = horizon * static_cast<double>(k) / static_cast<double>(n);
    if (std::abs(rows[k][0] - expected) > 1e-12 * std::max(1.0, horizon))
      throw InvalidArgument("driver CSV row " + std::to_string(k + 1) + " is off the uniform grid; resample first");
    values.push_back(rows[k][1]);
  }
  return Driver::make(std::move(values), horizon);
}

void write_driver_csv(const std::filesystem::path& path, const Driver& driver) {
  with_output(path, [&](std::ostream& out) { write_driver_csv(out, driver); });
}

Driver read_driver_csv(const std::filesystem::path& path) {
  return with_input(path, [](std::istream& in) { return read_driver_csv(in); });
}

void write_curve_csv(std::ostream& out, const Curve& curve) {
  out << "t,re,im\n";
  for (std::size_t k = 0; k < curve.size(); ++k)
    out << format_double(curve.times()[k]) << ',' << format_double(curve[k].real()) << ','
        << format_double(curve[k].imag()) << '\n';
}

Curve read_curve_csv(std::istream& in) {
  const auto rows = read_rows(in, "t,re,im", 3);
  std::vector<double> times;
  std::vector<Complex> points;
  for (const auto& r : rows) {
    times.push_back(r[0]);
    points.emplace_back(r[1], r[2]);
  }
  return Curve::make(std::move(times), std::move(points));
}

void write_curve_csv(const std::filesystem::path& path, const Curve& curve) {
  with_output(path, [&](std::ostream& out) { write_curve_csv(out, curve); });
}

Curve read_curve_csv(const std::filesystem::path& path) {
  return with_input(path, [](std::istream& in) { return read_curve_csv(in); });
}

}  // namespace loewner
