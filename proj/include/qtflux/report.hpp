#pragma once

#include <optional>
#include <string>
#include <vector>

namespace qtflux::report {

// One CSV row. For sweeps `energy` holds the swept parameter value.
struct Row {
  double energy = 0.0;
  double value = 0.0;
  double residual = 0.0;
  double error_estimate = 0.0;
};

struct Report {
  std::string command;
  std::string model;
  std::vector<Row> rows;
  std::optional<double> current;
  std::optional<double> current_error;
  std::vector<std::string> diagnostics;
  std::vector<std::pair<std::string, std::string>> config_echo;
};

inline constexpr const char* kCsvHeader = "energy,value,residual,error_estimate";

std::string to_csv(const Report& r);
std::string to_json(const Report& r);
Report from_json(const std::string& text);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace qtflux::report
