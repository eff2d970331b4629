#include "qtflux/report.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "qtflux/errors.hpp"

namespace qtflux::report {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string to_csv(const Report& r) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  if (r.rows.empty() && r.current) {
    // scalar reports leave the energy column empty
    os << ',' << format_double(*r.current) << ",," << format_double(r.current_error.value_or(0.0))
       << '\n';
  }
  for (const Row& row : r.rows) {
    os << format_double(row.energy) << ',' << format_double(row.value) << ','
       << format_double(row.residual) << ',' << format_double(row.error_estimate) << '\n';
  }
  return os.str();
}

namespace {

// JSON has no NaN/Inf; non-finite values are written as strings.
json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double read_number(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "nan") return std::nan("");
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
  }
  raise(ErrorCode::InvalidArgument, "report JSON: expected a number");
}

}  // namespace

std::string to_json(const Report& r) {
  json j;
  j["command"] = r.command;
  j["model"] = r.model;
  json rows = json::array();
  for (const Row& row : r.rows) {
    rows.push_back({{"energy", number(row.energy)},
                    {"value", number(row.value)},
                    {"residual", number(row.residual)},
                    {"error_estimate", number(row.error_estimate)}});
  }
  j["rows"] = rows;
  if (r.current) j["current"] = number(*r.current);
  if (r.current_error) j["current_error"] = number(*r.current_error);
  j["diagnostics"] = r.diagnostics;
  json echo = json::object();
  for (const auto& [k, v] : r.config_echo) echo[k] = v;
  j["config"] = echo;
  return j.dump(2) + "\n";
}

Report from_json(const std::string& text) {
  Report r;
  json j;
  try {
    j = json::parse(text);
    r.command = j.at("command").get<std::string>();
    r.model = j.value("model", "");
    for (const json& row : j.at("rows")) {
      r.rows.push_back({read_number(row.at("energy")), read_number(row.at("value")),
                        read_number(row.at("residual")), read_number(row.at("error_estimate"))});
    }
    if (j.contains("current")) r.current = read_number(j.at("current"));
    if (j.contains("current_error")) r.current_error = read_number(j.at("current_error"));
    if (j.contains("diagnostics")) r.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
    if (j.contains("config")) {
      for (const auto& [k, v] : j.at("config").items()) r.config_echo.emplace_back(k, v.get<std::string>());
    }
  } catch (const json::exception& e) {
    raise(ErrorCode::InvalidArgument, std::string("report JSON: ") + e.what());
  }
  return r;
}

}  // namespace qtflux::report
