#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qtflux/density.hpp"
#include "qtflux/dirac_point.hpp"
#include "qtflux/quadrature.hpp"
#include "qtflux/schrodinger_dilation.hpp"

namespace qtflux::config {

// Parsed value of a `key = value` line. Arrays hold numbers only.
struct Value {
  std::variant<double, bool, std::string, std::vector<double>> data;
  int line = 0;
};

// "section.key" → value, in a TOML subset: [section] headers, numbers,
// booleans, basic strings, flat numeric arrays and # comments.
class Table {
 public:
  static Table parse(const std::string& text, const std::string& source = "<string>");

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  bool has_section(const std::string& section) const;
  const Value& at(const std::string& key) const;

  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  std::string string_or(const std::string& key, const std::string& fallback) const;
  Complex complex(const std::string& key) const;  // [re, im] or a bare number
  std::vector<double> array(const std::string& key) const;

  void set_number(const std::string& key, double value);
  void set_array(const std::string& key, std::vector<double> value);

  const std::map<std::string, Value>& values() const { return values_; }
  const std::string& source() const { return source_; }

 private:
  [[noreturn]] void fail(const std::string& key, const std::string& msg) const;

  std::map<std::string, Value> values_;
  std::string source_;
};

enum class ModelKind { dirac, schrodinger };
enum class OutputFormat { csv, json };
enum class SweepScale { linear, log };

struct EnergyGrid {
  double from = -10.0;
  double to = 10.0;
  std::size_t steps = 201;
  std::vector<double> points() const;
};

struct SweepSpec {
  std::string parameter;  // "section.key"; for a complex key the modulus is swept
  double from = 0.0;
  double to = 1.0;
  std::size_t steps = 11;
  SweepScale scale = SweepScale::linear;
  std::vector<double> points() const;
};

struct RunConfig {
  ModelKind model = ModelKind::dirac;
  dirac::DiracSpec dirac;
  schrodinger::SampleSpec schrodinger;
  DensitySpec density;
  dirac::Lead dirac_lead = dirac::Lead::minus;
  schrodinger::Charge schrodinger_charge = schrodinger::Charge::a;
  QuadratureSpec quadrature;
  std::optional<EnergyGrid> grid;
  std::optional<SweepSpec> sweep;
  OutputFormat format = OutputFormat::csv;
  std::string output_path;
  Table table;
};

RunConfig parse(const std::string& text, const std::string& source = "<string>");
RunConfig load(const std::string& path);
RunConfig from_table(Table table);

// Copy of `cfg` with the sweep parameter set to `value`.
RunConfig with_parameter(const RunConfig& cfg, const std::string& key, double value);

const char* model_name(ModelKind kind);

}  // namespace qtflux::config
