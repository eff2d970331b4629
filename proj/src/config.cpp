#include "qtflux/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "qtflux/errors.hpp"

namespace qtflux::config {

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"dirac", {"a", "b_minus", "b_plus", "r"}},
      {"schrodinger",
       {"a", "b", "mass", "mass_breakpoints", "mass_values", "mass_form", "mass_params",
        "potential", "potential_breakpoints", "potential_values", "potential_form",
        "potential_params", "kappa_a", "kappa_b", "ode_tol"}},
      {"density", {"kind", "beta", "mu", "mu_minus", "mu_plus", "mu_a", "mu_b", "tau_fraction"}},
      {"charge", {"lead"}},
      {"quadrature", {"tol", "rel_tol", "tail_eps", "max_range", "max_subdivisions"}},
      {"grid", {"from", "to", "steps"}},
      {"sweep", {"parameter", "from", "to", "steps", "scale"}},
      {"output", {"format", "path"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool bare_key(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  }
  return true;
}

std::optional<double> parse_number(std::string s) {
  s.erase(std::remove(s.begin(), s.end(), '_'), s.end());
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || first == s.data() + s.size()) {
    return std::nullopt;
  }
  return v;
}

// Strips a trailing comment outside of string literals.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_string && c == '\\') {
      ++i;
    } else if (c == '"') {
      in_string = !in_string;
    } else if (c == '#' && !in_string) {
      return line.substr(0, i);
    }
  }
  return line;
}

}  // namespace

void Table::fail(const std::string& key, const std::string& msg) const {
  std::ostringstream os;
  os << source_;
  const auto it = values_.find(key);
  if (it != values_.end()) os << ":" << it->second.line;
  os << ": key '" << key << "': " << msg;
  raise(ErrorCode::ConfigError, os.str());
}

Table Table::parse(const std::string& text, const std::string& source) {
  Table table;
  table.source_ = source;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::set<std::string> seen_sections;
  int line_no = 0;
  auto error = [&](const std::string& msg) {
    raise(ErrorCode::ConfigError, source + ":" + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') error("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!known_keys().count(section)) error("unknown section [" + section + "]");
      if (!seen_sections.insert(section).second) error("duplicate section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) error("expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string rhs = trim(line.substr(eq + 1));
    if (!bare_key(key)) error("invalid key '" + key + "'");
    if (section.empty()) error("key '" + key + "' outside of any section");
    if (!known_keys().at(section).count(key)) {
      error("key '" + section + "." + key + "': unknown key");
    }
    const std::string full = section + "." + key;
    if (table.values_.count(full)) error("key '" + full + "': duplicate key");
    if (rhs.empty()) error("key '" + full + "': missing value");

    Value value;
    value.line = line_no;
    if (rhs.front() == '"') {
      std::string out;
      std::size_t i = 1;
      bool closed = false;
      for (; i < rhs.size(); ++i) {
        const char c = rhs[i];
        if (c == '\\' && i + 1 < rhs.size()) {
          const char n = rhs[++i];
          out += n == 'n' ? '\n' : n == 't' ? '\t' : n;
        } else if (c == '"') {
          closed = true;
          break;
        } else {
          out += c;
        }
      }
      if (!closed || trim(rhs.substr(i + 1)) != "") error("key '" + full + "': malformed string");
      value.data = out;
    } else if (rhs == "true" || rhs == "false") {
      value.data = rhs == "true";
    } else if (rhs.front() == '[') {
      if (rhs.back() != ']') error("key '" + full + "': unterminated array");
      std::vector<double> items;
      std::istringstream parts(rhs.substr(1, rhs.size() - 2));
      std::string item;
      while (std::getline(parts, item, ',')) {
        item = trim(item);
        if (item.empty()) {
          if (parts.eof()) break;  // trailing comma
          error("key '" + full + "': empty array element");
        }
        const auto v = parse_number(item);
        if (!v) error("key '" + full + "': array element '" + item + "' is not a number");
        items.push_back(*v);
      }
      value.data = items;
    } else {
      const auto v = parse_number(rhs);
      if (!v) error("key '" + full + "': cannot parse value '" + rhs + "'");
      value.data = *v;
    }
    table.values_[full] = std::move(value);
  }
  return table;
}

bool Table::has_section(const std::string& section) const {
  const std::string prefix = section + ".";
  for (const auto& [k, v] : values_) {
    if (k.rfind(prefix, 0) == 0) return true;
  }
  return false;
}

const Value& Table::at(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) fail(key, "missing required key");
  return it->second;
}

double Table::number(const std::string& key) const {
  const Value& v = at(key);
  if (const double* d = std::get_if<double>(&v.data)) return *d;
  fail(key, "expected a number");
}

double Table::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::string Table::string_or(const std::string& key, const std::string& fallback) const {
  if (!has(key)) return fallback;
  const Value& v = at(key);
  if (const auto* s = std::get_if<std::string>(&v.data)) return *s;
  fail(key, "expected a string");
}

Complex Table::complex(const std::string& key) const {
  const Value& v = at(key);
  if (const double* d = std::get_if<double>(&v.data)) return {*d, 0.0};
  if (const auto* a = std::get_if<std::vector<double>>(&v.data)) {
    if (a->size() == 2) return {(*a)[0], (*a)[1]};
  }
  fail(key, "expected a complex number [re, im]");
}

std::vector<double> Table::array(const std::string& key) const {
  const Value& v = at(key);
  if (const auto* a = std::get_if<std::vector<double>>(&v.data)) return *a;
  fail(key, "expected an array of numbers");
}

void Table::set_number(const std::string& key, double value) {
  values_[key].data = value;
}

void Table::set_array(const std::string& key, std::vector<double> value) {
  values_[key].data = std::move(value);
}

std::vector<double> EnergyGrid::points() const {
  std::vector<double> out;
  if (steps == 1) return {from};
  for (std::size_t i = 0; i < steps; ++i) {
    out.push_back(from + (to - from) * static_cast<double>(i) / static_cast<double>(steps - 1));
  }
  return out;
}

std::vector<double> SweepSpec::points() const {
  std::vector<double> out;
  if (steps == 1) return {from};
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(steps - 1);
    out.push_back(scale == SweepScale::log ? from * std::pow(to / from, t) : from + (to - from) * t);
  }
  out.back() = to;
  return out;
}

const char* model_name(ModelKind kind) {
  return kind == ModelKind::dirac ? "dirac" : "schrodinger";
}

namespace {

std::size_t count_key(const Table& t, const std::string& key, double fallback) {
  const double v = t.number_or(key, fallback);
  if (!(v >= 1.0) || v != std::floor(v)) {
    raise(ErrorCode::ConfigError, t.source() + ": key '" + key + "': expected a positive integer");
  }
  return static_cast<std::size_t>(v);
}

schrodinger::Profile read_profile(const Table& t, const std::string& name, double fallback) {
  const std::string base = "schrodinger." + name;
  const bool has_const = t.has(base);
  const bool has_pw = t.has(base + "_breakpoints") || t.has(base + "_values");
  const bool has_form = t.has(base + "_form") || t.has(base + "_params");
  if (static_cast<int>(has_const) + static_cast<int>(has_pw) + static_cast<int>(has_form) > 1) {
    raise(ErrorCode::ConfigError,
          t.source() + ": key '" + base + "': give one of constant, piecewise or closed form");
  }
  try {
    if (has_pw) {
      const auto values = t.array(base + "_values");
      const auto breaks = t.has(base + "_breakpoints") ? t.array(base + "_breakpoints")
                                                       : std::vector<double>{};
      return schrodinger::Profile::piecewise_constant(breaks, values);
    }
    if (has_form) {
      return schrodinger::Profile::closed_form(t.string_or(base + "_form", ""),
                                               t.array(base + "_params"));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    raise(ErrorCode::ConfigError, t.source() + ": key '" + base + "': " + e.what());
  }
  return schrodinger::Profile::constant(t.number_or(base, fallback));
}

}  // namespace

RunConfig from_table(Table t) {
  RunConfig cfg;
  const std::string& src = t.source();
  auto config_error = [&](const std::string& key, const std::string& msg) {
    std::string where = src;
    if (t.has(key)) where += ":" + std::to_string(t.at(key).line);
    raise(ErrorCode::ConfigError, where + ": key '" + key + "': " + msg);
  };

  const bool has_dirac = t.has_section("dirac");
  const bool has_schr = t.has_section("schrodinger");
  if (has_dirac == has_schr) {
    raise(ErrorCode::ConfigError, src + ": exactly one of [dirac] or [schrodinger] must be present");
  }
  cfg.model = has_dirac ? ModelKind::dirac : ModelKind::schrodinger;

  try {
    if (cfg.model == ModelKind::dirac) {
      cfg.dirac.a = t.number_or("dirac.a", 1.0);
      cfg.dirac.b_minus = t.number_or("dirac.b_minus", 0.0);
      cfg.dirac.b_plus = t.number_or("dirac.b_plus", 0.0);
      cfg.dirac.r = t.has("dirac.r") ? t.complex("dirac.r") : Complex(1.0, 0.0);
      cfg.dirac.validate();
    } else {
      auto& s = cfg.schrodinger;
      s.a = t.number_or("schrodinger.a", 0.0);
      s.b = t.number_or("schrodinger.b", 1.0);
      s.mass = read_profile(t, "mass", 0.5);
      s.potential = read_profile(t, "potential", 0.0);
      if (t.has("schrodinger.kappa_a")) s.kappa_a = t.complex("schrodinger.kappa_a");
      if (t.has("schrodinger.kappa_b")) s.kappa_b = t.complex("schrodinger.kappa_b");
      s.ode_tol = t.number_or("schrodinger.ode_tol", 1e-10);
      s.validate();
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    raise(ErrorCode::ConfigError, src + ": [" + model_name(cfg.model) + "]: " + e.what());
  }

  const std::string kind = t.string_or("density.kind", "fermi_dirac");
  const double beta = t.number_or("density.beta", 1.0);
  if (!(beta > 0.0)) config_error("density.beta", "must be positive");
  if (kind == "fermi_dirac") {
    std::vector<double> mu;
    if (cfg.model == ModelKind::dirac) {
      mu = {t.number_or("density.mu_minus", 0.0), t.number_or("density.mu_plus", 0.0)};
    } else {
      mu = {t.number_or("density.mu_b", 0.0), t.number_or("density.mu_a", 0.0)};
    }
    cfg.density = DensitySpec::fermi_dirac_per_lead(beta, mu);
  } else if (kind == "equilibrium") {
    cfg.density = DensitySpec::equilibrium(beta, t.number_or("density.mu", 0.0), 2);
  } else {
    config_error("density.kind", "expected \"fermi_dirac\" or \"equilibrium\"");
  }
  if (t.has("density.tau_fraction")) {
    const double frac = t.number("density.tau_fraction");
    if (std::abs(frac) > 1.0) config_error("density.tau_fraction", "must lie in [-1, 1]");
    const auto leads = cfg.density.leads;
    cfg.density.tau = [leads, frac](double lambda) {
      return Complex(frac * std::sqrt(std::max(0.0, leads[0](lambda) * leads[1](lambda))), 0.0);
    };
  }

  const std::string lead = t.string_or("charge.lead", cfg.model == ModelKind::dirac ? "minus" : "a");
  if (cfg.model == ModelKind::dirac) {
    if (lead == "minus") {
      cfg.dirac_lead = dirac::Lead::minus;
    } else if (lead == "plus") {
      cfg.dirac_lead = dirac::Lead::plus;
    } else {
      config_error("charge.lead", "expected \"minus\" or \"plus\"");
    }
  } else {
    if (lead == "a") {
      cfg.schrodinger_charge = schrodinger::Charge::a;
    } else if (lead == "b") {
      cfg.schrodinger_charge = schrodinger::Charge::b;
    } else {
      config_error("charge.lead", "expected \"a\" or \"b\"");
    }
  }

  auto& q = cfg.quadrature;
  q.tol = t.number_or("quadrature.tol", q.tol);
  q.rel_tol = t.number_or("quadrature.rel_tol", q.rel_tol);
  q.tail_eps = t.number_or("quadrature.tail_eps", q.tail_eps);
  q.max_range = t.number_or("quadrature.max_range", q.max_range);
  q.max_subdivisions = count_key(t, "quadrature.max_subdivisions", static_cast<double>(q.max_subdivisions));
  if (!(q.tol > 0.0)) config_error("quadrature.tol", "must be positive");
  if (!(q.tail_eps < q.tol)) config_error("quadrature.tail_eps", "must be smaller than tol");

  if (t.has_section("grid")) {
    EnergyGrid g;
    g.from = t.number_or("grid.from", g.from);
    g.to = t.number_or("grid.to", g.to);
    g.steps = count_key(t, "grid.steps", static_cast<double>(g.steps));
    if (!(g.to >= g.from)) config_error("grid.to", "must not be below grid.from");
    cfg.grid = g;
  }

  if (t.has_section("sweep")) {
    SweepSpec s;
    s.parameter = t.string_or("sweep.parameter", "");
    if (s.parameter.empty()) config_error("sweep.parameter", "missing sweep parameter");
    const auto it = t.values().find(s.parameter);
    bool numeric = false;
    if (it != t.values().end()) {
      const auto* arr = std::get_if<std::vector<double>>(&it->second.data);
      numeric = std::holds_alternative<double>(it->second.data) || (arr && arr->size() == 2);
    }
    if (!numeric) config_error("sweep.parameter", "'" + s.parameter + "' does not name a numeric config key");
    s.from = t.number("sweep.from");
    s.to = t.number("sweep.to");
    s.steps = count_key(t, "sweep.steps", static_cast<double>(s.steps));
    const std::string scale = t.string_or("sweep.scale", "linear");
    if (scale == "linear") {
      s.scale = SweepScale::linear;
    } else if (scale == "log") {
      s.scale = SweepScale::log;
      if (!(s.from > 0.0 && s.to > 0.0)) config_error("sweep.scale", "log sweep needs positive bounds");
    } else {
      config_error("sweep.scale", "expected \"linear\" or \"log\"");
    }
    cfg.sweep = s;
  }

  const std::string format = t.string_or("output.format", "csv");
  if (format == "csv") {
    cfg.format = OutputFormat::csv;
  } else if (format == "json") {
    cfg.format = OutputFormat::json;
  } else {
    config_error("output.format", "expected \"csv\" or \"json\"");
  }
  cfg.output_path = t.string_or("output.path", "");
  cfg.table = std::move(t);
  return cfg;
}

RunConfig parse(const std::string& text, const std::string& source) {
  return from_table(Table::parse(text, source));
}

RunConfig load(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::ConfigError, path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

RunConfig with_parameter(const RunConfig& cfg, const std::string& key, double value) {
  Table t = cfg.table;
  const Value& v = t.at(key);
  if (const auto* arr = std::get_if<std::vector<double>>(&v.data)) {
    if (arr->size() != 2) raise(ErrorCode::ConfigError, "key '" + key + "': not a numeric key");
    const Complex old((*arr)[0], (*arr)[1]);
    const double phase = std::abs(old) > 0.0 ? std::arg(old) : 0.0;
    const Complex next = std::polar(value, phase);
    t.set_array(key, {next.real(), next.imag()});
  } else if (std::holds_alternative<double>(v.data)) {
    t.set_number(key, value);
  } else {
    raise(ErrorCode::ConfigError, "key '" + key + "': not a numeric key");
  }
  return from_table(std::move(t));
}

}  // namespace qtflux::config
