#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "qtflux/config.hpp"
#include "qtflux/dirac_point.hpp"
#include "qtflux/errors.hpp"
#include "qtflux/report.hpp"
#include "qtflux/schrodinger_dilation.hpp"
#include "qtflux/verify.hpp"

using namespace qtflux;

namespace {

struct Flags {
  std::string config_path;
  std::string output_path;
  std::string format;
  unsigned threads = 0;
  std::uint64_t seed = verify::Options{}.seed;
  std::string level = "full";
};

unsigned resolve_threads(unsigned flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("QTFLUX_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring invalid QTFLUX_THREADS='" << env << "'\n";
  }
  return 1;
}

std::vector<std::pair<std::string, std::string>> echo(const config::Table& table) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [key, value] : table.values()) {
    std::ostringstream os;
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) {
            os << report::format_double(v);
          } else if constexpr (std::is_same_v<T, bool>) {
            os << (v ? "true" : "false");
          } else if constexpr (std::is_same_v<T, std::string>) {
            os << v;
          } else {
            os << '[';
            for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << report::format_double(v[i]);
            os << ']';
          }
        },
        value.data);
    out.emplace_back(key, os.str());
  }
  return out;
}

struct Scalar {
  double value = 0.0;
  double error = 0.0;
  double residual = 0.0;
  std::vector<std::string> diagnostics;
};

Scalar compute_current(const config::RunConfig& cfg) {
  Scalar out;
  if (cfg.model == config::ModelKind::dirac) {
    const auto res = dirac::model_current(cfg.dirac, cfg.density, cfg.dirac_lead, cfg.quadrature);
    out = {res.lb.value, res.lb.error_estimate, res.lb.max_unitarity_residual, res.lb.diagnostics};
  } else {
    const auto res = schrodinger::model_current(cfg.schrodinger, cfg.density,
                                                cfg.schrodinger_charge, cfg.quadrature);
    out = {res.lb.value, res.lb.error_estimate, res.lb.max_unitarity_residual, res.lb.diagnostics};
  }
  return out;
}

report::Report cmd_transmission(const config::RunConfig& cfg) {
  report::Report rep;
  std::vector<double> energies;
  if (cfg.grid) {
    energies = cfg.grid->points();
  } else if (cfg.model == config::ModelKind::dirac) {
    energies = config::EnergyGrid{-cfg.dirac.a - 10.0, cfg.dirac.a + 10.0, 201}.points();
  } else {
    energies = schrodinger::default_energy_grid(cfg.schrodinger);
  }
  for (double lambda : energies) {
    report::Row row{lambda, 0.0, 0.0, 0.0};
    if (cfg.model == config::ModelKind::dirac) {
      if (std::abs(lambda) > cfg.dirac.a + dirac::gap_eps(cfg.dirac)) {
        row.value = dirac::cross_section(cfg.dirac, lambda);
        row.residual = linops::unitarity_residual(dirac::s_matrix(cfg.dirac, lambda));
      }
    } else {
      const auto& s = cfg.schrodinger;
      const double coupling = s.alpha_a() * s.alpha_a() * s.alpha_b() * s.alpha_b();
      if (coupling > 0.0) {
        const auto sd = schrodinger::scattering_matrix(s, lambda);
        row.value = coupling / std::norm(sd.w);
        row.residual = sd.unitarity_residual;
      }
    }
    rep.rows.push_back(row);
  }
  return rep;
}

report::Report cmd_current(const config::RunConfig& cfg) {
  report::Report rep;
  const Scalar s = compute_current(cfg);
  rep.current = s.value;
  rep.current_error = s.error;
  rep.diagnostics = s.diagnostics;
  return rep;
}

report::Report cmd_sweep(const config::RunConfig& cfg, unsigned threads) {
  if (!cfg.sweep) raise(ErrorCode::ConfigError, cfg.table.source() + ": sweep needs a [sweep] section");
  const auto points = cfg.sweep->points();
  report::Report rep;
  rep.rows.resize(points.size());
  std::vector<std::string> errors(points.size());
  std::vector<std::thread> pool;
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(points.size())));
  for (unsigned t = 0; t < n; ++t) {
    pool.emplace_back([&, t]() {
      for (std::size_t i = t; i < points.size(); i += n) {
        try {
          const auto point_cfg = config::with_parameter(cfg, cfg.sweep->parameter, points[i]);
          const Scalar s = compute_current(point_cfg);
          rep.rows[i] = {points[i], s.value, s.residual, s.error};
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!errors[i].empty()) {
      raise(ErrorCode::InvalidArgument, "sweep point " + report::format_double(points[i]) + ": " + errors[i]);
    }
  }
  rep.diagnostics.push_back("energy column holds " + cfg.sweep->parameter);
  return rep;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) raise(ErrorCode::InvalidArgument, "cannot write " + path);
  out << text;
}

int run_model_command(const std::string& name, const Flags& flags) {
  if (flags.config_path.empty()) raise(ErrorCode::ConfigError, "--config is required");
  const config::RunConfig cfg = config::load(flags.config_path);
  report::Report rep;
  if (name == "transmission") {
    rep = cmd_transmission(cfg);
  } else if (name == "current") {
    rep = cmd_current(cfg);
  } else {
    rep = cmd_sweep(cfg, resolve_threads(flags.threads));
  }
  rep.command = name;
  rep.model = config::model_name(cfg.model);
  rep.config_echo = echo(cfg.table);
  const std::string format = flags.format.empty()
                                 ? (cfg.format == config::OutputFormat::json ? "json" : "csv")
                                 : flags.format;
  const std::string path = flags.output_path.empty() ? cfg.output_path : flags.output_path;
  emit(format == "json" ? report::to_json(rep) : report::to_csv(rep), path);
  return 0;
}

int run_verify(const Flags& flags) {
  verify::Options opts;
  opts.level = flags.level == "fast" ? verify::Level::fast : verify::Level::full;
  opts.seed = flags.seed;
  opts.threads = resolve_threads(flags.threads);
  const auto results = verify::run_all(opts);
  bool all = true;
  for (const auto& r : results) all = all && r.passed;
  std::ostringstream os;
  if (flags.format == "json") {
    nlohmann::json j;
    j["level"] = flags.level;
    j["seed"] = opts.seed;
    j["passed"] = all;
    j["checks"] = nlohmann::json::array();
    for (const auto& r : results) {
      j["checks"].push_back(
          {{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}, {"seconds", r.seconds}});
    }
    os << j.dump(2) << '\n';
  } else {
    os << "id,name,passed,seconds,detail\n";
    for (const auto& r : results) {
      os << r.id << ",\"" << r.name << "\"," << (r.passed ? "true" : "false") << ','
         << report::format_double(r.seconds) << ",\"" << r.detail << "\"\n";
    }
  }
  emit(os.str(), flags.output_path);
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qtflux: steady-state Landauer-Buttiker currents"};
  app.require_subcommand(1);
  Flags flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--output", flags.output_path, "Write results to this path instead of stdout");
    sub->add_option("--format", flags.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", flags.threads, "Worker threads (fallback: QTFLUX_THREADS)");
  };
  for (const char* name : {"transmission", "current", "sweep"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("Run the ") + name + " task");
    sub->add_option("--config", flags.config_path, "Model configuration file")->required();
    add_common(sub);
  }
  CLI::App* ver = app.add_subcommand("verify", "Run the built-in property checks");
  add_common(ver);
  ver->add_option("--seed", flags.seed, "Seed for randomized checks");
  ver->add_option("--level", flags.level, "fast or full")->check(CLI::IsMember({"fast", "full"}));

  CLI11_PARSE(app, argc, argv);
  try {
    CLI::App* sub = app.get_subcommands().front();
    if (sub->get_name() == "verify") return run_verify(flags);
    return run_model_command(sub->get_name(), flags);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';  // already prefixed with the error name
    return e.code() == ErrorCode::ConfigError ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
