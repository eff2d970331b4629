#include <cmath>
#include <limits>
#include <string>

#include "doctest.h"
#include "qtflux/config.hpp"
#include "qtflux/errors.hpp"
#include "qtflux/report.hpp"

using namespace qtflux;

namespace {

std::string config_error(const std::string& text) {
  try {
    config::parse(text, "test.toml");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
    return e.what();
  }
  FAIL("expected ConfigError");
  return {};
}

const char* kDirac = R"(
[dirac]
a = 1.0
b_minus = 0.25
b_plus = 0.0
r = [0.6, 0.8]   # complex as [re, im]

[density]
kind = "fermi_dirac"
beta = 2.0
mu_minus = 1.5
mu_plus = -0.5
)";

}  // namespace

TEST_CASE("Dirac config parses") {
  const auto cfg = config::parse(kDirac);
  CHECK(cfg.model == config::ModelKind::dirac);
  CHECK(cfg.dirac.a == 1.0);
  CHECK(cfg.dirac.b_minus == 0.25);
  CHECK(cfg.dirac.r == Complex(0.6, 0.8));
  CHECK(cfg.density.lead_count() == 2);
  CHECK(cfg.format == config::OutputFormat::csv);
  CHECK_FALSE(cfg.sweep.has_value());
}

TEST_CASE("shipped configs load") {
  const std::string dir = QTFLUX_CONFIG_DIR;
  CHECK(config::load(dir + "/dirac.toml").model == config::ModelKind::dirac);
  CHECK(config::load(dir + "/schrodinger.toml").model == config::ModelKind::schrodinger);
  const auto sweep = config::load(dir + "/dirac_sweep.toml");
  REQUIRE(sweep.sweep.has_value());
  CHECK(sweep.sweep->scale == config::SweepScale::log);
}

TEST_CASE("corrupt file reports its line") {
  const std::string path = std::string(QTFLUX_TEST_DATA_DIR) + "/corrupt.toml";
  try {
    config::load(path);
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
    CHECK(std::string(e.what()).find("corrupt.toml:3") != std::string::npos);
  }
  CHECK_THROWS_AS(config::load("/nonexistent/qtflux.toml"), Error);
}

TEST_CASE("malformed configs are rejected with the key") {
  CHECK(config_error("[dirac]\na = 1.0\nfoo = 2\n").find("foo") != std::string::npos);
  CHECK(config_error("[dirac]\na = 1.0\na = 2.0\n").find("test.toml:3") != std::string::npos);
  CHECK(config_error("a = 1.0\n").find("test.toml:1") != std::string::npos);
  CHECK(config_error("[nonsense]\nx = 1\n").find("nonsense") != std::string::npos);
  // No model section, and two model sections.
  config_error("[density]\nkind = \"equilibrium\"\n");
  config_error(std::string(kDirac) + "[schrodinger]\na = 0.0\nb = 1.0\n");
  config_error(std::string(kDirac) + "[output]\nformat = \"xml\"\n");
}

TEST_CASE("sweep parameter must exist") {
  const std::string good = std::string(kDirac) +
                           "[sweep]\nparameter = \"dirac.b_minus\"\nfrom = 0.0\nto = 1.0\nsteps = 5\n";
  const auto cfg = config::parse(good);
  REQUIRE(cfg.sweep.has_value());
  const auto pts = cfg.sweep->points();
  REQUIRE(pts.size() == 5);
  CHECK(pts.front() == 0.0);
  CHECK(pts.back() == 1.0);
  CHECK(config::with_parameter(cfg, "dirac.b_minus", 0.5).dirac.b_minus == 0.5);

  config_error(std::string(kDirac) + "[sweep]\nparameter = \"dirac.nope\"\nfrom = 0\nto = 1\n");
  config_error(std::string(kDirac) +
               "[sweep]\nparameter = \"dirac.a\"\nfrom = 0\nto = 1\nscale = \"log\"\n");
}

TEST_CASE("sweeping a complex key keeps its phase") {
  const auto cfg = config::parse(kDirac);
  const auto swept = config::with_parameter(cfg, "dirac.r", 2.0);
  CHECK(std::abs(std::abs(swept.dirac.r) - 2.0) < 1e-15);
  CHECK(std::abs(std::arg(swept.dirac.r) - std::arg(Complex(0.6, 0.8))) < 1e-15);
}

TEST_CASE("JSON report round-trips bit-exactly") {
  report::Report r;
  r.command = "transmission";
  r.model = "dirac";
  r.rows = {{-3.0, 0.1 + 0.2, 1e-17, 0.0},
            {1.0 / 3.0, std::nextafter(1.0, 2.0), 5e-324, 2.0},
            {7.0, std::numeric_limits<double>::infinity(), 0.0, 0.0}};
  r.current = -0.123456789012345678;
  r.current_error = 3e-12;
  r.diagnostics = {"note"};
  r.config_echo = {{"dirac.a", "1"}};

  const auto back = report::from_json(report::to_json(r));
  REQUIRE(back.rows.size() == r.rows.size());
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    CHECK(back.rows[i].energy == r.rows[i].energy);
    CHECK(back.rows[i].value == r.rows[i].value);
    CHECK(back.rows[i].residual == r.rows[i].residual);
    CHECK(back.rows[i].error_estimate == r.rows[i].error_estimate);
  }
  CHECK(*back.current == *r.current);
  CHECK(*back.current_error == *r.current_error);
  CHECK(back.diagnostics == r.diagnostics);
  CHECK(back.config_echo == r.config_echo);
}

TEST_CASE("CSV layout") {
  report::Report r;
  r.rows = {{0.5, 0.25, 0.0, 1e-9}};
  const std::string csv = report::to_csv(r);
  CHECK(csv.rfind(std::string(report::kCsvHeader) + "\n", 0) == 0);
  CHECK(csv.find("0.5,0.25,0,1e-09") != std::string::npos);

  report::Report scalar;
  scalar.current = 1.5;
  scalar.current_error = 0.0;
  CHECK(report::to_csv(scalar).find("\n,1.5,") != std::string::npos);
  CHECK(report::format_double(0.1) == "0.1");
}
