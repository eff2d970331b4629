#include "qtflux/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "qtflux/cayley.hpp"
#include "qtflux/dirac_point.hpp"
#include "qtflux/errors.hpp"
#include "qtflux/schrodinger_dilation.hpp"
#include "qtflux/unitary_engine.hpp"

namespace qtflux::verify {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

ComplexMatrix random_complex(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal;
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(i, j) = {re, im};
    }
  }
  return m;
}

DensitySpec bias_leads() { return DensitySpec::fermi_dirac_per_lead(2.0, {1.5, -0.5}); }

// 1. ‖S*S − I‖ on both rays for random Dirac interactions.
CheckResult dirac_unitarity(const Options& o) {
  std::mt19937_64 rng(o.seed);
  double worst = 0.0;
  for (int draw = 0; draw < 20; ++draw) {
    dirac::DiracSpec spec;
    spec.a = uniform(rng, 0.1, 3.0);
    spec.b_minus = uniform(rng, -5.0, 5.0);
    spec.b_plus = uniform(rng, -5.0, 5.0);
    spec.r = std::polar(uniform(rng, 0.0, 5.0), uniform(rng, 0.0, kTwoPi));
    for (int i = 0; i < 500; ++i) {
      // distance to the gap edge from 1e−8·a to 1e4·a
      const double lambda = spec.a * (1.0 + std::pow(10.0, -8.0 + 12.0 * i / 499.0));
      for (double sign : {1.0, -1.0}) {
        worst = std::max(worst, linops::unitarity_residual(dirac::s_matrix(spec, sign * lambda)));
      }
    }
  }
  return {1, "Dirac unitarity", worst <= 1e-12, "max ‖S*S − I‖ = " + fmt(worst), 0.0};
}

// 2. b± = 0 against the closed form, and the |r| = 1 maximum.
CheckResult dirac_special_case(const Options&) {
  const double a = 1.0;
  const DensitySpec leads = bias_leads();
  double worst = 0.0;
  for (double r : {0.1, 0.5, 1.0, 2.0, 10.0}) {
    const dirac::DiracSpec spec{a, 0.0, 0.0, Complex(r, 0.0)};
    const double j = dirac::model_current(spec, leads, dirac::Lead::minus).lb.value;
    worst = std::max(worst, relative(j, dirac::decoupled_bias_current(a, r, 2.0, 1.5, -0.5)));
  }
  std::size_t argmax = 0;
  double best = -1.0;
  for (std::size_t i = 1; i <= 50; ++i) {
    const double r = static_cast<double>(i) / 20.0;
    const dirac::DiracSpec spec{a, 0.0, 0.0, Complex(r, 0.0)};
    const double j = dirac::model_current(spec, leads, dirac::Lead::minus).lb.value;
    if (j > best) {
      best = j;
      argmax = i;
    }
  }
  const double r_max = static_cast<double>(argmax) / 20.0;
  return {2, "Dirac b±=0 closed form", worst <= 1e-6 && argmax == 20,
          "max rel err = " + fmt(worst) + ", sweep maximum at |r| = " + std::to_string(r_max), 0.0};
}

// 3. J(0) = 0 and decay as |r| → ∞.
CheckResult dirac_limits(const Options&) {
  const DensitySpec leads = bias_leads();
  auto current = [&](double r) {
    return dirac::model_current(dirac::DiracSpec{1.0, 0.0, 0.0, Complex(r, 0.0)}, leads,
                                dirac::Lead::minus);
  };
  const auto j0 = current(0.0);
  const double j1 = current(1.0).lb.value;
  const double jbig = current(1e3).lb.value;
  const bool ok = j0.direct == 0.0 && std::abs(j0.lb.value) <= 1e-15 &&
                  std::abs(jbig) <= 1e-4 * std::abs(j1);
  return {3, "Dirac limits", ok,
          "J(0) = " + fmt(j0.direct) + " (cross section), " + fmt(j0.lb.value) +
              " (trace route); |J(1e3)|/|J(1)| = " + fmt(std::abs(jbig) / std::abs(j1)),
          0.0};
}

// 4. ρ = f(λ)·I gives zero current for both models.
CheckResult equilibrium(const Options&) {
  const DensitySpec eq = DensitySpec::equilibrium(2.0, 0.3, 2);
  const dirac::DiracSpec dspec{1.0, 0.7, -1.3, Complex(0.8, 0.4)};
  const auto jd = dirac::model_current(dspec, eq, dirac::Lead::minus);
  schrodinger::SampleSpec sspec;
  sspec.potential = schrodinger::Profile::piecewise_constant({0.3, 0.6}, {0.0, 2.0, -1.0});
  const auto js = schrodinger::model_current(sspec, eq, schrodinger::Charge::a);
  const double worst = std::max({std::abs(jd.lb.value), std::abs(jd.direct), std::abs(js.lb.value),
                                 std::abs(js.direct)});
  return {4, "equilibrium zero current", worst <= 1e-10, "max |J| = " + fmt(worst), 0.0};
}

schrodinger::SampleSpec random_sample(std::mt19937_64& rng) {
  schrodinger::SampleSpec s;
  s.a = 0.0;
  s.b = uniform(rng, 0.5, 2.0);
  const int pieces = 2 + static_cast<int>(rng() % 3);
  std::vector<double> breaks;
  for (int i = 1; i < pieces; ++i) breaks.push_back(s.b * i / pieces);
  std::vector<double> masses;
  std::vector<double> potentials;
  for (int i = 0; i < pieces; ++i) {
    masses.push_back(uniform(rng, 0.3, 1.5));
    potentials.push_back(uniform(rng, -3.0, 3.0));
  }
  s.mass = schrodinger::Profile::piecewise_constant(breaks, masses);
  s.potential = schrodinger::Profile::piecewise_constant(breaks, potentials);
  s.kappa_a = {uniform(rng, -1.0, 1.0), uniform(rng, 0.1, 1.0)};
  s.kappa_b = {uniform(rng, -1.0, 1.0), uniform(rng, 0.1, 1.0)};
  return s;
}

// 5. (|θ_b|² + α_b²α_a²)/|W|² = 1 on the default grid.
CheckResult schrodinger_unitarity(const Options& o) {
  std::mt19937_64 rng(o.seed + 5);
  std::vector<schrodinger::SampleSpec> specs{schrodinger::SampleSpec{}};
  for (int i = 0; i < 5; ++i) specs.push_back(random_sample(rng));
  double worst = 0.0;
  double worst_unnormalized = 0.0;
  for (const auto& spec : specs) {
    const double aa = spec.alpha_a() * spec.alpha_a();
    const double ab = spec.alpha_b() * spec.alpha_b();
    for (double lambda : schrodinger::default_energy_grid(spec)) {
      const auto sd = schrodinger::scattering_matrix(spec, lambda);
      const double sum = std::norm(sd.theta_b) + ab * aa;
      worst = std::max(worst, std::abs(sum / std::norm(sd.w) - 1.0));
      worst_unnormalized = std::max(worst_unnormalized, std::abs(sum - 1.0));
    }
  }
  return {5, "Schrodinger unitarity identity", worst <= 1e-8,
          "max |(|θ_b|² + α_b²α_a²)/|W|² − 1| = " + fmt(worst) +
              " (without the 1/|W|² normalization: " + fmt(worst_unnormalized) + ")",
          0.0};
}

// 6. LB route vs direct route, and Q_a + Q_b completeness.
CheckResult schrodinger_two_path(const Options& o) {
  std::mt19937_64 rng(o.seed + 6);
  std::vector<schrodinger::SampleSpec> specs{schrodinger::SampleSpec{}, random_sample(rng)};
  DensitySpec density = DensitySpec::fermi_dirac_per_lead(2.0, {1.0, -0.5});
  const auto leads = density.leads;
  density.tau = [leads](double lambda) {
    return Complex(0.3, 0.2) * std::sqrt(leads[0](lambda) * leads[1](lambda));
  };
  const QuadratureSpec quad;
  double gap = 0.0;
  double completeness = 0.0;
  for (const auto& spec : specs) {
    const auto ja = schrodinger::model_current(spec, density, schrodinger::Charge::a, quad);
    const auto jb = schrodinger::model_current(spec, density, schrodinger::Charge::b, quad);
    gap = std::max({gap, ja.relative_gap, jb.relative_gap});
    completeness = std::max(
        completeness, std::abs(ja.lb.value + jb.lb.value) / (std::abs(ja.lb.value) + quad.tol));
  }
  return {6, "Schrodinger two-path equality", gap <= 1e-8 && completeness <= 1e-8,
          "max relative gap = " + fmt(gap) + ", |J_a + J_b|/(|J_a| + tol) = " + fmt(completeness),
          0.0};
}

// 7. |J| < (1/2π)∫tr ρ for random compactly supported densities.
CheckResult current_bound(const Options& o) {
  std::mt19937_64 rng(o.seed + 7);
  double worst_ratio = 0.0;
  bool ok = true;
  for (int draw = 0; draw < 20; ++draw) {
    std::vector<Occupation> occ;
    double mass = 0.0;
    for (int lead = 0; lead < 2; ++lead) {
      const double lo = uniform(rng, -6.0, 4.0);
      const double hi = lo + uniform(rng, 0.5, 4.0);
      const double h = uniform(rng, 0.05, 1.0);
      occ.push_back(Occupation::box(lo, hi, h));
      mass += (hi - lo) * h;
    }
    DensitySpec density = DensitySpec::tabulated(occ);
    double j = 0.0;
    if (draw % 2 == 0) {
      const dirac::DiracSpec spec{uniform(rng, 0.2, 2.0), uniform(rng, -2.0, 2.0),
                                  uniform(rng, -2.0, 2.0),
                                  std::polar(uniform(rng, 0.2, 3.0), uniform(rng, 0.0, kTwoPi))};
      const dirac::DiracModel model(spec, density, draw % 4 == 0 ? dirac::Lead::minus : dirac::Lead::plus);
      j = lb_current(model).value;
    } else {
      const double frac = uniform(rng, -1.0, 1.0);
      density.tau = [occ, frac](double lambda) {
        return Complex(frac * std::sqrt(occ[0](lambda) * occ[1](lambda)), 0.0);
      };
      const schrodinger::SchrodingerModel model(random_sample(rng), density,
                                                draw % 4 == 1 ? schrodinger::Charge::a
                                                              : schrodinger::Charge::b);
      j = lb_current(model).value;
    }
    const double bound = mass / kTwoPi;
    ok = ok && std::abs(j) < bound;
    worst_ratio = std::max(worst_ratio, std::abs(j) / bound);
  }
  return {7, "current bound", ok, "max |J|/bound = " + fmt(worst_ratio), 0.0};
}

// 8. Circle picture vs line picture, and dν pullback consistency.
CheckResult cayley_bridge(const Options&) {
  const DensitySpec leads = bias_leads();
  const dirac::DiracSpec spec{1.0, 0.4, -0.9, Complex(1.2, -0.5)};
  const dirac::DiracModel model(spec, leads, dirac::Lead::minus);
  const double line = lb_current_renormalized(model, leads.leads[1]).value;
  const double circle =
      cayley::circle_current(cayley::transport_fibers(model, leads.leads[1])).value;
  const double bridge = relative(circle, line);

  const std::vector<std::function<double(Complex)>> tests = {
      [](Complex) { return 1.0; },
      [](Complex z) { return (z * z).real(); },
      [](Complex z) { return z.imag() * z.imag(); },
      [](Complex z) { return std::exp(z.real()); },
      [](Complex z) { return 1.0 / (2.0 - z.real()); },
      [](Complex z) { return std::norm(z - 0.5); },
      [](Complex z) { return 1.0 + std::cos(3.0 * std::arg(z)); },
      [](Complex z) { return std::pow(z.real(), 4); },
      [](Complex z) { return std::log(3.0 + z.imag()); },
      [](Complex z) { return 1.0 / (1.5 + z.imag()); },
  };
  double measure = 0.0;
  for (const auto& g : tests) {
    const double c = cayley::integrate_circle(g);
    const double l = cayley::integrate_line_pullback(g);
    measure = std::max(measure, std::abs(c - l) / std::max(1.0, std::abs(c)));
  }
  return {8, "Cayley bridge", bridge <= 1e-6 && measure <= 1e-10,
          "circle/line rel err = " + fmt(bridge) + ", max measure mismatch = " + fmt(measure), 0.0};
}

// 9. |J(r) − J_fiber| along the (N, r) ladder.
CheckResult engine_ladder(const Options& o) {
  const std::vector<std::pair<std::size_t, double>> ladder{{256, 0.9}, {1024, 0.99}, {4096, 0.999}};
  bool ok = true;
  std::ostringstream detail;
  for (std::uint64_t i = 0; i < 5; ++i) {
    double previous = INFINITY;
    detail << (i ? "; " : "") << "seed+" << i << ":";
    for (const auto& [n, r] : ladder) {
      const engine::TorusModel model(engine::random_torus_spec(n, 2, 2, 2, o.seed + i));
      const double fiber = model.fiber_current().value;
      const double abel = model.abel_current(r, engine::AbelSummation::resolvent, {}, o.threads).value;
      const double diff = std::abs(abel - fiber);
      ok = ok && diff < previous;
      previous = diff;
      const double scale = std::abs(fiber);
      detail << " " << fmt(scale > 1e-8 ? diff / scale : diff) << " (r^N " << fmt(std::pow(r, static_cast<double>(n))) << ")";
      if (n == ladder.back().first) ok = ok && (diff <= 0.05 * scale || diff <= 1e-8);
    }
  }
  return {9, "unitary engine ladder", ok, "relative discrepancy " + detail.str(), 0.0};
}

// 10. Charge on the pure-point block leaves the Abel current unchanged.
CheckResult singular_part(const Options& o) {
  const std::vector<std::pair<std::size_t, double>> ladder{{256, 0.9}, {1024, 0.99}, {4096, 0.999}};
  bool ok = true;
  double previous = INFINITY;
  std::ostringstream detail;
  detail << "relative change";
  for (const auto& [n, r] : ladder) {
    const engine::TorusModel model(pure_point_reference_spec(n, o.seed));
    const auto res = engine::singular_part_test(model, r, o.threads);
    ok = ok && res.relative_difference < previous;
    previous = res.relative_difference;
    if (n == 1024) ok = ok && res.relative_difference <= 0.05;
    detail << " " << fmt(res.relative_difference) << " at (" << n << ", " << r << ")";
  }
  return {10, "singular part non-contribution", ok, detail.str(), 0.0};
}

// 11. (2π/N)Σ‖T_k‖₁ ≤ 1.1·‖V‖₁.
CheckResult trace_bound(const Options& o) {
  const engine::TorusModel model(engine::random_torus_spec(4096, 2, 2, 2, o.seed));
  const double sum = model.trace_sum();
  const double v = model.v_trace_norm();
  return {11, "trace bound", sum <= 1.1 * v, "Σ‖T_k‖₁ = " + fmt(sum) + ", ‖V‖₁ = " + fmt(v), 0.0};
}

// 12. Cesàro average against the spectral average.
CheckResult cesaro(const Options& o) {
  std::mt19937_64 rng(o.seed + 12);
  const ComplexMatrix k = random_complex(rng, 8, 8);
  const ComplexMatrix h = 0.5 * (k + k.adjoint());
  const ComplexMatrix b = random_complex(rng, 8, 8);
  ComplexMatrix rho0 = b * b.adjoint();
  rho0 /= rho0.trace().real();
  const ComplexMatrix avg = engine::spectral_average(h, rho0);
  bool ok = true;
  double gap = 0.0;
  double worst_ratio = 0.0;
  for (double scale : {1e2, 1e4, 1e6}) {
    const auto first = engine::cesaro_state(h, rho0, 1.0);
    gap = first.min_gap;
    const double t = scale / gap;
    const auto res = engine::cesaro_state(h, rho0, t);
    const double err = linops::op_norm(res.state - avg);
    const double bound = 10.0 / (t * gap);
    ok = ok && err <= bound;
    worst_ratio = std::max(worst_ratio, err / bound);
  }
  const double comm_avg = linops::op_norm(linops::commutator(h, avg));
  const auto late = engine::cesaro_state(h, rho0, 1e12 / gap);
  const double comm_late = linops::op_norm(linops::commutator(h, late.state));
  ok = ok && comm_avg <= 1e-10 && comm_late <= 1e-10;
  return {12, "Cesaro steady state", ok,
          "max err/bound = " + fmt(worst_ratio) + ", ‖[H, avg]‖ = " + fmt(comm_avg) +
              ", ‖[H, ρ_T]‖ at T = 1e12/gap: " + fmt(comm_late),
          0.0};
}

struct Entry {
  int id;
  const char* name;
  double budget_seconds;  // 0 = no runtime requirement
  CheckResult (*run)(const Options&);
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      {1, "Dirac unitarity", 1.0, dirac_unitarity},
      {2, "Dirac b±=0 closed form", 5.0, dirac_special_case},
      {3, "Dirac limits", 0.0, dirac_limits},
      {4, "equilibrium zero current", 2.0, equilibrium},
      {5, "Schrodinger unitarity identity", 0.0, schrodinger_unitarity},
      {6, "Schrodinger two-path equality", 0.0, schrodinger_two_path},
      {7, "current bound", 0.0, current_bound},
      {8, "Cayley bridge", 0.0, cayley_bridge},
      {9, "unitary engine ladder", 60.0, engine_ladder},
      {10, "singular part non-contribution", 0.0, singular_part},
      {11, "trace bound", 0.0, trace_bound},
      {12, "Cesaro steady state", 0.0, cesaro},
  };
  return entries;
}

}  // namespace

engine::TorusSpec pure_point_reference_spec(std::size_t grid, std::uint64_t seed, double pp_charge) {
  engine::TorusSpec spec = engine::random_torus_spec(grid, 2, 2, 2, seed);
  std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
  Eigen::HouseholderQR<ComplexMatrix> qr(random_complex(rng, 2, 2));
  const ComplexMatrix q = qr.householderQ();
  const ComplexMatrix phases = linops::diagonal({kPi / 2.0, -2.0});
  spec.mixing = q * phases * q.adjoint();
  spec.mixing = 0.5 * (spec.mixing + spec.mixing.adjoint());
  spec.density = [](Complex zeta) {
    const double t = std::arg(zeta);
    return linops::diagonal({1.0 - 0.2 * std::cos(t), 0.1 + 0.05 * std::sin(t)});
  };
  engine::PurePointBlock pp;
  pp.eigenvalues = {Complex(1.0, 0.0)};
  pp.coupling = ComplexMatrix(1, 2);
  pp.coupling << Complex(0.6, 0.2), Complex(0.0, -0.3);
  pp.charge = linops::diagonal({pp_charge});
  pp.density = linops::diagonal({0.8});
  spec.pure_point = pp;
  return spec;
}

std::vector<int> check_ids(Level level) {
  std::vector<int> ids;
  for (const auto& e : registry()) {
    if (level == Level::full || (e.id != 9 && e.id != 10)) ids.push_back(e.id);
  }
  return ids;
}

CheckResult run_check(int id, const Options& options) {
  for (const auto& e : registry()) {
    if (e.id != id) continue;
    const auto start = Clock::now();
    CheckResult result;
    try {
      result = e.run(options);
    } catch (const std::exception& ex) {
      result = {e.id, e.name, false, std::string("exception: ") + ex.what(), 0.0};
    }
    result.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (e.budget_seconds > 0.0) {
      result.detail += "; runtime " + fmt(result.seconds) + " s (budget " + fmt(e.budget_seconds) + " s)";
      if (result.seconds > e.budget_seconds) result.passed = false;
    }
    return result;
  }
  raise(ErrorCode::InvalidArgument, "unknown check id " + std::to_string(id));
}

std::vector<CheckResult> run_all(const Options& options) {
  std::vector<CheckResult> out;
  for (int id : check_ids(options.level)) out.push_back(run_check(id, options));
  return out;
}

}  // namespace qtflux::verify
