#include "qtflux/schrodinger_dilation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qtflux/errors.hpp"

namespace qtflux::schrodinger {

// ---------------------------------------------------------------- profiles

Profile Profile::constant(double value) {
  Profile p;
  p.kind_ = Kind::constant;
  p.values_ = {value};
  return p;
}

Profile Profile::piecewise_constant(std::vector<double> breaks, std::vector<double> values) {
  if (values.size() != breaks.size() + 1) {
    raise(ErrorCode::InvalidArgument, "piecewise-constant profile needs breaks + 1 values");
  }
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i] < breaks[i + 1])) {
      raise(ErrorCode::InvalidArgument, "profile breakpoints must be strictly increasing");
    }
  }
  Profile p;
  p.kind_ = Kind::piecewise;
  p.breaks_ = std::move(breaks);
  p.values_ = std::move(values);
  return p;
}

Profile Profile::closed_form(const std::string& name, std::vector<double> params) {
  std::size_t need = 0;
  if (name == "gaussian" || name == "cosine") {
    need = 4;
  } else if (name == "linear") {
    need = 2;
  } else {
    raise(ErrorCode::InvalidArgument, "unknown closed-form profile '" + name + "'");
  }
  if (params.size() != need) {
    std::ostringstream msg;
    msg << "profile '" << name << "' expects " << need << " parameters";
    raise(ErrorCode::InvalidArgument, msg.str());
  }
  if (name == "gaussian" && !(params[3] > 0.0)) {
    raise(ErrorCode::InvalidArgument, "gaussian profile width must be > 0");
  }
  Profile p;
  p.kind_ = Kind::closed;
  p.name_ = name;
  p.values_ = std::move(params);
  return p;
}

double Profile::operator()(double x) const {
  switch (kind_) {
    case Kind::constant: return values_[0];
    case Kind::piecewise: {
      const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
      return values_[static_cast<std::size_t>(it - breaks_.begin())];
    }
    case Kind::closed: break;
  }
  const auto& v = values_;
  if (name_ == "gaussian") {
    const double t = (x - v[2]) / v[3];
    return v[0] + v[1] * std::exp(-t * t);
  }
  if (name_ == "linear") return v[0] + v[1] * x;
  return v[0] + v[1] * std::cos(v[2] * x + v[3]);
}

std::pair<double, double> Profile::range(double a, double b) const {
  double lo = (*this)(a);
  double hi = lo;
  auto take = [&](double x) {
    const double v = (*this)(x);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  };
  if (kind_ == Kind::closed) {
    constexpr int kSamples = 2000;
    for (int i = 0; i <= kSamples; ++i) take(a + (b - a) * i / kSamples);
  } else {
    take(b);
    for (double x : breaks_) {
      if (x > a && x < b) {
        take(std::nextafter(x, a));
        take(x);
      }
    }
  }
  return {lo, hi};
}

// ---------------------------------------------------------------- sample spec

namespace {

double alpha_of(Complex kappa) { return std::sqrt(2.0 * kappa.imag()); }

}  // namespace

void SampleSpec::validate() const {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
    raise(ErrorCode::InvalidArgument, "sample needs finite a < b");
  }
  const auto [m_min, m_max] = mass.range(a, b);
  if (!(m_min > 0.0) || !std::isfinite(m_max)) {
    raise(ErrorCode::InvalidArgument, "effective mass must be positive and bounded on [a, b]");
  }
  const auto [v_min, v_max] = potential.range(a, b);
  if (!std::isfinite(v_min) || !std::isfinite(v_max)) {
    raise(ErrorCode::InvalidArgument, "potential must be bounded on [a, b]");
  }
  if (kappa_a.imag() < 0.0 || kappa_b.imag() < 0.0) {
    raise(ErrorCode::InvalidArgument, "boundary parameters need Im κ >= 0");
  }
  if (!(ode_tol > 0.0)) raise(ErrorCode::InvalidArgument, "ode_tol must be > 0");
}

double SampleSpec::alpha_a() const { return alpha_of(kappa_a); }
double SampleSpec::alpha_b() const { return alpha_of(kappa_b); }

std::vector<double> SampleSpec::interior_breakpoints() const {
  std::vector<double> out;
  for (const Profile* p : {&mass, &potential}) {
    for (double x : p->breakpoints()) {
      if (x > a && x < b) out.push_back(x);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------- integrator

namespace {

using State = std::array<Complex, 2>;
using Mat2 = std::array<Complex, 4>;  // row-major [[0, 1], [2, 3]]

// Generator of (v, p)' for l(v) = z v with p = v'/(2m).
Mat2 generator(const SampleSpec& spec, double x, Complex z) {
  return {Complex(0.0), Complex(2.0 * spec.mass(x)), spec.potential(x) - z, Complex(0.0)};
}

// exp of a traceless 2×2 matrix: cosh(s) I + sinh(s)/s Ω with s² = −det Ω.
Mat2 expm_traceless(const Mat2& om) {
  const Complex s2 = om[0] * om[0] + om[1] * om[2];
  Complex c;
  Complex sh;
  if (std::abs(s2) < 1e-6) {
    c = 1.0 + s2 / 2.0 + s2 * s2 / 24.0 + s2 * s2 * s2 / 720.0;
    sh = 1.0 + s2 / 6.0 + s2 * s2 / 120.0 + s2 * s2 * s2 / 5040.0;
  } else {
    const Complex s = std::sqrt(s2);
    c = std::cosh(s);
    sh = std::sinh(s) / s;
  }
  return {c + sh * om[0], sh * om[1], sh * om[2], c + sh * om[3]};
}

// One fourth-order Magnus step of signed length h from x.
State magnus_step(const SampleSpec& spec, Complex z, double x, double h, const State& y) {
  constexpr double kOffset = 0.28867513459481288225;  // √3/6
  const Mat2 a1 = generator(spec, x + (0.5 - kOffset) * h, z);
  const Mat2 a2 = generator(spec, x + (0.5 + kOffset) * h, z);
  // [A2, A1] for A = [[0, m], [w, 0]] is diag(m2 w1 − w2 m1, w2 m1 − m2 w1).
  const Complex comm = a2[1] * a1[2] - a2[2] * a1[1];
  const double c = std::sqrt(3.0) / 12.0 * h * h;
  Mat2 om{c * comm, 0.5 * h * (a1[1] + a2[1]), 0.5 * h * (a1[2] + a2[2]), -c * comm};
  const Mat2 e = expm_traceless(om);
  return {e[0] * y[0] + e[1] * y[1], e[2] * y[0] + e[3] * y[1]};
}

double step_error(const State& coarse, const State& fine, double tol) {
  double err = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double scale = tol * (1.0 + std::abs(fine[i]));
    err = std::max(err, std::abs(coarse[i] - fine[i]) / (15.0 * scale));
  }
  return err;
}

// Integrates from x0 to x1 (either direction), stopping exactly at the
// coefficient breakpoints. Appends accepted nodes/states.
void propagate(const SampleSpec& spec, Complex z, double x0, double x1, State y,
               std::vector<double>& nodes, std::vector<State>& states) {
  const double dir = x1 > x0 ? 1.0 : -1.0;
  std::vector<double> stops = spec.interior_breakpoints();
  if (dir < 0) std::reverse(stops.begin(), stops.end());
  stops.push_back(x1);
  const double min_step = 1e-14 * (spec.b - spec.a);
  const bool exact = spec.mass.piecewise_constant_kind() && spec.potential.piecewise_constant_kind();

  nodes.push_back(x0);
  states.push_back(y);
  double x = x0;
  for (double stop : stops) {
    if ((stop - x) * dir <= 0.0) continue;
    double h = exact ? stop - x : dir * std::min(std::abs(stop - x), 0.05 * (spec.b - spec.a));
    while ((stop - x) * dir > 0.0) {
      if (std::abs(h) >= std::abs(stop - x)) h = stop - x;
      const State coarse = magnus_step(spec, z, x, h, y);
      const State half = magnus_step(spec, z, x, 0.5 * h, y);
      const State fine = magnus_step(spec, z, x + 0.5 * h, 0.5 * h, half);
      const double err = step_error(coarse, fine, spec.ode_tol);
      if (err <= 1.0) {
        const bool last = std::abs(stop - x - h) == 0.0;
        x = last ? stop : x + h;
        y = fine;
        nodes.push_back(x);
        states.push_back(y);
        const double grow = err == 0.0 ? 4.0 : std::min(4.0, 0.9 * std::pow(err, -0.2));
        h *= grow;
      } else {
        h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
        if (std::abs(h) < min_step) {
          std::ostringstream msg;
          msg << "step " << std::abs(h) << " below " << min_step << " at x = " << x
              << ", z = " << z;
          raise(ErrorCode::StepUnderflow, msg.str());
        }
      }
    }
  }
}

}  // namespace

ElementarySolution solve_elementary(const SampleSpec& spec, Complex z, Side side) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    raise(ErrorCode::InvalidArgument, "energy must be finite");
  }
  ElementarySolution sol;
  sol.spec_ = spec;
  sol.side_ = side;
  sol.z_ = z;
  switch (side) {
    case Side::from_a:
      propagate(spec, z, spec.a, spec.b, {1.0, -spec.kappa_a}, sol.nodes_, sol.states_);
      break;
    case Side::starred_a:
      propagate(spec, z, spec.a, spec.b, {1.0, -std::conj(spec.kappa_a)}, sol.nodes_,
                sol.states_);
      break;
    case Side::from_b:
      propagate(spec, z, spec.b, spec.a, {1.0, spec.kappa_b}, sol.nodes_, sol.states_);
      break;
    case Side::starred_b:
      propagate(spec, z, spec.b, spec.a, {1.0, std::conj(spec.kappa_b)}, sol.nodes_,
                sol.states_);
      break;
  }
  return sol;
}

std::array<Complex, 2> ElementarySolution::state(double x) const {
  if (x < spec_.a || x > spec_.b) raise(ErrorCode::InvalidArgument, "x outside [a, b]");
  const bool forward = nodes_.back() > nodes_.front();
  // last node not beyond x along the direction of integration
  std::size_t i = 0;
  if (forward) {
    i = static_cast<std::size_t>(std::upper_bound(nodes_.begin(), nodes_.end(), x) -
                                 nodes_.begin());
  } else {
    i = static_cast<std::size_t>(
        std::upper_bound(nodes_.begin(), nodes_.end(), x, std::greater<double>()) -
        nodes_.begin());
  }
  i = i == 0 ? 0 : i - 1;
  if (nodes_[i] == x) return states_[i];
  return magnus_step(spec_, z_, nodes_[i], x - nodes_[i], states_[i]);
}

Complex ElementarySolution::value(double x) const { return state(x)[0]; }
Complex ElementarySolution::quasi_derivative(double x) const { return state(x)[1]; }

// ---------------------------------------------------------------- Wronskian

namespace {

Complex wronskian_at(const ElementarySolution& va, const ElementarySolution& vb, double x) {
  return va.value(x) * vb.quasi_derivative(x) - vb.value(x) * va.quasi_derivative(x);
}

WronskianResult wronskian_from(const SampleSpec& spec, const ElementarySolution& va,
                               const ElementarySolution& vb) {
  WronskianResult out;
  const double mid = 0.5 * (spec.a + spec.b);
  out.value = wronskian_at(va, vb, mid);
  double max_abs = std::abs(out.value);
  for (int j = 1; j <= 5; ++j) {
    const double x = spec.a + (spec.b - spec.a) * j / 6.0;
    out.check_points.push_back(x);
    const Complex w = wronskian_at(va, vb, x);
    max_abs = std::max(max_abs, std::abs(w));
    out.spread = std::max(out.spread, std::abs(w - out.value));
  }
  if (out.spread > 10.0 * spec.ode_tol * std::max(max_abs, 1.0)) {
    std::ostringstream msg;
    msg << "Wronskian spread " << out.spread << " exceeds 10·ode_tol·max|W| at z = " << va.z();
    raise(ErrorCode::WronskianDrift, msg.str());
  }
  return out;
}

}  // namespace

WronskianResult wronskian(const SampleSpec& spec, Complex z) {
  spec.validate();
  const auto va = solve_elementary(spec, z, Side::from_a);
  const auto vb = solve_elementary(spec, z, Side::from_b);
  return wronskian_from(spec, va, vb);
}

// ---------------------------------------------------------------- scattering

ScatteringData scattering_matrix(const SampleSpec& spec, double lambda) {
  const auto va = solve_elementary(spec, lambda, Side::from_a);
  const auto vb = solve_elementary(spec, lambda, Side::from_b);
  ScatteringData sd;
  sd.w = wronskian_from(spec, va, vb).value;
  const double ab2 = spec.alpha_b() * spec.alpha_b();
  const double aa2 = spec.alpha_a() * spec.alpha_a();
  const double scale = 1.0 + ab2 + aa2 + std::abs(spec.kappa_a) + std::abs(spec.kappa_b);
  if (std::abs(sd.w) < 1e-12 * scale) {
    std::ostringstream msg;
    msg << "|W(λ)| = " << std::abs(sd.w) << " at λ = " << lambda;
    raise(ErrorCode::ResonantDivision, msg.str());
  }
  sd.va_at_b = va.value(spec.b);
  sd.vb_at_a = vb.value(spec.a);
  sd.theta_b = sd.w - kI * ab2 * sd.va_at_b;
  sd.theta_a = sd.w - kI * aa2 * sd.vb_at_a;
  const Complex off = kI * spec.alpha_b() * spec.alpha_a();
  sd.s.resize(2, 2);
  sd.s << sd.theta_b, off, off, sd.theta_a;
  sd.s /= sd.w;
  sd.unitarity_residual = linops::unitarity_residual(sd.s);
  return sd;
}

ComplexMatrix characteristic_function(const SampleSpec& spec, Complex z) {
  const auto va = solve_elementary(spec, z, Side::starred_a);
  const auto vb = solve_elementary(spec, z, Side::starred_b);
  const Complex w_star = wronskian_from(spec, va, vb).value;
  const double aa = spec.alpha_a();
  const double ab = spec.alpha_b();
  if (std::abs(w_star) < 1e-12 * (1.0 + aa * aa + ab * ab)) {
    std::ostringstream msg;
    msg << "|W*(z)| = " << std::abs(w_star) << " at z = " << z;
    raise(ErrorCode::ResonantDivision, msg.str());
  }
  ComplexMatrix m(2, 2);
  m << ab * ab * va.value(spec.b), -ab * aa, -ab * aa, aa * aa * vb.value(spec.a);
  return linops::identity(2) + (kI / w_star) * m;
}

ComplexMatrix charge(Charge c) {
  return c == Charge::b ? linops::diagonal({1.0, 0.0}) : linops::diagonal({0.0, 1.0});
}

// ---------------------------------------------------------------- model

SchrodingerModel::SchrodingerModel(SampleSpec spec, DensitySpec density, Charge charge)
    : spec_(std::move(spec)), density_(std::move(density)), charge_(charge) {
  spec_.validate();
  if (density_.lead_count() != 2) {
    raise(ErrorCode::FiberMismatch, "Schrödinger model needs occupations for leads b and a");
  }
}

ComplexMatrix SchrodingerModel::s_matrix(double lambda) const {
  return scattering_matrix(spec_, lambda).s;
}

ComplexMatrix SchrodingerModel::charge(double) const { return schrodinger::charge(charge_); }

ComplexMatrix SchrodingerModel::density(double lambda) const {
  density_.check_admissible(lambda);
  return density_.evaluate(lambda);
}

ComplexMatrix SchrodingerModel::density_excess(double lambda, const Occupation& reference) const {
  density_.check_admissible(lambda);
  return density_.excess(lambda, reference);
}

Fiber SchrodingerModel::fiber(double lambda) const {
  return {s_matrix(lambda), charge(lambda), density(lambda)};
}

std::vector<double> SchrodingerModel::breakpoints() const {
  std::vector<double> b = density_.breakpoints();
  b.push_back(spec_.potential.range(spec_.a, spec_.b).first);
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

double direct_integrand(const ScatteringData& sd, double alpha_a, double alpha_b,
                        double rho_b_minus_rho_a, Complex tau) {
  const double aa = alpha_a * alpha_b;
  const Complex coherent = kI * aa * (tau * sd.theta_a - std::conj(tau) * sd.theta_b);
  return (-aa * aa * rho_b_minus_rho_a + coherent.real()) / std::norm(sd.w);
}

ModelCurrent model_current(const SampleSpec& spec, const DensitySpec& density, Charge charge,
                           const QuadratureSpec& quad) {
  const SchrodingerModel model(spec, density, charge);
  ModelCurrent out;
  out.lb = lb_current_renormalized(model, density.leads[1], quad);

  QuadratureSpec direct_quad = quad;
  const auto extra = model.breakpoints();
  direct_quad.breakpoints.insert(direct_quad.breakpoints.end(), extra.begin(), extra.end());
  const double sign = charge == Charge::a ? 1.0 : -1.0;
  const double alpha_a = spec.alpha_a();
  const double alpha_b = spec.alpha_b();
  const auto direct = quadrature::integrate(
      [&](double lambda) {
        density.check_admissible(lambda);
        const ScatteringData sd = scattering_matrix(spec, lambda);
        const double diff = density.leads[0].minus(density.leads[1], lambda);
        const Complex tau = density.tau ? density.tau(lambda) : Complex(0.0);
        return sign * direct_integrand(sd, alpha_a, alpha_b, diff, tau) / kTwoPi;
      },
      model.spectral_support(), direct_quad);
  out.direct = direct.value;
  out.direct_error = direct.error_estimate;
  const double scale = std::max(std::abs(out.direct), 1e-300);
  out.relative_gap = std::abs(out.lb.value - out.direct) / scale;
  std::ostringstream msg;
  msg << "direct route " << out.direct << " (relative gap " << out.relative_gap << ")";
  out.lb.diagnostics.push_back(msg.str());
  return out;
}

std::vector<double> default_energy_grid(const SampleSpec& spec, std::size_t nodes) {
  const double v_min = spec.potential.range(spec.a, spec.b).first;
  const std::size_t linear = nodes / 2;
  const std::size_t logarithmic = nodes - linear;
  std::vector<double> grid;
  grid.reserve(nodes);
  for (std::size_t i = 0; i < linear; ++i) {
    grid.push_back(v_min - 5.0 + 10.0 * static_cast<double>(i) / static_cast<double>(linear));
  }
  const double lo = std::log(5.0);
  const double hi = std::log(50.0);
  for (std::size_t i = 0; i < logarithmic; ++i) {
    const double t = static_cast<double>(i + 1) / static_cast<double>(logarithmic);
    grid.push_back(v_min + std::exp(lo + (hi - lo) * t));
  }
  return grid;
}

}  // namespace qtflux::schrodinger
