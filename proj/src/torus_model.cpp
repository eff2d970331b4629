#include "qtflux/torus_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "qtflux/errors.hpp"

namespace qtflux::engine {

ComplexVector TrigPolynomial::operator()(Complex eta) const {
  if (coefficients.empty()) return ComplexVector();
  ComplexVector out = ComplexVector::Zero(coefficients.front().size());
  Complex power = std::pow(eta, min_degree);
  for (const ComplexVector& c : coefficients) {
    out += power * c;
    power *= eta;
  }
  return out;
}

namespace {

// Neumaier-compensated complex accumulator.
struct CompensatedSum {
  Complex sum{0.0, 0.0};
  Complex comp{0.0, 0.0};

  static void add_part(double& s, double& c, double v) {
    const double t = s + v;
    if (std::abs(s) >= std::abs(v)) {
      c += (s - t) + v;
    } else {
      c += (v - t) + s;
    }
    s = t;
  }

  void add(Complex v) {
    double sr = sum.real(), si = sum.imag(), cr = comp.real(), ci = comp.imag();
    add_part(sr, cr, v.real());
    add_part(si, ci, v.imag());
    sum = {sr, si};
    comp = {cr, ci};
  }

  Complex value() const { return sum + comp; }
};

template <typename F>
void parallel_for(std::size_t count, unsigned threads, F&& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      for (std::size_t i = t; i < count; i += threads) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

TorusModel::TorusModel(TorusSpec spec) : spec_(std::move(spec)) {
  const std::size_t n_grid = spec_.grid;
  const auto d = static_cast<Eigen::Index>(spec_.fiber_dim);
  const auto p = static_cast<Eigen::Index>(spec_.couplings.size());
  if (n_grid < 4 || d < 1 || p < 1) {
    raise(ErrorCode::InvalidArgument, "torus model needs N >= 4, d >= 1 and at least one coupling");
  }
  if (spec_.mixing.rows() != p || spec_.mixing.cols() != p) {
    raise(ErrorCode::InvalidArgument, "mixing matrix must be p × p");
  }
  linops::require_hermitian(spec_.mixing, "torus mixing");
  if (!spec_.charge || !spec_.density) {
    raise(ErrorCode::InvalidArgument, "torus model needs charge and density fiber functions");
  }

  int dmin = spec_.couplings.front().min_degree;
  int dmax = spec_.couplings.front().max_degree();
  for (const auto& c : spec_.couplings) {
    if (c.coefficients.empty()) raise(ErrorCode::InvalidArgument, "empty coupling polynomial");
    for (const auto& v : c.coefficients) {
      if (v.size() != d) raise(ErrorCode::FiberMismatch, "coupling coefficient size != d");
    }
    dmin = std::min(dmin, c.min_degree);
    dmax = std::max(dmax, c.max_degree());
  }
  // x*x has degrees up to ±(dmax + 1 − dmin); the grid must resolve them.
  if (dmax + 1 - dmin >= static_cast<int>(n_grid)) {
    raise(ErrorCode::InvalidArgument, "coupling degree span must stay below the grid size");
  }

  Eigen::Index s = 0;
  ComplexMatrix pp_coupling;
  if (spec_.pure_point) {
    const auto& pp = *spec_.pure_point;
    s = static_cast<Eigen::Index>(pp.eigenvalues.size());
    if (pp.coupling.rows() != s || pp.coupling.cols() != p || pp.charge.rows() != s ||
        pp.charge.cols() != s || pp.density.rows() != s || pp.density.cols() != s) {
      raise(ErrorCode::FiberMismatch, "pure-point block dimensions inconsistent");
    }
    for (Complex u : pp.eigenvalues) {
      if (std::abs(std::abs(u) - 1.0) > 1e-14) {
        raise(ErrorCode::InvalidArgument, "pure-point eigenvalues must have unit modulus");
      }
    }
    pp_eigs_ = pp.eigenvalues;
    pp_coupling = pp.coupling;
  } else {
    pp_coupling = ComplexMatrix::Zero(0, p);
  }

  // Coupling coefficients per degree, d × p.
  const int n_deg = dmax - dmin + 1;
  std::vector<ComplexMatrix> f_hat(static_cast<std::size_t>(n_deg), ComplexMatrix::Zero(d, p));
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto& c = spec_.couplings[static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < c.coefficients.size(); ++i) {
      f_hat[static_cast<std::size_t>(c.min_degree - dmin) + i].col(j) = c.coefficients[i];
    }
  }
  ComplexMatrix gram = pp_coupling.adjoint() * pp_coupling;
  for (const auto& f : f_hat) gram += f.adjoint() * f;
  const linops::HermitianEigen geig = linops::hermitian_eig(gram);
  if (geig.values(0) <= 1e-12 * geig.values(geig.values.size() - 1)) {
    raise(ErrorCode::Singular, "coupling vectors are linearly dependent");
  }
  const ComplexMatrix b = linops::hermitian_function(
      gram, std::function<double(double)>([](double x) { return 1.0 / std::sqrt(x); }));
  std::vector<ComplexMatrix> psi_hat;
  for (const auto& f : f_hat) psi_hat.push_back(f * b);
  const ComplexMatrix psi_pp = pp_coupling * b;

  w_ = linops::hermitian_function(
      spec_.mixing, std::function<Complex(double)>([](double x) { return std::exp(kI * x) - 1.0; }));

  // [L R] per degree on [dmin, dmax + 1], with L = ηψ and R = ψ.
  const int lr_deg = n_deg + 1;
  std::vector<ComplexMatrix> lr_hat(static_cast<std::size_t>(lr_deg), ComplexMatrix::Zero(d, 2 * p));
  for (int i = 0; i < n_deg; ++i) {
    lr_hat[static_cast<std::size_t>(i + 1)].leftCols(p) = psi_hat[static_cast<std::size_t>(i)];
    lr_hat[static_cast<std::size_t>(i)].rightCols(p) = psi_hat[static_cast<std::size_t>(i)];
  }
  ComplexMatrix lr_pp(s, 2 * p);
  for (Eigen::Index i = 0; i < s; ++i) {
    lr_pp.row(i).head(p) = pp_eigs_[static_cast<std::size_t>(i)] * psi_pp.row(i);
    lr_pp.row(i).tail(p) = psi_pp.row(i);
  }
  ComplexMatrix gram2 = lr_pp.adjoint() * lr_pp;
  for (const auto& f : lr_hat) gram2 += f.adjoint() * f;
  const linops::HermitianEigen eig2 = linops::hermitian_eig(gram2);
  const double top = eig2.values(eig2.values.size() - 1);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < eig2.values.size(); ++i) {
    if (eig2.values(i) > 1e-12 * top) keep.push_back(i);
  }
  const auto m = static_cast<Eigen::Index>(keep.size());
  ComplexMatrix basis(2 * p, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const Eigen::Index i = keep[static_cast<std::size_t>(j)];
    basis.col(j) = eig2.vectors.col(i) / std::sqrt(eig2.values(i));
  }
  x_min_degree_ = dmin;
  for (const auto& f : lr_hat) x_coeffs_.push_back(f * basis);
  x_pp_ = lr_pp * basis;
  const ComplexMatrix xl = basis.adjoint() * gram2.leftCols(p);
  const ComplexMatrix xr = basis.adjoint() * gram2.rightCols(p);
  v_ = xl * w_ * xr.adjoint();
  const Factorization fac = factorize(v_);
  c_ = fac.c;
  g_ = fac.g;

  a_coeffs_.assign(static_cast<std::size_t>(lr_deg), ComplexMatrix::Zero(m, m));
  for (int j = 0; j < lr_deg; ++j) {
    for (int l = j; l < lr_deg; ++l) {
      a_coeffs_[static_cast<std::size_t>(l - j)] +=
          x_coeffs_[static_cast<std::size_t>(j)].adjoint() * x_coeffs_[static_cast<std::size_t>(l)];
    }
  }

  // Discrete vectors on the grid.
  const auto total = static_cast<Eigen::Index>(dim());
  x_grid_.resize(total, m);
  psi_.resize(total, p);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n_grid));
  for (std::size_t k = 0; k < n_grid; ++k) {
    const Complex z = grid_point(k);
    ComplexMatrix xv = ComplexMatrix::Zero(d, m);
    ComplexMatrix pv = ComplexMatrix::Zero(d, p);
    for (int i = 0; i < lr_deg; ++i) {
      const int deg = dmin + i;
      const Complex ph = grid_point(static_cast<std::size_t>(
          ((static_cast<long long>(deg) * static_cast<long long>(k)) % static_cast<long long>(n_grid) +
           static_cast<long long>(n_grid)) % static_cast<long long>(n_grid)));
      xv += ph * x_coeffs_[static_cast<std::size_t>(i)];
      if (i < n_deg) pv += ph * psi_hat[static_cast<std::size_t>(i)];
    }
    (void)z;
    x_grid_.middleRows(static_cast<Eigen::Index>(k) * d, d) = inv_sqrt_n * xv;
    psi_.middleRows(static_cast<Eigen::Index>(k) * d, d) = inv_sqrt_n * pv;
  }
  if (s > 0) {
    x_grid_.bottomRows(s) = x_pp_;
    psi_.bottomRows(s) = psi_pp;
  }
}

Complex TorusModel::grid_point(std::size_t k) const {
  return std::polar(1.0, kTwoPi * static_cast<double>(k % spec_.grid) / static_cast<double>(spec_.grid));
}

double TorusModel::v_trace_norm() const { return linops::trace_norm(v_); }

ComplexMatrix TorusModel::row_block(const ComplexMatrix& tall, std::size_t k) const {
  const auto d = static_cast<Eigen::Index>(spec_.fiber_dim);
  return tall.middleRows(static_cast<Eigen::Index>(k) * d, d);
}

ComplexMatrix TorusModel::x_at(Complex eta) const {
  const auto d = static_cast<Eigen::Index>(spec_.fiber_dim);
  ComplexMatrix out = ComplexMatrix::Zero(d, v_.rows());
  Complex power = std::pow(eta, x_min_degree_);
  for (const auto& c : x_coeffs_) {
    out += power * c;
    power *= eta;
  }
  return out;
}

ComplexMatrix TorusModel::y_block(std::size_t k) const {
  if (k >= spec_.grid) raise(ErrorCode::InvalidArgument, "torus index out of range");
  const ComplexMatrix xk = row_block(x_grid_, k);
  const double scale = static_cast<double>(spec_.grid) / kTwoPi;
  ComplexMatrix y = scale * c_ * xk.adjoint() * xk * c_;
  return 0.5 * (y + y.adjoint());
}

ComplexMatrix TorusModel::cauchy_continuum(Complex xi) const {
  const auto m = v_.rows();
  ComplexMatrix f = ComplexMatrix::Zero(m, m);
  Complex power = 1.0;
  for (const auto& a : a_coeffs_) {
    f += power * a;
    power *= xi;
  }
  for (std::size_t i = 0; i < pp_eigs_.size(); ++i) {
    const Complex den = 1.0 - xi * std::conj(pp_eigs_[i]);
    if (std::abs(den) < 1e-13) raise(ErrorCode::Singular, "evaluation on a pure-point eigenvalue");
    const auto row = x_pp_.row(static_cast<Eigen::Index>(i));
    f += row.adjoint() * row / den;
  }
  return f;
}

ComplexMatrix TorusModel::cauchy_discrete(Complex xi) const {
  const auto m = v_.rows();
  const auto d = static_cast<Eigen::Index>(spec_.fiber_dim);
  ComplexMatrix f = ComplexMatrix::Zero(m, m);
  for (std::size_t k = 0; k < spec_.grid; ++k) {
    const Complex den = 1.0 - xi * std::conj(grid_point(k));
    const auto xk = x_grid_.middleRows(static_cast<Eigen::Index>(k) * d, d);
    f += xk.adjoint() * xk / den;
  }
  for (std::size_t i = 0; i < pp_eigs_.size(); ++i) {
    const Complex den = 1.0 - xi * std::conj(pp_eigs_[i]);
    const auto row = x_pp_.row(static_cast<Eigen::Index>(i));
    f += row.adjoint() * row / den;
  }
  return f;
}

ComplexMatrix TorusModel::z_compressed(Complex xi, FiberEvaluation mode) const {
  const ComplexMatrix f = mode == FiberEvaluation::continuum ? cauchy_continuum(xi) : cauchy_discrete(xi);
  const auto m = v_.rows();
  const ComplexMatrix phi =
      f * linops::inverse(linops::identity(m) - xi * v_.adjoint() * f);
  const ComplexMatrix gs = g_.adjoint();
  return gs + xi * gs * c_ * phi * c_ * gs;
}

FiberScattering TorusModel::fiber_scattering_at(Complex zeta, double r) const {
  if (!(r >= 0.0 && r <= 1.0)) raise(ErrorCode::InvalidArgument, "Abel parameter must lie in [0, 1]");
  const ComplexMatrix z = z_compressed(r * zeta, FiberEvaluation::continuum);
  const ComplexMatrix l = x_at(zeta) * c_ / std::sqrt(kTwoPi);
  FiberScattering out;
  out.t = kI * zeta * l * z * l.adjoint();
  out.s = linops::identity(l.rows()) - kTwoPi * kI * out.t;
  ComplexMatrix y = l.adjoint() * l;
  const ComplexMatrix root = linops::psd_sqrt(0.5 * (y + y.adjoint()));
  out.t_h = kI * zeta * root * z * root;
  return out;
}

FiberScattering TorusModel::fiber_scattering(std::size_t k, double r, FiberEvaluation mode) const {
  if (k >= spec_.grid) raise(ErrorCode::InvalidArgument, "torus index out of range");
  const Complex zeta = grid_point(k);
  if (mode == FiberEvaluation::continuum) return fiber_scattering_at(zeta, r);
  if (!(r >= 0.0 && r < 1.0)) {
    raise(ErrorCode::InvalidArgument, "discrete fiber evaluation needs r in [0, 1)");
  }
  const ComplexMatrix z = z_compressed(r * zeta, FiberEvaluation::discrete);
  const double scale = std::sqrt(static_cast<double>(spec_.grid) / kTwoPi);
  const ComplexMatrix l = scale * row_block(x_grid_, k) * c_;
  FiberScattering out;
  out.t = kI * zeta * l * z * l.adjoint();
  out.s = linops::identity(l.rows()) - kTwoPi * kI * out.t;
  const ComplexMatrix root = linops::psd_sqrt(y_block(k));
  out.t_h = kI * zeta * root * z * root;
  return out;
}

ComplexMatrix TorusModel::kernel(double r, Complex zeta, Complex xi) const {
  const ComplexMatrix z = z_compressed(r * zeta, FiberEvaluation::continuum);
  const ComplexMatrix lz = x_at(zeta) * c_ / std::sqrt(kTwoPi);
  const ComplexMatrix lx = x_at(xi) * c_ / std::sqrt(kTwoPi);
  return lz * z.adjoint() * lx.adjoint();
}

ComplexMatrix TorusModel::kernel_m(double r, Complex zeta, Complex xi, Complex zeta2) const {
  return kernel(r, zeta, xi) * spec_.charge(xi) * kernel(r, zeta2, xi).adjoint();
}

FiberCurrent TorusModel::fiber_current() const {
  CompensatedSum plain;
  CompensatedSum symmetric;
  FiberCurrent out;
  for (std::size_t k = 0; k < spec_.grid; ++k) {
    const Complex zeta = grid_point(k);
    const ComplexMatrix s = fiber_scattering(k, 1.0).s;
    const ComplexMatrix q = spec_.charge(zeta);
    const ComplexMatrix rho = spec_.density(zeta);
    plain.add((rho * (q - s.adjoint() * q * s)).trace());
    symmetric.add(((rho - s * rho * s.adjoint()) * q).trace());
    out.max_unitarity_residual = std::max(out.max_unitarity_residual, linops::unitarity_residual(s));
  }
  // (1/4π)·(2π/N)·Σ_k
  const double scale = 0.5 / static_cast<double>(spec_.grid);
  out.value = scale * plain.value().real();
  out.symmetric_form = scale * symmetric.value().real();
  return out;
}

double TorusModel::trace_sum() const {
  double sum = 0.0;
  for (std::size_t k = 0; k < spec_.grid; ++k) {
    sum += linops::trace_norm(fiber_scattering(k, 1.0).t_h);
  }
  return kTwoPi * sum / static_cast<double>(spec_.grid);
}

AbelResult TorusModel::abel_current(double r, AbelSummation method, const AbelOptions& options,
                                    unsigned threads) const {
  if (!(r >= 0.0 && r < 1.0)) raise(ErrorCode::InvalidArgument, "Abel parameter must lie in [0, 1)");
  const std::size_t n_grid = spec_.grid;
  const auto d = static_cast<Eigen::Index>(spec_.fiber_dim);
  const auto p = static_cast<Eigen::Index>(rank());
  const auto s = static_cast<Eigen::Index>(pp_dim());
  const auto total = static_cast<Eigen::Index>(dim());

  // Columns [L, R, QR, QL] with L = U₀ψ, R = ψ.
  ComplexMatrix a(total, 4 * p);
  std::vector<ComplexMatrix> rho_blocks(n_grid);
  for (std::size_t k = 0; k < n_grid; ++k) {
    const Complex zeta = grid_point(k);
    const ComplexMatrix q = spec_.charge(zeta);
    rho_blocks[k] = spec_.density(zeta);
    const ComplexMatrix psi_k = row_block(psi_, k);
    auto blk = a.middleRows(static_cast<Eigen::Index>(k) * d, d);
    blk.leftCols(p) = zeta * psi_k;
    blk.middleCols(p, p) = psi_k;
    blk.middleCols(2 * p, p) = q * psi_k;
    blk.rightCols(p) = zeta * q * psi_k;
  }
  if (s > 0) {
    const auto& pp = *spec_.pure_point;
    const ComplexMatrix psi_pp = psi_.bottomRows(s);
    ComplexMatrix u_pp = ComplexMatrix::Zero(s, s);
    for (Eigen::Index i = 0; i < s; ++i) u_pp(i, i) = pp_eigs_[static_cast<std::size_t>(i)];
    auto blk = a.bottomRows(s);
    blk.leftCols(p) = u_pp * psi_pp;
    blk.middleCols(p, p) = psi_pp;
    blk.middleCols(2 * p, p) = pp.charge * psi_pp;
    blk.rightCols(p) = pp.charge * u_pp * psi_pp;
  }

  // (Ω₋(r)* A) on the grid rows, block by block.
  ComplexMatrix oa(static_cast<Eigen::Index>(n_grid) * d, 4 * p);
  AbelResult result;

  if (method == AbelSummation::resolvent) {
    // Y_{k'} = R_{k'}* A_{k'}; the resolvent weights 1/(1 − r ζ_{k'−k}) form a circulant.
    std::vector<ComplexMatrix> y(n_grid);
    for (std::size_t k = 0; k < n_grid; ++k) {
      y[k] = row_block(psi_, k).adjoint() * a.middleRows(static_cast<Eigen::Index>(k) * d, d);
    }
    std::vector<Complex> circ(n_grid);
    for (std::size_t j = 0; j < n_grid; ++j) circ[j] = 1.0 / (1.0 - r * grid_point(j));
    parallel_for(n_grid, threads, [&](std::size_t k) {
      const Complex sk = r * std::conj(grid_point(k));
      ComplexMatrix h = ComplexMatrix::Zero(p, 4 * p);
      for (std::size_t kp = 0; kp < n_grid; ++kp) {
        h += circ[(kp + n_grid - k) % n_grid] * y[kp];
      }
      for (Eigen::Index i = 0; i < s; ++i) {
        const Complex den = 1.0 - sk * pp_eigs_[static_cast<std::size_t>(i)];
        h += psi_.row(static_cast<Eigen::Index>(n_grid) * d + i).adjoint() *
             a.row(static_cast<Eigen::Index>(n_grid) * d + i) / den;
      }
      const ComplexMatrix gk = h.leftCols(p);
      const ComplexMatrix inner =
          linops::solve(linops::identity(p) - sk * gk * w_, h);
      const auto ak = a.middleRows(static_cast<Eigen::Index>(k) * d, d);
      oa.middleRows(static_cast<Eigen::Index>(k) * d, d) = ak + sk * ak.leftCols(p) * w_ * inner;
    });
  } else {
    const std::size_t terms = abel_truncation(r, linops::op_norm(v_), options);
    result.terms = terms;
    ComplexMatrix x = a;
    ComplexMatrix sum = ComplexMatrix::Zero(oa.rows(), oa.cols());
    ComplexMatrix comp = ComplexMatrix::Zero(oa.rows(), oa.cols());
    const ComplexMatrix l = a.leftCols(p);
    const ComplexMatrix psi_adj = psi_.adjoint();
    std::vector<Complex> u0(static_cast<std::size_t>(total));
    for (std::size_t k = 0; k < n_grid; ++k) {
      for (Eigen::Index j = 0; j < d; ++j) u0[k * spec_.fiber_dim + static_cast<std::size_t>(j)] = grid_point(k);
    }
    for (Eigen::Index i = 0; i < s; ++i) u0[static_cast<std::size_t>(n_grid * spec_.fiber_dim) + static_cast<std::size_t>(i)] = pp_eigs_[static_cast<std::size_t>(i)];
    double weight = 1.0 - r;
    for (std::size_t n = 0; n <= terms; ++n) {
      for (std::size_t k = 0; k < n_grid; ++k) {
        // ζ̄_k^n from the exact table
        const Complex phase = std::conj(grid_point((k * (n % n_grid)) % n_grid));
        for (Eigen::Index j = 0; j < d; ++j) {
          const Eigen::Index row = static_cast<Eigen::Index>(k) * d + j;
          for (Eigen::Index c = 0; c < oa.cols(); ++c) {
            const Complex yv = weight * phase * x(row, c) - comp(row, c);
            const Complex t = sum(row, c) + yv;
            comp(row, c) = (t - sum(row, c)) - yv;
            sum(row, c) = t;
          }
        }
      }
      // x ← U x = U₀x + L w (ψ* x)
      const ComplexMatrix corr = l * (w_ * (psi_adj * x));
      for (Eigen::Index row = 0; row < total; ++row) {
        x.row(row) = u0[static_cast<std::size_t>(row)] * x.row(row) + corr.row(row);
      }
      weight *= r;
    }
    oa = sum;
  }

  std::vector<Complex> contrib(n_grid);
  for (std::size_t k = 0; k < n_grid; ++k) {
    const auto blk = oa.middleRows(static_cast<Eigen::Index>(k) * d, d);
    const ComplexMatrix& rho = rho_blocks[k];
    const Complex t1 = (w_ * blk.middleCols(2 * p, p).adjoint() * rho * blk.leftCols(p)).trace();
    const Complex t2 = (w_ * blk.middleCols(p, p).adjoint() * rho * blk.rightCols(p)).trace();
    contrib[k] = std::conj(grid_point(k)) * (t1 - t2);
  }
  CompensatedSum acc;
  for (const Complex& c : contrib) acc.add(c);
  const Complex j = -0.5 * acc.value();
  result.value = j.real();
  result.imaginary_part = j.imag();
  return result;
}

ComplexMatrix TorusModel::dense_u0() const {
  const auto total = static_cast<Eigen::Index>(dim());
  ComplexMatrix u0 = ComplexMatrix::Zero(total, total);
  const auto d = static_cast<Eigen::Index>(spec_.fiber_dim);
  for (std::size_t k = 0; k < spec_.grid; ++k) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const Eigen::Index i = static_cast<Eigen::Index>(k) * d + j;
      u0(i, i) = grid_point(k);
    }
  }
  for (std::size_t i = 0; i < pp_eigs_.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(spec_.grid * spec_.fiber_dim + i);
    u0(idx, idx) = pp_eigs_[i];
  }
  return u0;
}

ComplexMatrix TorusModel::dense_u() const {
  const ComplexMatrix u0 = dense_u0();
  return u0 * (linops::identity(u0.rows()) + psi_ * w_ * psi_.adjoint());
}

ComplexMatrix TorusModel::dense_charge() const {
  const auto total = static_cast<Eigen::Index>(dim());
  const auto d = static_cast<Eigen::Index>(spec_.fiber_dim);
  ComplexMatrix q = ComplexMatrix::Zero(total, total);
  for (std::size_t k = 0; k < spec_.grid; ++k) {
    q.block(static_cast<Eigen::Index>(k) * d, static_cast<Eigen::Index>(k) * d, d, d) =
        spec_.charge(grid_point(k));
  }
  if (spec_.pure_point) {
    const auto s = static_cast<Eigen::Index>(pp_dim());
    q.bottomRightCorner(s, s) = spec_.pure_point->charge;
  }
  return q;
}

ComplexMatrix TorusModel::dense_density() const {
  const auto total = static_cast<Eigen::Index>(dim());
  const auto d = static_cast<Eigen::Index>(spec_.fiber_dim);
  ComplexMatrix rho = ComplexMatrix::Zero(total, total);
  for (std::size_t k = 0; k < spec_.grid; ++k) {
    rho.block(static_cast<Eigen::Index>(k) * d, static_cast<Eigen::Index>(k) * d, d, d) =
        spec_.density(grid_point(k));
  }
  if (spec_.pure_point) {
    const auto s = static_cast<Eigen::Index>(pp_dim());
    rho.bottomRightCorner(s, s) = spec_.pure_point->density;
  }
  return rho;
}

ComplexMatrix TorusModel::dense_p_ac() const {
  const auto total = static_cast<Eigen::Index>(dim());
  ComplexMatrix p = ComplexMatrix::Zero(total, total);
  const auto n = static_cast<Eigen::Index>(spec_.grid * spec_.fiber_dim);
  p.topLeftCorner(n, n) = linops::identity(n);
  return p;
}

SingularPartResult singular_part_test(const TorusModel& model, double r, unsigned threads) {
  if (!model.spec().pure_point) {
    raise(ErrorCode::InvalidArgument, "singular_part_test needs a pure-point block");
  }
  TorusSpec without = model.spec();
  without.pure_point->charge.setZero();
  const TorusModel stripped(without);
  SingularPartResult out;
  out.j_with = model.abel_current(r, AbelSummation::resolvent, {}, threads).value;
  out.j_without = stripped.abel_current(r, AbelSummation::resolvent, {}, threads).value;
  out.relative_difference =
      std::abs(out.j_with - out.j_without) / std::max(std::abs(out.j_without), 1e-300);
  return out;
}

TorusSpec random_torus_spec(std::size_t grid, std::size_t fiber_dim, std::size_t rank,
                            int max_degree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto cnormal = [&]() {
    const double re = normal(rng);
    const double im = normal(rng);
    return Complex(re, im);
  };
  TorusSpec spec;
  spec.grid = grid;
  spec.fiber_dim = fiber_dim;
  const auto d = static_cast<Eigen::Index>(fiber_dim);
  for (std::size_t i = 0; i < rank; ++i) {
    TrigPolynomial f;
    f.min_degree = -max_degree;
    for (int n = -max_degree; n <= max_degree; ++n) {
      ComplexVector c(d);
      for (Eigen::Index a = 0; a < d; ++a) c(a) = cnormal();
      f.coefficients.push_back(c);
    }
    spec.couplings.push_back(std::move(f));
  }
  const auto p = static_cast<Eigen::Index>(rank);
  ComplexMatrix k(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) k(i, j) = cnormal();
  }
  spec.mixing = 0.5 * (k + k.adjoint());
  spec.charge = [d](Complex) {
    ComplexMatrix q = ComplexMatrix::Zero(d, d);
    q(0, 0) = 1.0;
    return q;
  };
  spec.density = [d](Complex zeta) {
    const double t = std::arg(zeta);
    ComplexMatrix rho = ComplexMatrix::Zero(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
      const double base = j == 0 ? 1.0 : 0.7;
      const double amp = j == 0 ? 0.5 : 0.3;
      rho(j, j) = j == 0 ? base + amp * std::cos(t) : base + amp * std::sin(static_cast<double>(j + 1) * t);
    }
    return rho;
  };
  return spec;
}

}  // namespace qtflux::engine
