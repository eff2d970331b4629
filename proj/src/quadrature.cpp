#include "qtflux/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <sstream>

#include "qtflux/errors.hpp"

namespace qtflux::quadrature {

namespace {

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEps = std::numeric_limits<double>::epsilon();

enum class Map { identity, sqrt_lo, sqrt_hi };

// A finite piece of the domain together with the change of variables used on it.
struct Segment {
  Map map = Map::identity;
  double edge = 0.0;   // singular endpoint for sqrt maps
  double width = 0.0;  // λ-extent for sqrt maps
};

struct Panel {
  std::size_t segment = 0;
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;
  bool splittable = true;
};

struct PanelOrder {
  const std::vector<Panel>* panels;
  bool operator()(std::size_t i, std::size_t j) const {
    const Panel& p = (*panels)[i];
    const Panel& q = (*panels)[j];
    if (p.error != q.error) return p.error < q.error;
    return i > j;
  }
};

class Evaluator {
 public:
  Evaluator(const std::function<double(double)>& f, const std::vector<Segment>& segments)
      : f_(f), segments_(segments) {}

  double lambda_of(const Segment& s, double u) const {
    switch (s.map) {
      case Map::identity: return u;
      case Map::sqrt_lo: return s.edge + s.width * u * u;
      case Map::sqrt_hi: return s.edge - s.width * u * u;
    }
    return u;
  }

  double g(std::size_t seg, double u) {
    const Segment& s = segments_[seg];
    const double lambda = lambda_of(s, u);
    const double jac = s.map == Map::identity ? 1.0 : 2.0 * s.width * u;
    if (jac == 0.0) return 0.0;
    ++evaluations;
    const double v = f_(lambda);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "integrand not finite at λ = " << lambda;
      raise(ErrorCode::NonIntegrable, msg.str());
    }
    return v * jac;
  }

  void gk15(Panel& p) {
    const double center = 0.5 * (p.a + p.b);
    const double half = 0.5 * (p.b - p.a);
    const double fc = g(p.segment, center);
    double resg = fc * kWg[3];
    double resk = fc * kWgk[7];
    double resabs = std::abs(resk);
    std::array<double, 7> fv1{}, fv2{};
    for (int j = 0; j < 7; ++j) {
      const double dx = half * kXgk[j];
      fv1[j] = g(p.segment, center - dx);
      fv2[j] = g(p.segment, center + dx);
      const double sum = fv1[j] + fv2[j];
      resk += kWgk[j] * sum;
      resabs += kWgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
      if (j % 2 == 1) resg += kWg[j / 2] * sum;
    }
    const double reskh = 0.5 * resk;
    double resasc = kWgk[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j) {
      resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
    }
    const double ah = std::abs(half);
    resk *= half;
    resabs *= ah;
    resasc *= ah;
    double err = std::abs((resk - resg * half));
    if (resasc != 0.0 && err != 0.0) {
      err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
      err = std::max(50.0 * kEps * resabs, err);
    }
    p.value = resk;
    p.error = err;
    const double scale = std::max({std::abs(p.a), std::abs(p.b), 1e-300});
    p.splittable = (p.b - p.a) > 1e3 * kEps * scale;
  }

  std::size_t evaluations = 0;

 private:
  const std::function<double(double)>& f_;
  const std::vector<Segment>& segments_;
};

// Walks outward from `start` in growing steps until three consecutive probes
// fall below tail_eps; returns the last probe as the cutoff.
double tail_cutoff(const std::function<double(double)>& f, double start, double direction,
                   const QuadratureSpec& spec, std::size_t& evaluations) {
  double step = std::max(1.0, 0.125 * std::abs(start));
  double x = start;
  int quiet = 0;
  while (true) {
    x += direction * step;
    step *= 1.5;
    if (std::abs(x) > spec.max_range) {
      std::ostringstream msg;
      msg << "tail monitor did not reach " << spec.tail_eps << " before |λ| = " << spec.max_range;
      raise(ErrorCode::NonIntegrable, msg.str());
    }
    ++evaluations;
    const double v = f(x);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "integrand not finite at λ = " << x;
      raise(ErrorCode::NonIntegrable, msg.str());
    }
    quiet = std::abs(v) <= spec.tail_eps ? quiet + 1 : 0;
    if (quiet == 3) return x;
  }
}

double neumaier_sum(const std::vector<double>& values) {
  double sum = 0.0;
  double comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

}  // namespace

Domain real_line() { return {Interval{-kInf, kInf}}; }

Domain gapped_line(double a, EdgeTreatment edges) {
  if (!(a >= 0.0)) raise(ErrorCode::InvalidArgument, "gapped_line requires a >= 0");
  Interval left{-kInf, -a};
  left.hi_edge = edges;
  Interval right{a, kInf};
  right.lo_edge = edges;
  return {left, right};
}

QuadratureResult integrate(const std::function<double(double)>& f, const Domain& domain,
                           const QuadratureSpec& spec) {
  if (!(spec.tol > 0.0) || !(spec.tail_eps < spec.tol)) {
    raise(ErrorCode::InvalidArgument, "quadrature spec requires tol > 0 and tail_eps < tol");
  }
  QuadratureResult result;
  std::vector<double> bps = spec.breakpoints;
  std::sort(bps.begin(), bps.end());

  std::vector<Segment> segments;
  std::vector<Panel> panels;
  std::size_t probe_evaluations = 0;

  auto add_panels = [&](const Segment& seg, double a, double b, int pieces) {
    const std::size_t index = segments.size();
    segments.push_back(seg);
    for (int i = 0; i < pieces; ++i) {
      Panel p;
      p.segment = index;
      p.a = a + (b - a) * i / pieces;
      p.b = i + 1 == pieces ? b : a + (b - a) * (i + 1) / pieces;
      panels.push_back(p);
    }
  };

  for (const Interval& iv : domain) {
    if (!(iv.lo < iv.hi)) {
      if (iv.lo == iv.hi) continue;
      raise(ErrorCode::InvalidArgument, "domain interval with lo > hi");
    }
    std::vector<double> inner;
    for (double b : bps) {
      if (b > iv.lo && b < iv.hi) inner.push_back(b);
    }
    double lo = iv.lo;
    double hi = iv.hi;
    if (std::isinf(hi)) {
      const double start = inner.empty() ? (std::isinf(lo) ? 0.0 : lo) : inner.back();
      hi = tail_cutoff(f, start, 1.0, spec, probe_evaluations);
    }
    if (std::isinf(lo)) {
      const double start = inner.empty() ? (std::isinf(iv.hi) ? 0.0 : iv.hi) : inner.front();
      lo = tail_cutoff(f, start, -1.0, spec, probe_evaluations);
    }
    result.truncated_domain.push_back(Interval{lo, hi, iv.lo_edge, iv.hi_edge});

    std::vector<double> cuts{lo};
    for (double b : inner) {
      if (b > lo && b < hi) cuts.push_back(b);
    }
    cuts.push_back(hi);
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      double a = cuts[c];
      double b = cuts[c + 1];
      const bool sqrt_lo = c == 0 && iv.lo_edge == EdgeTreatment::sqrt_substitution &&
                           std::isfinite(iv.lo);
      const bool sqrt_hi = c + 2 == cuts.size() &&
                           iv.hi_edge == EdgeTreatment::sqrt_substitution && std::isfinite(iv.hi);
      const double len = b - a;
      double zone = std::min(len, 1.0);
      if (sqrt_lo && sqrt_hi) zone = std::min(zone, 0.5 * len);
      if (sqrt_lo) {
        add_panels(Segment{Map::sqrt_lo, a, zone}, 0.0, 1.0, 4);
        a += zone;
      }
      double b_plain = b;
      if (sqrt_hi) b_plain = b - zone;
      if (b_plain > a) add_panels(Segment{}, a, b_plain, 8);
      if (sqrt_hi) add_panels(Segment{Map::sqrt_hi, b, zone}, 0.0, 1.0, 4);
    }
  }

  Evaluator eval(f, segments);
  for (Panel& p : panels) eval.gk15(p);

  std::priority_queue<std::size_t, std::vector<std::size_t>, PanelOrder> heap(
      PanelOrder{&panels});
  for (std::size_t i = 0; i < panels.size(); ++i) heap.push(i);

  auto totals = [&]() {
    double value = 0.0;
    double error = 0.0;
    for (const Panel& p : panels) {
      value += p.value;
      error += p.error;
    }
    return std::pair{value, error};
  };

  auto [total, total_err] = totals();
  std::size_t iterations = 0;
  while (total_err > std::max(spec.tol, spec.rel_tol * std::abs(total)) && !heap.empty()) {
    if (panels.size() >= spec.max_subdivisions) {
      std::ostringstream msg;
      msg << "error estimate " << total_err << " above target after " << panels.size()
          << " panels";
      raise(ErrorCode::MaxSubdivisions, msg.str());
    }
    const std::size_t i = heap.top();
    heap.pop();
    if (!panels[i].splittable) continue;
    const Panel parent = panels[i];
    Panel left = parent;
    Panel right = parent;
    left.b = right.a = 0.5 * (parent.a + parent.b);
    eval.gk15(left);
    eval.gk15(right);
    panels[i] = left;
    panels.push_back(right);
    heap.push(i);
    heap.push(panels.size() - 1);
    total += left.value + right.value - parent.value;
    total_err += left.error + right.error - parent.error;
    if (++iterations % 64 == 0) std::tie(total, total_err) = totals();
  }

  std::vector<std::size_t> order(panels.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (panels[i].segment != panels[j].segment) return panels[i].segment < panels[j].segment;
    return panels[i].a < panels[j].a;
  });
  std::vector<double> values;
  std::vector<double> errors;
  values.reserve(order.size());
  for (std::size_t i : order) {
    values.push_back(panels[i].value);
    errors.push_back(panels[i].error);
  }
  result.value = neumaier_sum(values);
  result.error_estimate = neumaier_sum(errors);
  result.evaluations = eval.evaluations + probe_evaluations;
  result.panels = panels.size();
  return result;
}

}  // namespace qtflux::quadrature
