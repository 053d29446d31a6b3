#include "mfg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "mfg/qubit_algebra.hpp"

namespace mfg {

namespace {

// Kronrod 15 nodes / weights, embedded Gauss 7 weights (QUADPACK qk15).
constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                           0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                           0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                           0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                           0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                           0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                           0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                          0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double rk = fc * wgk[7], rg = fc * wg[3];
  double resabs = std::abs(rk);
  double fv1[7], fv2[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * xgk[j];
    fv1[j] = f(c - dx);
    fv2[j] = f(c + dx);
    rk += wgk[j] * (fv1[j] + fv2[j]);
    resabs += wgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
    if (j % 2 == 1) rg += wg[j / 2] * (fv1[j] + fv2[j]);
  }
  const double mean = 0.5 * rk;
  double resasc = wgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) resasc += wgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));
  rk *= h;
  rg *= h;
  resabs *= std::abs(h);
  resasc *= std::abs(h);
  double err = std::abs(rk - rg);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50 * eps)) err = std::max(err, 50 * eps * resabs);
  if (!std::isfinite(rk)) err = std::numeric_limits<double>::infinity();
  return {a, b, rk, err};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, std::vector<double> points,
                           const QuadratureOptions& opts) {
  if (points.size() < 2) throw std::invalid_argument("integrate: need at least two points");
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  std::priority_queue<Panel> heap;
  double total = 0.0, err = 0.0;
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    Panel p = gk15(f, points[k], points[k + 1]);
    total += p.value;
    err += p.error;
    heap.push(p);
  }
  std::size_t panels = heap.size();
  // floor: panels too narrow to split further are retired
  double retired_err = 0.0;
  while (err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
    if (!std::isfinite(total)) throw NumericalError("integrate: non-finite integrand");
    if (heap.empty()) break;
    if (panels >= opts.max_panels)
      throw NumericalError("integrate: panel limit " + std::to_string(opts.max_panels) +
                           " reached; value " + std::to_string(total) + " error estimate " +
                           std::to_string(err));
    Panel p = heap.top();
    heap.pop();
    const double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b) || std::abs(p.b - p.a) < 1e-15 * std::max(std::abs(p.a), std::abs(p.b))) {
      retired_err += p.error;
      continue;
    }
    Panel l = gk15(f, p.a, mid), r = gk15(f, mid, p.b);
    total += l.value + r.value - p.value;
    err += l.error + r.error - p.error;
    heap.push(l);
    heap.push(r);
    ++panels;
  }
  // re-sum to shed accumulated rounding from the running update
  double sum = 0.0, esum = retired_err;
  while (!heap.empty()) {
    sum += heap.top().value;
    esum += heap.top().error;
    heap.pop();
  }
  (void)total;
  return {sum, esum, panels};
}

QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                       std::vector<double> points, const QuadratureOptions& opts) {
  if (!(a > 0.0)) throw std::invalid_argument("integrate_to_infinity: start must be positive");
  auto g = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double x = 1.0 / u;
    return f(x) * x * x;
  };
  std::vector<double> us{0.0, 1.0 / a};
  for (double p : points)
    if (p > a) us.push_back(1.0 / p);
  return integrate(g, us, opts);
}

QuadratureResult principal_value_half_line(const std::function<double(double)>& f, double pole,
                                           const std::function<double(double)>& regular,
                                           const std::vector<double>& features,
                                           const QuadratureOptions& opts) {
  if (!(pole > 0.0)) throw std::invalid_argument("principal_value_half_line: pole must be positive");
  const double a = pole;
  auto folded = [&](double t) {
    if (t <= 0.0) return 0.0;
    return (f(a + t) - f(a - t)) / t + regular(a + t) + regular(a - t);
  };
  auto outer = [&](double y) { return f(y) / (y - a) + regular(y); };

  std::vector<double> inner{0.0, a};
  double far = 2.0 * a;
  for (double x : features) {
    if (x > 0.0 && x < 2.0 * a && std::abs(x - a) > 0.0) inner.push_back(std::abs(x - a));
    far = std::max(far, x);
  }
  far = std::max(2.0 * a, 4.0 * far);
  std::vector<double> mid{2.0 * a, far};
  for (double x : features)
    if (x > 2.0 * a && x < far) mid.push_back(x);

  QuadratureOptions sub = opts;
  sub.abs_tol = opts.abs_tol / 3.0;
  const QuadratureResult r1 = integrate(folded, inner, sub);
  const QuadratureResult r2 = integrate(outer, mid, sub);
  const QuadratureResult r3 = integrate_to_infinity(outer, far, {}, sub);
  return {r1.value + r2.value + r3.value, r1.error + r2.error + r3.error, r1.panels + r2.panels + r3.panels};
}

}  // namespace mfg
