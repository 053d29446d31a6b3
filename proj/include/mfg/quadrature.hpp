#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace mfg {

struct QuadratureOptions {
  double abs_tol = 1e-14;
  double rel_tol = 1e-9;
  std::size_t max_panels = std::size_t{1} << 20;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t panels = 0;
};

// Globally adaptive Gauss-Kronrod 7-15 over [points.front(), points.back()];
// interior points are forced panel edges. Throws NumericalError past max_panels.
QuadratureResult integrate(const std::function<double(double)>& f, std::vector<double> points,
                           const QuadratureOptions& opts = {});

// Integral over [a, inf) through u = 1/x; `points` (all > a) are extra edges.
QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                       std::vector<double> points, const QuadratureOptions& opts = {});

// P int_0^inf [ f(y)/(y - pole) + regular(y) ] dy for pole > 0, by folding
// the interval [0, 2 pole] symmetrically about the pole. `features` are
// locations (peaks, shoulders) worth a panel edge.
QuadratureResult principal_value_half_line(const std::function<double(double)>& f, double pole,
                                           const std::function<double(double)>& regular,
                                           const std::vector<double>& features,
                                           const QuadratureOptions& opts = {});

}  // namespace mfg
