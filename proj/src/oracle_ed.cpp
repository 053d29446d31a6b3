#include "mfg/oracle_ed.hpp"

#include <cmath>
#include <string>

namespace mfg {

RealMatrix build_dicke(const DickeParameters& p, int n_max) {
  if (n_max < 1) throw std::invalid_argument("build_dicke: n_max must be >= 1");
  if (!(p.omega_z >= 0) || !(p.rc_frequency > 0) || !(p.g >= 0) || !(std::abs(p.epsilon) <= 1))
    throw std::invalid_argument("build_dicke: bad parameters");
  const int nb = n_max + 1;
  const int dim = 4 * nb;
  RealMatrix h = RealMatrix::Zero(dim, dim);
  // qubit order ee, eg, ge, gg
  const double sz1[4] = {1, 1, -1, -1}, sz2[4] = {1, -1, 1, -1};
  RealMatrix sx = RealMatrix::Zero(4, 4);
  sx(0, 1) = sx(1, 0) = sx(0, 2) = sx(2, 0) = 0.5;
  sx(3, 1) = sx(1, 3) = sx(3, 2) = sx(2, 3) = 0.5;
  for (int q = 0; q < 4; ++q) {
    const double e = 0.5 * p.omega_z * ((1 + p.epsilon) * sz1[q] + (1 - p.epsilon) * sz2[q]);
    for (int n = 0; n < nb; ++n) h(q * nb + n, q * nb + n) = e + p.rc_frequency * n;
  }
  for (int q = 0; q < 4; ++q)
    for (int r = 0; r < 4; ++r) {
      if (sx(q, r) == 0) continue;
      for (int n = 0; n + 1 < nb; ++n) {
        const double amp = p.g * sx(q, r) * std::sqrt(static_cast<double>(n + 1));
        h(q * nb + n + 1, r * nb + n) += amp;  // a^dag
        h(q * nb + n, r * nb + n + 1) += amp;  // a
      }
    }
  return h;
}

DensityMatrix reduced_thermal_state_fixed(const DickeParameters& p, InverseTemperature beta, int n_max) {
  const RealMatrix h = build_dicke(p, n_max);
  const RealEigensystem es = symmetric_eigensystem(h);
  const Eigen::Index dim = h.rows();
  RealVector w(dim);
  const double e0 = es.values(0);
  if (beta.is_infinite()) {
    const double tol = 1e-10 * std::max(1.0, es.values.cwiseAbs().maxCoeff());
    for (Eigen::Index k = 0; k < dim; ++k) w(k) = es.values(k) - e0 <= tol ? 1.0 : 0.0;
  } else {
    for (Eigen::Index k = 0; k < dim; ++k) w(k) = std::exp(-beta.value() * (es.values(k) - e0));
  }
  w /= w.sum();
  const int nb = n_max + 1;
  Matrix red = Matrix::Zero(4, 4);
  for (Eigen::Index k = 0; k < dim; ++k) {
    if (w(k) < 1e-300) continue;
    const auto v = es.vectors.col(k);
    for (int q = 0; q < 4; ++q)
      for (int r = 0; r < 4; ++r) {
        double s = 0;
        for (int n = 0; n < nb; ++n) s += v(q * nb + n) * v(r * nb + n);
        red(q, r) += w(k) * s;
      }
  }
  return DensityMatrix::qubits(std::move(red));
}

OracleResult reduced_thermal_state(const DickeParameters& p, InverseTemperature beta, double tol, int n_start,
                                   int n_cap) {
  if (n_start < 1 || n_cap < n_start) throw std::invalid_argument("reduced_thermal_state: bad cutoff range");
  DensityMatrix prev = reduced_thermal_state_fixed(p, beta, n_start);
  double change = INFINITY;
  for (int n = n_start + 10; n <= n_cap; n += 10) {
    DensityMatrix cur = reduced_thermal_state_fixed(p, beta, n);
    change = (cur.matrix() - prev.matrix()).cwiseAbs().maxCoeff();
    if (change < tol) return {std::move(cur), n, change};
    prev = std::move(cur);
  }
  throw NumericalError("reduced_thermal_state: no convergence up to n_max = " + std::to_string(n_cap) +
                       " (last change " + std::to_string(change) + ")");
}

}  // namespace mfg
