#include "mfg/weak.hpp"

#include <cmath>

namespace mfg {

QubitPopulations qubit_populations(double w, InverseTemperature beta) {
  if (beta.is_infinite()) {
    if (w > 0) return {0.0, 1.0, 0.0};
    if (w < 0) return {1.0, 0.0, 0.0};
    return {0.5, 0.5, 0.0};
  }
  const double x = 0.5 * beta.value() * w;
  // p_+ = e^{-x} / (2 cosh x) = 1 / (1 + e^{2x})
  const double pe = x > 0 ? std::exp(-2 * x) / (1 + std::exp(-2 * x)) : 1 / (1 + std::exp(2 * x));
  const double pg = 1 - pe;
  return {pe, pg, beta.value() * pe * pg};
}

double theta(double w, double lambda_sq, const ReservoirKernel& kernel) {
  const QubitPopulations p = qubit_populations(w, kernel.beta());
  double s = 0.0;
  if (p.excited > 0) s += p.excited * kernel.d(w);
  if (p.ground > 0) s += p.ground * kernel.d(-w);
  return 0.25 * lambda_sq * s;
}

double theta_derivative(double w, double lambda_sq, const ReservoirKernel& kernel) {
  const QubitPopulations p = qubit_populations(w, kernel.beta());
  const double dp = p.beta_pp;
  double s = 0.0;
  if (p.excited > 0 || dp > 0) s += -dp * kernel.d(w) + p.excited * kernel.d_derivative(w);
  if (p.ground > 0 || dp > 0) s += dp * kernel.d(-w) - p.ground * kernel.d_derivative(-w);
  return 0.25 * lambda_sq * s;
}

double theta_integral(double w, double lambda_sq, const SpectralDensity& sd, InverseTemperature beta,
                      const QuadratureOptions& opts) {
  if (!(w > 0)) throw std::invalid_argument("theta_integral: splitting must be positive");
  const QubitPopulations p = qubit_populations(w, beta);
  const double c = p.excited - p.ground;
  auto coth = [&](double y) {
    if (beta.is_infinite()) return 1.0;
    return 1.0 / std::tanh(0.5 * beta.value() * y);
  };
  if (sd.single_mode()) {
    const double w0 = sd.omega0();
    return 0.25 * lambda_sq * sd.omega_z() * w0 * (w0 + c * w * coth(w0)) / (w0 * w0 - w * w);
  }
  auto f = [&](double y) {
    if (y <= 0) return 0.0;
    return sd.value(y) * (y + c * w * coth(y)) / (y + w);
  };
  return 0.25 * lambda_sq *
         principal_value_half_line(f, w, [](double) { return 0.0; }, sd.features(), opts).value;
}

Matrix two_qubit_hamiltonian(double omega_z, double epsilon) {
  return 0.5 * (1 + epsilon) * omega_z * pauli(0, Axis::z) + 0.5 * (1 - epsilon) * omega_z * pauli(1, Axis::z);
}

Matrix c_plus() {
  return 0.5 * (pauli(0, Axis::x) * pauli(1, Axis::x) + pauli(0, Axis::y) * pauli(1, Axis::y));
}

Matrix c_minus() {
  return 0.5 * (pauli(0, Axis::x) * pauli(1, Axis::x) - pauli(0, Axis::y) * pauli(1, Axis::y));
}

namespace {

Matrix qubit_state(const QubitPopulations& p) {
  Matrix t = Matrix::Zero(2, 2);
  t(0, 0) = p.excited;
  t(1, 1) = p.ground;
  return t;
}

void check_inputs(double omega_z, double lambda_sq) {
  if (!(omega_z > 0)) throw std::invalid_argument("weak coupling: omega_z must be positive");
  if (!(lambda_sq >= 0)) throw std::invalid_argument("weak coupling: lambda^2 must be >= 0");
}

double validity_identical(int n, double omega_z, double lambda_sq, const ReservoirKernel& kernel) {
  if (kernel.beta().is_infinite()) return n * lambda_sq;
  return n * kernel.beta().value() * std::abs(theta(omega_z, lambda_sq, kernel));
}

}  // namespace

WeakResult mfg_weak_two_qubit(double omega_z, double epsilon, double lambda_sq, const ReservoirKernel& kernel,
                              double validity_threshold) {
  check_inputs(omega_z, lambda_sq);
  if (!(std::abs(epsilon) <= 1)) throw std::invalid_argument("weak coupling: |epsilon| must be <= 1");
  const InverseTemperature beta = kernel.beta();
  const double w1 = omega_z * (1 + epsilon), w2 = omega_z * (1 - epsilon);
  const QubitPopulations p1 = qubit_populations(w1, beta), p2 = qubit_populations(w2, beta);
  const Matrix t1 = qubit_state(p1), t2 = qubit_state(p2);
  const Matrix sz = pauli(Axis::z);

  const double th1 = theta(w1, lambda_sq, kernel), th2 = theta(w2, lambda_sq, kernel);
  const double dth1 = theta_derivative(w1, lambda_sq, kernel), dth2 = theta_derivative(w2, lambda_sq, kernel);
  const double f1 = p1.ground - p1.excited, f2 = p2.ground - p2.excited;

  double cp;
  if (std::abs(epsilon) < 1e-4) {
    // limit of the divided difference, taken at the mean splitting
    const double th = theta(omega_z, lambda_sq, kernel), dth = theta_derivative(omega_z, lambda_sq, kernel);
    const QubitPopulations p = qubit_populations(omega_z, beta);
    cp = 2 * p.beta_pp * th - (p.ground - p.excited) * dth;
  } else {
    cp = -(f2 * th1 - f1 * th2) / (2 * omega_z * epsilon);
  }
  const double cm = (f2 * th1 + f1 * th2) / (2 * omega_z);

  Matrix rho = kron(t1, t2) - dth1 * kron(sz, t2) - dth2 * kron(t1, sz) + cp * c_plus() + cm * c_minus();
  const double v = kernel.beta().is_infinite()
                       ? 2 * lambda_sq
                       : kernel.beta().value() * std::abs(th1 + th2);
  return {DensityMatrix::qubits(std::move(rho), true), v, v < validity_threshold};
}

WeakResult mfg_weak_n_qubit(int n_qubits, double omega_z, double lambda_sq, const ReservoirKernel& kernel,
                            double validity_threshold) {
  check_inputs(omega_z, lambda_sq);
  if (n_qubits < 2 || n_qubits > 12) throw std::invalid_argument("weak coupling: need 2 <= N <= 12 qubits");
  const QubitPopulations p = qubit_populations(omega_z, kernel.beta());
  const Matrix tau = qubit_state(p);
  const double th = theta(omega_z, lambda_sq, kernel), dth = theta_derivative(omega_z, lambda_sq, kernel);
  const double cp = 2 * p.beta_pp * th - (p.ground - p.excited) * dth;
  const double cm = (p.ground - p.excited) * th / omega_z;

  const Matrix sz = pauli(Axis::z), sx = pauli(Axis::x), sy = pauli(Axis::y);
  // product over qubits with per-site factors
  auto product = [&](auto factor) {
    Matrix out = Matrix::Identity(1, 1);
    for (int k = 0; k < n_qubits; ++k) out = kron(out, factor(k));
    return out;
  };
  Matrix rho = product([&](int) { return tau; });
  for (int n = 0; n < n_qubits; ++n) rho -= dth * product([&](int k) { return k == n ? sz : tau; });
  for (int m = 0; m < n_qubits; ++m)
    for (int n = m + 1; n < n_qubits; ++n) {
      const Matrix xx = product([&](int k) { return k == m || k == n ? sx : tau; });
      const Matrix yy = product([&](int k) { return k == m || k == n ? sy : tau; });
      rho += 0.5 * cp * (xx + yy) + 0.5 * cm * (xx - yy);
    }
  const double v = validity_identical(n_qubits, omega_z, lambda_sq, kernel);
  return {DensityMatrix::qubits(std::move(rho), true), v, v < validity_threshold};
}

double negativity_closed_form(double q, double omega_z, InverseTemperature beta) {
  const QubitPopulations p = qubit_populations(omega_z, beta);
  return std::max(0.0, q / (4 * omega_z) * (p.ground - p.excited) - p.ground * p.excited);
}

double entanglement_temperature_closed_form(double q, double omega_z) {
  if (!(q > 0) || !(omega_z > 0)) throw std::invalid_argument("closed-form temperature needs q, omega_z > 0");
  return omega_z / std::asinh(2 * omega_z / q);
}

}  // namespace mfg
