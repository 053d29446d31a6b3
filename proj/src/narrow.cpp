#include "mfg/narrow.hpp"

#include <cmath>
#include <numbers>

#include "mfg/weak.hpp"

namespace mfg {

EffectiveSystem::EffectiveSystem(double omega_z, double epsilon, double g, double rc_frequency,
                                 InverseTemperature beta)
    : omega_z_(omega_z), epsilon_(epsilon), g_(g), big_(rc_frequency), beta_(beta) {
  if (!(omega_z > 0)) throw std::invalid_argument("effective system: omega_z must be positive");
  if (!(std::abs(epsilon) <= 1)) throw std::invalid_argument("effective system: |epsilon| must be <= 1");
  if (!(g >= 0) || !std::isfinite(g)) throw std::invalid_argument("effective system: g must be >= 0");
  if (!(rc_frequency > 0)) throw std::invalid_argument("effective system: Omega must be positive");
}

double EffectiveSystem::omega_z_tilde() const { return std::exp(-g_ * g_ / (2 * big_ * big_)) * omega_z_; }
double EffectiveSystem::g_tilde() const { return g_ * g_ / (2 * big_); }
double EffectiveSystem::alpha() const {
  return g_ * g_ * std::exp(g_ * g_ / (2 * big_ * big_)) / (2 * omega_z_ * big_);
}
double EffectiveSystem::chi_plus() const { return 0.5 * (1 + std::exp(-2 * g_ * g_ / (big_ * big_))); }
double EffectiveSystem::chi_minus() const { return 0.5 * (1 - std::exp(-2 * g_ * g_ / (big_ * big_))); }

// mu_+ mu_- = -1; mu_+ in [0, 1] written without cancellation
double EffectiveSystem::mu_plus() const {
  const double wt = omega_z_tilde(), gt = g_tilde();
  return gt / (wt + std::hypot(gt, wt));
}
double EffectiveSystem::mu_minus() const { return -1.0 / mu_plus(); }

double EffectiveSystem::kappa_plus() const {
  const double a = epsilon_ * omega_z_tilde(), gt = g_tilde(), s = std::hypot(gt, a);
  if (s == 0) return 1.0;
  return a >= 0 ? (a + s) / gt : gt / (s - a);
}
double EffectiveSystem::kappa_minus() const {
  const double a = epsilon_ * omega_z_tilde(), gt = g_tilde(), s = std::hypot(gt, a);
  if (s == 0) return -1.0;
  return a >= 0 ? -gt / (a + s) : (a - s) / gt;
}

Matrix EffectiveSystem::hamiltonian() const {
  const Matrix sx = collective_sx(2);
  return std::exp(-g_ * g_ / (2 * big_ * big_)) * two_qubit_hamiltonian(omega_z_, epsilon_) -
         (g_ * g_ / big_) * sx * sx;
}

namespace {

constexpr int ee = 0, eg = 1, ge = 2, gg = 3;

// (|x> + k|y>)/sqrt(1+k^2); infinite k gives |y>
Eigen::VectorXcd pair_state(int x, int y, double k) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
  if (std::isinf(k)) {
    v(y) = 1.0;
    return v;
  }
  const double n = std::sqrt(1 + k * k);
  v(x) = 1.0 / n;
  v(y) = k / n;
  return v;
}

}  // namespace

Matrix EffectiveSystem::labelled_vectors() const {
  Matrix v(4, 4);
  const double kp = kappa_plus(), km = kappa_minus(), mp = mu_plus();
  v.col(0) = pair_state(eg, ge, kp);
  v.col(1) = pair_state(eg, ge, km);
  v.col(2) = pair_state(gg, ee, mp);
  // |gg> + mu_-|ee>, rewritten with mu_- = -1/mu_+
  Eigen::VectorXcd four = Eigen::VectorXcd::Zero(4);
  const double n = std::sqrt(1 + mp * mp);
  four(gg) = mp / n;
  four(ee) = -1.0 / n;
  v.col(3) = four;
  return v;
}

std::array<double, 4> EffectiveSystem::labelled_energies() const {
  const double gt = g_tilde(), wt = omega_z_tilde();
  const double s1 = std::hypot(gt, epsilon_ * wt), s3 = std::hypot(gt, wt);
  return {-gt - s1, -gt + s1, -gt - s3, -gt + s3};
}

Matrix h_s_eff(const EffectiveSystem& es) { return es.hamiltonian(); }

Matrix channel_l(const Matrix& op, double g, double rc_frequency) {
  if (op.rows() != 4 || op.cols() != 4) throw std::invalid_argument("channel_l acts on two-qubit operators");
  const double u = g * g / (rc_frequency * rc_frequency);
  const double a = 0.5 * (3 + std::exp(-2 * u) - 4 * std::exp(-u / 2));
  const double b = 0.5 * (1 - std::exp(-2 * u));
  const double c = 1 - std::exp(-u / 2);
  const Matrix s = collective_sx(2);
  const Matrix s2 = s * s;
  return op + a * s2 * op * s2 + b * s * op * s - c * (s2 * op + op * s2);
}

DensityMatrix mfg_zero_width(const EffectiveSystem& es) {
  const DensityMatrix g = gibbs_state(es.hamiltonian(), es.beta());
  return DensityMatrix::qubits(channel_l(g.matrix(), es.g(), es.rc_frequency()));
}

DensityMatrix mfg_narrow_analytic(const EffectiveSystem& es, const ReservoirKernel& kernel, double lambda_eff_sq) {
  if (es.epsilon() != 0.0) throw std::invalid_argument("analytic narrow state is for epsilon = 0");
  const auto e = es.labelled_energies();
  const Matrix v = es.labelled_vectors();
  const double mp = es.mu_plus();
  const double ap = (1 + mp) / std::sqrt(2 * (1 + mp * mp));
  const double am = (mp - 1) / std::sqrt(2 * (1 + mp * mp));

  // populations of the effective Gibbs state
  std::array<double, 4> p{};
  const InverseTemperature beta = kernel.beta();
  const double e0 = std::min({e[0], e[1], e[2], e[3]});
  if (beta.is_infinite()) {
    const double tol = 1e-10 * std::max(1.0, std::abs(e0));
    double z = 0;
    for (int k = 0; k < 4; ++k) z += (p[k] = (e[k] - e0 <= tol) ? 1.0 : 0.0);
    for (auto& x : p) x /= z;
  } else {
    double z = 0;
    for (int k = 0; k < 4; ++k) z += (p[k] = std::exp(-beta.value() * (e[k] - e0)));
    for (auto& x : p) x /= z;
  }
  const double w1 = e[0] - e[2], w2 = e[0] - e[3];
  const double d1 = kernel.d(w1), dm1 = kernel.d(-w1), d2 = kernel.d(w2), dm2 = kernel.d(-w2);
  const double dd1 = kernel.d_derivative(w1), ddm1 = kernel.d_derivative(-w1);
  const double dd2 = kernel.d_derivative(w2), ddm2 = kernel.d_derivative(-w2);
  const double bt = beta.is_infinite() ? 0.0 : beta.value();
  const double a2 = ap * ap, b2 = am * am;
  const double l = lambda_eff_sq;

  const double c1 = l * (bt * a2 * p[0] * d1 + bt * b2 * p[0] * d2 - a2 * (p[0] * dd1 - p[2] * ddm1) -
                         b2 * (p[0] * dd2 - p[3] * ddm2));
  const double c3 = l * (bt * a2 * p[2] * dm1 + a2 * (p[0] * dd1 - p[2] * ddm1));
  const double c4 = l * (bt * b2 * p[3] * dm2 + b2 * (p[0] * dd2 - p[3] * ddm2));
  const double c34 = l * ap * am / (w1 - w2) * (p[0] * d1 + p[2] * dm1 - p[0] * d2 - p[3] * dm2);
  const double keep = 1 - c1 - c3 - c4;
  const double q1 = keep * p[0] + c1, q2 = keep * p[1], q3 = keep * p[2] + c3, q4 = keep * p[3] + c4;

  const double chp = es.chi_plus(), chm = es.chi_minus();
  const double shrink = std::exp(-es.g() * es.g() / (2 * es.rc_frequency() * es.rc_frequency()));
  const double vv = a2 * q3 + b2 * q4 + 2 * ap * am * c34;
  const double tt = b2 * q3 + a2 * q4 - 2 * ap * am * c34;
  const double vt = shrink * (ap * am * (q3 - q4) - (a2 - b2) * c34);

  Eigen::VectorXcd kv = Eigen::VectorXcd::Zero(4), kt = Eigen::VectorXcd::Zero(4);
  kv(ee) = kv(gg) = 1 / std::sqrt(2.0);
  kt(ee) = 1 / std::sqrt(2.0);
  kt(gg) = -1 / std::sqrt(2.0);
  const Eigen::VectorXcd k1 = v.col(0), k2 = v.col(1);
  Matrix rho = (q1 * chp + vv * chm) * k1 * k1.adjoint() + (vv * chp + q1 * chm) * kv * kv.adjoint() +
               q2 * k2 * k2.adjoint() + tt * kt * kt.adjoint() + vt * (kv * kt.adjoint() + kt * kv.adjoint());
  return DensityMatrix::qubits(std::move(rho), true);
}

NarrowResult mfg_narrow(const EffectiveSystem& es, double gamma, KernelMethod method, double validity_threshold) {
  const double big = es.rc_frequency();
  if (!(gamma >= 0) || !(5 * gamma * gamma < big * big))
    throw std::invalid_argument("mfg_narrow: need 0 <= gamma and 5 gamma^2 < Omega^2");
  const DensityMatrix zw = mfg_zero_width(es);
  const Matrix sx = collective_sx(2);
  const double w0 = std::sqrt(big * big - 5 * gamma * gamma);
  const SpectralDensity jrc = SpectralDensity::reaction_coordinate(w0, gamma, es.omega_z());
  if (method == KernelMethod::residue && (!residue_available(jrc) || !es.beta().is_infinite()))
    method = KernelMethod::automatic;
  const ReservoirKernel kernel(jrc, es.beta(), method);
  const double leff = 8 * std::numbers::pi * es.g() * es.g() * gamma * gamma / (es.omega_z() * big * big * big);

  if (gamma == 0.0) {
    Matrix zero = Matrix::Zero(4, 4);
    return {zw, zw, zero, 0.0, 0.0, true, kernel.method(), std::nullopt};
  }
  const Matrix h = es.hamiltonian();
  const MFGResult pert = mfg_perturbative(h, sx, leff, kernel, validity_threshold);
  const Matrix g = gibbs_state(h, es.beta()).matrix();
  const Matrix delta = channel_l(pert.rho.matrix() - g, es.g(), big);
  Matrix full = zw.matrix() + delta;
  full = (0.5 * (full + full.adjoint())).eval();

  std::optional<double> discrepancy;
  if (es.epsilon() == 0.0) {
    const DensityMatrix an = mfg_narrow_analytic(es, kernel, leff);
    discrepancy = (an.matrix() - full).cwiseAbs().maxCoeff();
    if (*discrepancy > 1e-9)
      throw NumericalError("mfg_narrow: closed form and engine disagree by " + std::to_string(*discrepancy));
  }
  return {DensityMatrix::qubits(std::move(full), true), zw, delta, leff, pert.validity, pert.reliable,
          kernel.method(), discrepancy};
}

NarrowResult mfg_narrow(const EffectiveSystem& es, const SpectralDensity& primary, double lambda, KernelMethod method,
                        double validity_threshold) {
  const RCParams rc = rc_params(primary, lambda);
  const auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(b), 1e-12); };
  if (!close(rc.frequency, es.rc_frequency()) || !close(rc.coupling, es.g()) ||
      !close(primary.omega_z(), es.omega_z()))
    throw std::invalid_argument("mfg_narrow: spectral density and coupling do not match the effective system");
  return mfg_narrow(es, primary.gamma(), method, validity_threshold);
}

double energy_gap(const EffectiveSystem& es) {
  const RealVector e = hermitian_eigensystem(es.hamiltonian()).values;
  return e(1) - e(0);
}

double gap_asymptotic(const EffectiveSystem& es) {
  const double u = es.g() * es.g() / (es.rc_frequency() * es.rc_frequency());
  const double eps = es.epsilon();
  return (1 - eps * eps) * (es.omega_z() * es.omega_z() / es.rc_frequency()) / (u * std::exp(u));
}

DensityMatrix gibbs_direct(const EffectiveSystem& es) {
  const Matrix sx = collective_sx(2);
  const Matrix h = two_qubit_hamiltonian(es.omega_z(), es.epsilon()) - (es.g() * es.g() / es.rc_frequency()) * sx * sx;
  return gibbs_state(h, es.beta());
}

}  // namespace mfg
