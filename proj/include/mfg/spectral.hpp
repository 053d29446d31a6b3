#pragma once

#include <complex>
#include <vector>

#include "mfg/quadrature.hpp"
#include "mfg/qubit_algebra.hpp"

namespace mfg {

enum class SpectralFamily { primary, reaction_coordinate };

// Underdamped bath spectral densities in units where the reaction-coordinate
// frequency is the energy scale. Normalisation: int_0^inf J(w)/w dw = omega_z
// for both families. gamma = 0 is the single-mode limit
// J = omega_z * omega0 * delta(w - omega0), which has no pointwise value.
class SpectralDensity {
 public:
  static SpectralDensity primary(double omega0, double gamma, double omega_z);
  // Same omega0 and gamma as the primary density it is mapped from.
  static SpectralDensity reaction_coordinate(double omega0, double gamma, double omega_z);
  // Primary density whose reaction coordinate sits at `rc_frequency`.
  static SpectralDensity primary_at_rc_frequency(double rc_frequency, double gamma, double omega_z);

  SpectralFamily family() const { return family_; }
  double omega0() const { return omega0_; }
  double gamma() const { return gamma_; }
  double omega_z() const { return omega_z_; }
  bool single_mode() const { return gamma_ == 0.0; }

  double value(double w) const;       // J(w); 0 for w <= 0
  double derivative(double w) const;  // dJ/dw
  std::vector<double> features() const;

  // Poles of the rational continuation in the upper-right quadrant.
  std::complex<double> upper_pole() const;

 private:
  SpectralDensity(SpectralFamily f, double w0, double g, double wz);
  SpectralFamily family_;
  double omega0_, gamma_, omega_z_;
};

struct RCParams {
  double frequency;   // Omega
  double coupling;    // g
  double lambda_rc_sq;
  double lambda_eff_sq;
  double q;           // lambda^2 omega_z
};

RCParams rc_params(const SpectralDensity& primary, double lambda);
// lambda for which the primary density maps onto coupling g.
double lambda_for_coupling(const SpectralDensity& primary, double g);
SpectralDensity rc_spectral_density(const SpectralDensity& primary);

// Quadrature moments int_0^inf w^k J(w) dw (k >= -1).
double spectral_moment(const SpectralDensity& sd, int k, const QuadratureOptions& opts = {});
// P int J_odd(x)/(x - w) dx over the real line.
double hilbert_transform(const SpectralDensity& sd, double w, const QuadratureOptions& opts = {});
// lambda_RC^2 J_RC(w) rebuilt from J alone: its moments and its Hilbert transform.
double rc_density_from_hilbert(const SpectralDensity& primary, double w, const QuadratureOptions& opts = {});

enum class KernelMethod { automatic, quadrature, residue, residue_pole_only };

// D_beta(w) = P int_0^inf J(y) (y + w coth(beta y/2)) / (y^2 - w^2) dy
//           = P int_0^inf [ J(1+n)/(y-w) - J n/(y+w) ] dy,  n the Bose factor.
double d_beta_quadrature(const SpectralDensity& sd, InverseTemperature beta, double w,
                         const QuadratureOptions& opts = {});
double d_beta_derivative_quadrature(const SpectralDensity& sd, InverseTemperature beta, double w,
                                    const QuadratureOptions& opts = {});

struct ResidueParts {
  double pole;    // -2 pi Im R_+
  double branch;  // contribution of the imaginary axis
  double total() const { return pole + branch; }
};
// Zero-temperature kernel in closed form. For the reaction-coordinate family
// requires 7 gamma^2 < omega0^2 (std::domain_error otherwise).
ResidueParts d_infty_residue_parts(const SpectralDensity& sd, double w);
ResidueParts d_infty_residue_derivative_parts(const SpectralDensity& sd, double w);
double d_infty_residue(const SpectralDensity& sd, double w);
bool residue_available(const SpectralDensity& sd);

// int_0^inf s^k / prod_j (s - p_j)^{m_j} ds with m_j in {1, 2} and no pole on [0, inf).
struct RationalPole {
  std::complex<double> location;
  int multiplicity;
};
std::complex<double> rational_half_line_integral(int k, const std::vector<RationalPole>& poles);

class ReservoirKernel {
 public:
  // automatic: closed form when gamma = 0, residue at infinite beta when
  // available, quadrature otherwise.
  ReservoirKernel(SpectralDensity sd, InverseTemperature beta, KernelMethod method = KernelMethod::automatic);
  ReservoirKernel(SpectralDensity sd, InverseTemperature beta, KernelMethod method, QuadratureOptions opts);

  // abs tol 1e-12 omega_z, rel tol 1e-9
  static QuadratureOptions default_options(const SpectralDensity& sd);

  double d(double w) const;
  double d_derivative(double w) const;
  const SpectralDensity& spectral_density() const { return sd_; }
  InverseTemperature beta() const { return beta_; }
  KernelMethod method() const { return method_; }  // resolved, never automatic

 private:
  SpectralDensity sd_;
  InverseTemperature beta_;
  KernelMethod method_;
  QuadratureOptions opts_;
};

}  // namespace mfg
