#pragma once

#include <array>
#include <optional>

#include "mfg/engine.hpp"
#include "mfg/qubit_algebra.hpp"
#include "mfg/spectral.hpp"

namespace mfg {

// Two qubits coupled to a reaction coordinate of frequency Omega with strength g,
// after the polaron transform and projection onto the mode vacuum.
class EffectiveSystem {
 public:
  EffectiveSystem(double omega_z, double epsilon, double g, double rc_frequency, InverseTemperature beta);

  double omega_z() const { return omega_z_; }
  double epsilon() const { return epsilon_; }
  double g() const { return g_; }
  double rc_frequency() const { return big_; }
  InverseTemperature beta() const { return beta_; }

  double omega_z_tilde() const;  // e^{-g^2/2Omega^2} w_z
  double g_tilde() const;        // g^2 / (2 Omega)
  double alpha() const;          // g^2 e^{g^2/2Omega^2} / (2 w_z Omega)
  double chi_plus() const;
  double chi_minus() const;
  double mu_plus() const;
  double mu_minus() const;
  double kappa_plus() const;
  double kappa_minus() const;

  // H_S e^{-g^2/2Omega^2} - (g^2/Omega) S_x^2
  Matrix hamiltonian() const;
  // Labelled eigenpairs |1>..|4> in closed form (columns), energies e_1..e_4.
  Matrix labelled_vectors() const;
  std::array<double, 4> labelled_energies() const;

 private:
  double omega_z_, epsilon_, g_, big_;
  InverseTemperature beta_;
};

Matrix h_s_eff(const EffectiveSystem& es);
// Return from the polaron frame after tracing the mode vacuum.
Matrix channel_l(const Matrix& op, double g, double rc_frequency);
DensityMatrix mfg_zero_width(const EffectiveSystem& es);

struct NarrowResult {
  DensityMatrix rho;
  DensityMatrix rho_zero_width;
  Matrix delta_rho;
  double lambda_eff_sq;
  double validity;
  bool reliable;
  KernelMethod kernel_method;
  std::optional<double> analytic_discrepancy;  // eps = 0 only
};

// Broadening gamma at fixed g and Omega: J_RC with omega0 = sqrt(Omega^2 - 5 gamma^2),
// lambda_eff^2 = 8 pi g^2 gamma^2 / (w_z Omega^3).
NarrowResult mfg_narrow(const EffectiveSystem& es, double gamma, KernelMethod method = KernelMethod::automatic,
                        double validity_threshold = 0.1);
// Same from a primary density and its coupling; (g, Omega) of `es` must match.
NarrowResult mfg_narrow(const EffectiveSystem& es, const SpectralDensity& primary, double lambda,
                        KernelMethod method = KernelMethod::automatic, double validity_threshold = 0.1);

// eps = 0 closed form of the narrow state in the labelled basis.
DensityMatrix mfg_narrow_analytic(const EffectiveSystem& es, const ReservoirKernel& kernel, double lambda_eff_sq);

double energy_gap(const EffectiveSystem& es);
// (1 - eps^2) (w_z^2/Omega) / ((g^2/Omega^2) e^{g^2/Omega^2}), for alpha >> 1
double gap_asymptotic(const EffectiveSystem& es);
// Gibbs state of H_S - (g^2/Omega) S_x^2
DensityMatrix gibbs_direct(const EffectiveSystem& es);

}  // namespace mfg
