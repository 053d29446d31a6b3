#pragma once

#include "mfg/engine.hpp"
#include "mfg/qubit_algebra.hpp"
#include "mfg/spectral.hpp"

namespace mfg {

// Thermal populations of a single qubit with splitting w (H = w sigma_z / 2).
struct QubitPopulations {
  double excited;   // p_+
  double ground;    // p_-
  double beta_pp;   // beta p_+ p_-, taken as 0 at infinite beta
};
QubitPopulations qubit_populations(double w, InverseTemperature beta);

// theta(w) = (lambda^2/4) (p_+ D(w) + p_- D(-w)) for a qubit of splitting w.
double theta(double w, double lambda_sq, const ReservoirKernel& kernel);
// Total derivative in w (populations included).
double theta_derivative(double w, double lambda_sq, const ReservoirKernel& kernel);
// Same quantity from one principal-value integral over J.
double theta_integral(double w, double lambda_sq, const SpectralDensity& sd, InverseTemperature beta,
                      const QuadratureOptions& opts = {});

struct WeakResult {
  DensityMatrix rho;
  double validity;
  bool reliable;
};

// Closed-form two-qubit state to O(lambda^2) for splittings w_z (1 +- eps).
// |eps| < 1e-4 uses the derivative limit of the eps -> 0 divided difference.
WeakResult mfg_weak_two_qubit(double omega_z, double epsilon, double lambda_sq, const ReservoirKernel& kernel,
                              double validity_threshold = 0.1);

// N identical qubits (N <= 12).
WeakResult mfg_weak_n_qubit(int n_qubits, double omega_z, double lambda_sq, const ReservoirKernel& kernel,
                            double validity_threshold = 0.1);

// max[0, Q/(4 w_z) (p_- - p_+) - p_- p_+]
double negativity_closed_form(double q, double omega_z, InverseTemperature beta);
// Temperature where the closed form above reaches zero.
double entanglement_temperature_closed_form(double q, double omega_z);

// Bare two-qubit Hamiltonian; C_+ and C_- operators.
Matrix two_qubit_hamiltonian(double omega_z, double epsilon);
Matrix c_plus();
Matrix c_minus();

}  // namespace mfg
