#pragma once

#include "mfg/qubit_algebra.hpp"

namespace mfg {

// Two qubits + one bosonic mode truncated at n_max quanta:
// H = H_S (x) 1 + Omega 1 (x) a^dag a + g S_x (x) (a + a^dag).
struct DickeParameters {
  double omega_z;
  double epsilon;
  double g;
  double rc_frequency;
};

// Basis index = qubit_index * (n_max + 1) + n.
RealMatrix build_dicke(const DickeParameters& p, int n_max);

struct OracleResult {
  DensityMatrix rho;   // two-qubit reduced state
  int n_max;           // cutoff used
  double last_change;  // max-norm change of rho between the last two cutoffs
};

// Reduced state at one fixed cutoff.
DensityMatrix reduced_thermal_state_fixed(const DickeParameters& p, InverseTemperature beta, int n_max);

// Cutoff raised in steps of 10 from n_start until the reduced state moves by
// less than tol; NumericalError past n_cap.
OracleResult reduced_thermal_state(const DickeParameters& p, InverseTemperature beta, double tol = 1e-8,
                                   int n_start = 20, int n_cap = 200);

}  // namespace mfg
