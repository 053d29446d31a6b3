#pragma once

#include <vector>

#include "mfg/qubit_algebra.hpp"
#include "mfg/spectral.hpp"

namespace mfg {

// X = sum_n X_n with [H, X_n] = w_n X_n. Transitions whose Bohr frequencies
// differ by less than grouping_tol * ||H|| share one component.
struct EigenOperatorDecomposition {
  std::vector<Matrix> operators;
  std::vector<double> frequencies;
};

EigenOperatorDecomposition eigenoperator_decompose(const Matrix& h, const Matrix& x, double grouping_tol = 1e-9);

struct TermBreakdown {
  Matrix thermal;     // beta-weighted population term (zero at infinite beta)
  Matrix derivative;  // dD/dw term
  Matrix cross;       // pairs of distinct Bohr frequencies
};

struct MFGResult {
  DensityMatrix rho;
  double validity;
  bool reliable;
  TermBreakdown terms;  // already multiplied by lambda^2
};

// Second-order mean-force Gibbs state for H_S + lambda X (x) B.
MFGResult mfg_perturbative(const Matrix& h, const Matrix& x, double lambda_sq, const ReservoirKernel& kernel,
                           double validity_threshold = 0.1, std::vector<int> dims = {});

// lambda^2 beta |sum_n Tr[rho_G X_n X_n^dag] D(w_n)| at finite beta;
// 4 lambda^2 Tr[rho_G X X^dag] at infinite beta.
double validity_metric(const Matrix& h, const Matrix& x, double lambda_sq, const ReservoirKernel& kernel);

}  // namespace mfg
