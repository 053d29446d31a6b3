#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mfg {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Raised when an iterative numerical routine cannot reach its target.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inverse temperature with beta = infinity as a distinct state (never a large finite number).
class InverseTemperature {
 public:
  static InverseTemperature infinite() { return InverseTemperature(0.0, true); }
  static InverseTemperature finite(double beta);
  // kT = 0 maps to infinite.
  static InverseTemperature from_temperature(double kT);

  bool is_infinite() const { return infinite_; }
  double value() const;        // throws std::logic_error when infinite
  double temperature() const;  // 0 when infinite

 private:
  InverseTemperature(double b, bool inf) : beta_(b), infinite_(inf) {}
  double beta_;
  bool infinite_;
};

// Single-qubit basis is (|e>, |g>); multi-qubit kets are ordered with qubit 1 as the
// leftmost tensor factor, so two qubits read |ee>, |eg>, |ge>, |gg>.
enum class Axis { x, y, z };

Matrix pauli(Axis axis);
// Pauli operator acting on `qubit` (0-based) of an n-qubit register.
Matrix pauli(int qubit, Axis axis, int n_qubits = 2);
Matrix collective_sx(int n_qubits = 2);  // (1/2) sum sigma_x
Matrix kron(const Matrix& a, const Matrix& b);
Matrix embed(const Matrix& single, int qubit, int n_qubits);

double hermiticity_defect(const Matrix& a);  // max |A - A^dag|

struct Eigensystem {
  RealVector values;  // ascending
  Matrix vectors;     // columns
};
struct RealEigensystem {
  RealVector values;
  RealMatrix vectors;
};

// Cyclic Jacobi; throws std::invalid_argument on non-Hermitian input and
// NumericalError when the sweep limit is reached.
Eigensystem hermitian_eigensystem(const Matrix& a, double tol = 1e-14, int max_sweeps = 100);
RealEigensystem symmetric_eigensystem(const RealMatrix& a, double tol = 1e-14, int max_sweeps = 100);

class DensityMatrix {
 public:
  // dims: tensor factor dimensions (product must equal rows). `perturbative`
  // marks second-order states that may carry small negative eigenvalues.
  DensityMatrix(Matrix m, std::vector<int> dims, bool perturbative = false);
  static DensityMatrix qubits(Matrix m, bool perturbative = false);

  const Matrix& matrix() const { return m_; }
  const std::vector<int>& dims() const { return dims_; }
  bool perturbative() const { return perturbative_; }
  int dimension() const { return static_cast<int>(m_.rows()); }
  double min_eigenvalue() const;

 private:
  Matrix m_;
  std::vector<int> dims_;
  bool perturbative_;
};

// At infinite beta: equal mixture over the ground space (degeneracy tolerance
// degeneracy_tol * max(1, ||H||)).
DensityMatrix gibbs_state(const Matrix& h, InverseTemperature beta, std::vector<int> dims = {},
                          double degeneracy_tol = 1e-10);

Matrix partial_transpose(const DensityMatrix& rho, int factor);
// Sum of |negative eigenvalues| of the partial transpose on the last factor.
double negativity(const DensityMatrix& rho);
double purity(const DensityMatrix& rho);
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);

}  // namespace mfg
