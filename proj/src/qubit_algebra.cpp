#include "mfg/qubit_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mfg {

InverseTemperature InverseTemperature::finite(double beta) {
  if (!(beta >= 0.0) || std::isinf(beta))
    throw std::invalid_argument("inverse temperature must be finite and non-negative");
  return InverseTemperature(beta, false);
}

InverseTemperature InverseTemperature::from_temperature(double kT) {
  if (!(kT >= 0.0)) throw std::invalid_argument("temperature must be non-negative");
  if (kT == 0.0) return infinite();
  return InverseTemperature(1.0 / kT, false);
}

double InverseTemperature::value() const {
  if (infinite_) throw std::logic_error("beta is infinite");
  return beta_;
}

double InverseTemperature::temperature() const { return infinite_ ? 0.0 : 1.0 / beta_; }

Matrix pauli(Axis axis) {
  Matrix s(2, 2);
  const Complex i(0.0, 1.0);
  switch (axis) {
    case Axis::x: s << 0, 1, 1, 0; break;
    case Axis::y: s << 0, -i, i, 0; break;
    case Axis::z: s << 1, 0, 0, -1; break;
  }
  return s;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix embed(const Matrix& single, int qubit, int n_qubits) {
  if (qubit < 0 || qubit >= n_qubits) throw std::invalid_argument("qubit index out of range");
  Matrix out = Matrix::Identity(1, 1);
  for (int k = 0; k < n_qubits; ++k)
    out = kron(out, k == qubit ? single : Matrix(Matrix::Identity(2, 2)));
  return out;
}

Matrix pauli(int qubit, Axis axis, int n_qubits) { return embed(pauli(axis), qubit, n_qubits); }

Matrix collective_sx(int n_qubits) {
  const int d = 1 << n_qubits;
  Matrix s = Matrix::Zero(d, d);
  for (int k = 0; k < n_qubits; ++k) s += 0.5 * pauli(k, Axis::x, n_qubits);
  return s;
}

double hermiticity_defect(const Matrix& a) {
  if (a.rows() != a.cols()) return INFINITY;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

namespace {

inline double conj_of(double x) { return x; }
inline Complex conj_of(const Complex& z) { return std::conj(z); }
inline double real_of(double x) { return x; }
inline double real_of(const Complex& z) { return z.real(); }

template <typename Scalar>
void jacobi(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a, double tol, int max_sweeps,
            RealVector& values, Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& vectors) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = a.rows();
  Mat v = Mat::Identity(n, n);
  const double scale = std::max(a.norm(), 1e-300);

  auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) s += std::norm(a(p, q));
    return std::sqrt(2.0 * s);
  };

  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    if (off_norm() <= tol * scale) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Scalar apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag <= 1e-300) continue;
        const double app = real_of(a(p, p));
        const double aqq = real_of(a(q, q));
        // tiny relative to both diagonals: drop
        if (sweep > 3 && mag < 1e-18 * (std::abs(app) + std::abs(aqq))) {
          a(p, q) = Scalar(0);
          a(q, p) = Scalar(0);
          continue;
        }
        const Scalar phase = apq / mag;
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // J = diag-phase^dag * real rotation; columns p,q
        const Scalar jpp = c;
        const Scalar jpq = s;
        const Scalar jqp = -s * conj_of(phase);
        const Scalar jqq = c * conj_of(phase);
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * jpp + akq * jqp;
          a(k, q) = akp * jpq + akq * jqq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar apk = a(p, k), aqk = a(q, k);
          a(p, k) = conj_of(jpp) * apk + conj_of(jqp) * aqk;
          a(q, k) = conj_of(jpq) * apk + conj_of(jqq) * aqk;
        }
        a(p, q) = Scalar(0);
        a(q, p) = Scalar(0);
        a(p, p) = real_of(a(p, p));
        a(q, q) = real_of(a(q, q));
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * jpp + vkq * jqp;
          v(k, q) = vkp * jpq + vkq * jqq;
        }
      }
    }
  }
  if (sweep == max_sweeps && off_norm() > tol * scale)
    throw NumericalError("Jacobi eigensolver: no convergence after " + std::to_string(max_sweeps) +
                         " sweeps (off-diagonal norm " + std::to_string(off_norm()) + ")");

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return real_of(a(i, i)) < real_of(a(j, j)); });
  values.resize(n);
  vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    values(k) = real_of(a(order[k], order[k]));
    vectors.col(k) = v.col(order[k]);
  }
}

void check_square(Eigen::Index r, Eigen::Index c) {
  if (r != c || r == 0) throw std::invalid_argument("eigensystem: matrix must be square and non-empty");
}

}  // namespace

Eigensystem hermitian_eigensystem(const Matrix& a, double tol, int max_sweeps) {
  check_square(a.rows(), a.cols());
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (hermiticity_defect(a) > 1e-10 * scale)
    throw std::invalid_argument("eigensystem: matrix is not Hermitian");
  Eigensystem es;
  jacobi<Complex>(0.5 * (a + a.adjoint()), tol, max_sweeps, es.values, es.vectors);
  return es;
}

RealEigensystem symmetric_eigensystem(const RealMatrix& a, double tol, int max_sweeps) {
  check_square(a.rows(), a.cols());
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("eigensystem: matrix is not symmetric");
  RealEigensystem es;
  jacobi<double>(0.5 * (a + a.transpose()), tol, max_sweeps, es.values, es.vectors);
  return es;
}

DensityMatrix::DensityMatrix(Matrix m, std::vector<int> dims, bool perturbative)
    : m_(std::move(m)), dims_(std::move(dims)), perturbative_(perturbative) {
  if (m_.rows() != m_.cols() || m_.rows() == 0)
    throw std::invalid_argument("density matrix must be square and non-empty");
  if (dims_.empty()) dims_ = {static_cast<int>(m_.rows())};
  long prod = 1;
  for (int d : dims_) {
    if (d < 1) throw std::invalid_argument("density matrix: factor dimension < 1");
    prod *= d;
  }
  if (prod != m_.rows()) throw std::invalid_argument("density matrix: dims do not match size");
  if (!m_.allFinite()) throw NumericalError("density matrix contains non-finite entries");
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  if (hermiticity_defect(m_) > 1e-10 * scale)
    throw std::invalid_argument("density matrix is not Hermitian");
  if (std::abs(m_.trace() - Complex(1.0)) > 1e-10)
    throw std::invalid_argument("density matrix trace differs from one");
  m_ = (0.5 * (m_ + m_.adjoint())).eval();
}

DensityMatrix DensityMatrix::qubits(Matrix m, bool perturbative) {
  int n = 0;
  while ((1L << n) < m.rows()) ++n;
  if ((1L << n) != m.rows()) throw std::invalid_argument("not a qubit register dimension");
  return DensityMatrix(std::move(m), std::vector<int>(std::max(n, 1), 2), perturbative);
}

double DensityMatrix::min_eigenvalue() const { return hermitian_eigensystem(m_).values(0); }

DensityMatrix gibbs_state(const Matrix& h, InverseTemperature beta, std::vector<int> dims,
                          double degeneracy_tol) {
  const Eigensystem es = hermitian_eigensystem(h);
  const Eigen::Index n = es.values.size();
  const double e0 = es.values(0);
  RealVector w(n);
  if (beta.is_infinite()) {
    const double tol = degeneracy_tol * std::max(1.0, es.values.cwiseAbs().maxCoeff());
    for (Eigen::Index k = 0; k < n; ++k) w(k) = (es.values(k) - e0 <= tol) ? 1.0 : 0.0;
  } else {
    const double b = beta.value();
    for (Eigen::Index k = 0; k < n; ++k) w(k) = std::exp(-b * (es.values(k) - e0));
  }
  w /= w.sum();
  Matrix rho = es.vectors * w.cast<Complex>().asDiagonal() * es.vectors.adjoint();
  if (dims.empty()) {
    int q = 0;
    while ((1L << q) < n) ++q;
    if ((1L << q) == n && q > 0) dims.assign(q, 2);
  }
  return DensityMatrix(std::move(rho), std::move(dims));
}

namespace {

std::vector<int> digits(long index, const std::vector<int>& dims) {
  std::vector<int> d(dims.size());
  for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
    d[k] = static_cast<int>(index % dims[k]);
    index /= dims[k];
  }
  return d;
}

long compose(const std::vector<int>& d, const std::vector<int>& dims) {
  long idx = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) idx = idx * dims[k] + d[k];
  return idx;
}

}  // namespace

Matrix partial_transpose(const DensityMatrix& rho, int factor) {
  const auto& dims = rho.dims();
  if (factor < 0 || factor >= static_cast<int>(dims.size()))
    throw std::invalid_argument("partial_transpose: factor out of range");
  const Matrix& m = rho.matrix();
  const long n = m.rows();
  Matrix out(n, n);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      auto di = digits(i, dims), dj = digits(j, dims);
      std::swap(di[factor], dj[factor]);
      out(compose(di, dims), compose(dj, dims)) = m(i, j);
    }
  }
  return out;
}

double negativity(const DensityMatrix& rho) {
  if (rho.dims().size() < 2) throw std::invalid_argument("negativity needs a bipartite state");
  const Eigensystem es = hermitian_eigensystem(partial_transpose(rho, static_cast<int>(rho.dims().size()) - 1));
  double s = 0.0;
  for (Eigen::Index k = 0; k < es.values.size(); ++k)
    if (es.values(k) < 0) s -= es.values(k);
  return s;
}

double purity(const DensityMatrix& rho) {
  const Matrix& m = rho.matrix();
  return (m * m).trace().real();
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
  const auto& dims = rho.dims();
  std::vector<bool> kept(dims.size(), false);
  for (int k : keep) {
    if (k < 0 || k >= static_cast<int>(dims.size()) || kept[k])
      throw std::invalid_argument("partial_trace: bad factor list");
    kept[k] = true;
  }
  std::vector<int> kdims, keep_sorted(keep);
  std::sort(keep_sorted.begin(), keep_sorted.end());
  for (int k : keep_sorted) kdims.push_back(dims[k]);
  long kd = 1;
  for (int d : kdims) kd *= d;
  if (kdims.empty()) kdims = {1};
  Matrix out = Matrix::Zero(kd, kd);
  const Matrix& m = rho.matrix();
  const long n = m.rows();
  for (long i = 0; i < n; ++i) {
    const auto di = digits(i, dims);
    for (long j = 0; j < n; ++j) {
      const auto dj = digits(j, dims);
      bool diag = true;
      for (std::size_t k = 0; k < dims.size() && diag; ++k)
        if (!kept[k] && di[k] != dj[k]) diag = false;
      if (!diag) continue;
      std::vector<int> ri, rj;
      for (int k : keep_sorted) {
        ri.push_back(di[k]);
        rj.push_back(dj[k]);
      }
      out(ri.empty() ? 0 : compose(ri, kdims), rj.empty() ? 0 : compose(rj, kdims)) += m(i, j);
    }
  }
  return DensityMatrix(std::move(out), kdims, rho.perturbative());
}

}  // namespace mfg
