#include "mfg/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mfg {

EigenOperatorDecomposition eigenoperator_decompose(const Matrix& h, const Matrix& x, double grouping_tol) {
  if (h.rows() != x.rows() || x.rows() != x.cols()) throw std::invalid_argument("decompose: shape mismatch");
  if (!(grouping_tol > 0.0)) throw std::invalid_argument("decompose: grouping tolerance must be positive");
  const Eigensystem es = hermitian_eigensystem(h);
  const Matrix xe = es.vectors.adjoint() * x * es.vectors;
  const Eigen::Index d = h.rows();
  const double hnorm = std::max(es.values.cwiseAbs().maxCoeff(), 1e-300);
  const double xmax = xe.cwiseAbs().maxCoeff();

  struct Entry {
    Eigen::Index i, j;
    double w;
  };
  std::vector<Entry> entries;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      if (std::abs(xe(i, j)) > 1e-15 * xmax) entries.push_back({i, j, es.values(i) - es.values(j)});
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.w < b.w; });

  EigenOperatorDecomposition out;
  const double tol = grouping_tol * hnorm;
  std::size_t k = 0;
  while (k < entries.size()) {
    std::size_t end = k + 1;
    while (end < entries.size() && entries[end].w - entries[end - 1].w <= tol) ++end;
    Matrix op = Matrix::Zero(d, d);
    double wsum = 0.0;
    for (std::size_t q = k; q < end; ++q) {
      op(entries[q].i, entries[q].j) = xe(entries[q].i, entries[q].j);
      wsum += entries[q].w;
    }
    out.operators.push_back(es.vectors * op * es.vectors.adjoint());
    out.frequencies.push_back(wsum / static_cast<double>(end - k));
    k = end;
  }
  return out;
}

namespace {

struct KernelValues {
  std::vector<double> d, dd;
};

KernelValues evaluate(const EigenOperatorDecomposition& dec, const ReservoirKernel& kernel, bool need_derivative) {
  KernelValues kv;
  for (double w : dec.frequencies) {
    kv.d.push_back(kernel.d(w));
    kv.dd.push_back(need_derivative ? kernel.d_derivative(w) : 0.0);
  }
  return kv;
}

double validity_from(const Matrix& rho_g, const Matrix& x, const EigenOperatorDecomposition& dec,
                     const KernelValues& kv, double lambda_sq, InverseTemperature beta) {
  if (beta.is_infinite()) return 4.0 * lambda_sq * std::abs((rho_g * x * x.adjoint()).trace().real());
  double s = 0.0;
  for (std::size_t n = 0; n < dec.operators.size(); ++n)
    s += (rho_g * dec.operators[n] * dec.operators[n].adjoint()).trace().real() * kv.d[n];
  return lambda_sq * beta.value() * std::abs(s);
}

}  // namespace

MFGResult mfg_perturbative(const Matrix& h, const Matrix& x, double lambda_sq, const ReservoirKernel& kernel,
                           double validity_threshold, std::vector<int> dims) {
  if (!(lambda_sq >= 0.0)) throw std::invalid_argument("mfg_perturbative: lambda^2 must be >= 0");
  if (hermiticity_defect(x) > 1e-10 * std::max(1.0, x.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("mfg_perturbative: coupling operator is not Hermitian");
  const InverseTemperature beta = kernel.beta();
  const DensityMatrix g = gibbs_state(h, beta, dims);
  const Matrix& rg = g.matrix();
  const Eigen::Index d = h.rows();

  const EigenOperatorDecomposition dec = eigenoperator_decompose(h, x);
  const KernelValues kv = evaluate(dec, kernel, true);
  const std::size_t k = dec.operators.size();

  TermBreakdown t{Matrix::Zero(d, d), Matrix::Zero(d, d), Matrix::Zero(d, d)};
  std::vector<Matrix> xdag(k), rx(k);
  for (std::size_t n = 0; n < k; ++n) {
    xdag[n] = dec.operators[n].adjoint();
    rx[n] = rg * dec.operators[n];
  }
  for (std::size_t n = 0; n < k; ++n) {
    const Matrix& xn = dec.operators[n];
    if (!beta.is_infinite()) {
      const Matrix a = xn * xdag[n];
      const Complex avg = (rg * a).trace();
      t.thermal += beta.value() * kv.d[n] * (rg * a - avg * rg);
    }
    t.derivative += kv.dd[n] * (xdag[n] * rx[n] - rx[n] * xdag[n]);
  }
  for (std::size_t m = 0; m < k; ++m) {
    const Matrix& xm = dec.operators[m];
    for (std::size_t n = 0; n < k; ++n) {
      if (m == n) continue;
      const Matrix xr = xdag[n] * rg;
      const Matrix c1 = xm * xr - xr * xm;
      const Matrix c2 = xdag[m] * rx[n] - rx[n] * xdag[m];
      t.cross += (kv.d[n] / (dec.frequencies[m] - dec.frequencies[n])) * (c1 - c2);
    }
  }
  t.thermal *= lambda_sq;
  t.derivative *= lambda_sq;
  t.cross *= lambda_sq;
  Matrix rho = rg + t.thermal + t.derivative + t.cross;
  rho = (0.5 * (rho + rho.adjoint())).eval();
  if (!rho.allFinite()) throw NumericalError("mfg_perturbative: non-finite state");

  const double v = validity_from(rg, x, dec, kv, lambda_sq, beta);
  return {DensityMatrix(std::move(rho), g.dims(), true), v, v < validity_threshold, std::move(t)};
}

double validity_metric(const Matrix& h, const Matrix& x, double lambda_sq, const ReservoirKernel& kernel) {
  const DensityMatrix g = gibbs_state(h, kernel.beta());
  const EigenOperatorDecomposition dec = eigenoperator_decompose(h, x);
  if (kernel.beta().is_infinite()) return validity_from(g.matrix(), x, dec, {}, lambda_sq, kernel.beta());
  return validity_from(g.matrix(), x, dec, evaluate(dec, kernel, false), lambda_sq, kernel.beta());
}

}  // namespace mfg
