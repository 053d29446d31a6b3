#include <doctest.h>

#include <cmath>
#include <random>

#include "mfg/engine.hpp"
#include "mfg/narrow.hpp"
#include "mfg/weak.hpp"

using namespace mfg;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

ReservoirKernel single_mode(InverseTemperature beta, double omega_z = 0.02) {
  return ReservoirKernel(SpectralDensity::primary(1.0, 0.0, omega_z), beta);
}

Matrix n_qubit_hamiltonian(int n, double omega_z) {
  Matrix h = Matrix::Zero(1 << n, 1 << n);
  for (int q = 0; q < n; ++q) h += 0.5 * omega_z * pauli(q, Axis::z, n);
  return h;
}

void check_decomposition(const Matrix& h, const Matrix& x, const EigenOperatorDecomposition& dec) {
  Matrix sum = Matrix::Zero(x.rows(), x.cols());
  const double hn = h.cwiseAbs().maxCoeff();
  for (std::size_t n = 0; n < dec.operators.size(); ++n) {
    const Matrix& xn = dec.operators[n];
    sum += xn;
    CHECK(max_abs(h * xn - xn * h - dec.frequencies[n] * xn) <= 1e-10 * hn * max_abs(xn) * x.rows());
    for (std::size_t m = 0; m < n; ++m) CHECK(std::abs(dec.frequencies[m] - dec.frequencies[n]) > 1e-9 * hn);
  }
  CHECK(max_abs(sum - x) < 1e-12);
}

}  // namespace

TEST_CASE("decomposition of S_x for detuned qubits: four single-qubit ladder operators") {
  const double wz = 0.02, eps = 0.1;
  const Matrix h = two_qubit_hamiltonian(wz, eps), sx = collective_sx(2);
  const auto dec = eigenoperator_decompose(h, sx);
  REQUIRE(dec.operators.size() == 4);
  check_decomposition(h, sx, dec);
  const double expect[4] = {-wz * (1 + eps), -wz * (1 - eps), wz * (1 - eps), wz * (1 + eps)};
  const Complex i(0, 1);
  for (int n = 0; n < 4; ++n) {
    CHECK(std::abs(dec.frequencies[n] - expect[n]) < 1e-15);
    const int qubit = std::abs(std::abs(expect[n]) - wz * (1 + eps)) < 1e-12 ? 0 : 1;
    const double sign = expect[n] > 0 ? 1.0 : -1.0;
    const Matrix ref = 0.25 * (pauli(qubit, Axis::x, 2) + sign * i * pauli(qubit, Axis::y, 2));
    CHECK(max_abs(dec.operators[n] - ref) < 1e-14);
    CHECK(Eigen::FullPivLU<Matrix>(dec.operators[n]).rank() == 2);
  }
}

TEST_CASE("degenerate qubits merge into two components") {
  const Matrix h = two_qubit_hamiltonian(0.02, 0.0), sx = collective_sx(2);
  const auto dec = eigenoperator_decompose(h, sx);
  REQUIRE(dec.operators.size() == 2);
  check_decomposition(h, sx, dec);
  CHECK(dec.frequencies[0] == doctest::Approx(-0.02));
  CHECK(dec.frequencies[1] == doctest::Approx(0.02));
}

TEST_CASE("effective Hamiltonian: S_x splits over the two ground-state transitions") {
  const EffectiveSystem es(0.02, 0.0, 0.3, 1.0, InverseTemperature::infinite());
  const Matrix h = es.hamiltonian(), sx = collective_sx(2);
  const auto dec = eigenoperator_decompose(h, sx);
  REQUIRE(dec.operators.size() == 4);
  check_decomposition(h, sx, dec);
  const auto e = es.labelled_energies();
  const double w1 = e[0] - e[2], w2 = e[0] - e[3];
  std::vector<double> ref{-std::abs(w2), -std::abs(w1), std::abs(w1), std::abs(w2)};
  std::sort(ref.begin(), ref.end());
  for (int n = 0; n < 4; ++n) CHECK(std::abs(dec.frequencies[n] - ref[n]) < 1e-14);
}

TEST_CASE("zeroth order and linearity in lambda^2") {
  std::mt19937 rng(1);
  std::normal_distribution<double> nd;
  Matrix h(4, 4), x(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      h(i, j) = Complex(nd(rng), nd(rng)) * 0.1;
      x(i, j) = Complex(nd(rng), nd(rng));
    }
  h = 0.5 * (h + h.adjoint()).eval();
  x = 0.5 * (x + x.adjoint()).eval();
  for (const auto beta : {InverseTemperature::infinite(), InverseTemperature::finite(5.0)}) {
    const ReservoirKernel k(SpectralDensity::primary(1.0, 0.2, 0.02), beta);
    const Matrix rg = gibbs_state(h, beta).matrix();
    const MFGResult r0 = mfg_perturbative(h, x, 0.0, k);
    CHECK(max_abs(r0.rho.matrix() - rg) == 0.0);
    CHECK(r0.validity == 0.0);
    const MFGResult r1 = mfg_perturbative(h, x, 0.01, k);
    const MFGResult r3 = mfg_perturbative(h, x, 0.03, k);
    CHECK(max_abs((r3.rho.matrix() - rg) - 3.0 * (r1.rho.matrix() - rg)) < 1e-15);
    // corrections are traceless, Hermitian
    for (const Matrix* t : {&r1.terms.thermal, &r1.terms.derivative, &r1.terms.cross})
      CHECK(std::abs(t->trace()) <= 1e-12);
    CHECK(hermiticity_defect(r1.terms.thermal + r1.terms.derivative + r1.terms.cross) < 1e-10);
    CHECK(std::abs(r1.rho.matrix().trace() - 1.0) < 1e-14);
    if (beta.is_infinite()) CHECK(max_abs(r1.terms.thermal) == 0.0);
  }
}

TEST_CASE("engine reproduces the single-mode two-qubit closed form") {
  for (const auto beta : {InverseTemperature::infinite(), InverseTemperature::finite(1 / 0.006),
                          InverseTemperature::finite(2500.0)}) {
    const ReservoirKernel k = single_mode(beta);
    const Matrix h = two_qubit_hamiltonian(0.02, 0.0);
    const MFGResult e = mfg_perturbative(h, collective_sx(2), 0.02, k);
    const WeakResult w = mfg_weak_two_qubit(0.02, 0.0, 0.02, k);
    CHECK(max_abs(e.rho.matrix() - w.rho.matrix()) < 1e-10);
  }
}

TEST_CASE("validity metric: linear in N, N lambda^2 at zero temperature, N beta Q / 4 for small splitting") {
  const double wz = 0.02, lam2 = 0.01;
  for (const auto beta : {InverseTemperature::infinite(), InverseTemperature::finite(100.0)}) {
    const ReservoirKernel k = single_mode(beta, wz);
    std::vector<double> v;
    for (int n = 1; n <= 5; ++n) v.push_back(validity_metric(n_qubit_hamiltonian(n, wz), collective_sx(n), lam2, k));
    for (int n = 1; n <= 5; ++n) CHECK(v[n - 1] == doctest::Approx(n * v[0]).epsilon(1e-12));
    if (beta.is_infinite()) CHECK(v[0] == doctest::Approx(lam2).epsilon(1e-12));
    CHECK(validity_metric(n_qubit_hamiltonian(2, wz), collective_sx(2), 0.0, k) == 0.0);
  }
  // wz << omega0: metric ~ N beta Q / 4
  const double beta = 100.0;
  const ReservoirKernel k(SpectralDensity::primary(1.0, 0.2, 1e-4), InverseTemperature::finite(beta));
  const double v = validity_metric(n_qubit_hamiltonian(3, 1e-4), collective_sx(3), lam2, k);
  CHECK(v == doctest::Approx(3 * beta * lam2 * 1e-4 / 4).epsilon(1e-3));
}

TEST_CASE("state is continuous across the degeneracy-merge threshold") {
  // smooth kernels only: the residue form at T = 0 and the single-mode form at finite T
  const double wz = 0.02, lam2 = 0.02;
  const Matrix sx = collective_sx(2);
  const ReservoirKernel k0(SpectralDensity::primary(1.0, 0.2, wz), InverseTemperature::infinite());
  const ReservoirKernel k1 = single_mode(InverseTemperature::finite(1 / 0.006), wz);
  for (const ReservoirKernel* k : {&k0, &k1}) {
    const Matrix merged = mfg_perturbative(two_qubit_hamiltonian(wz, 0.0), sx, lam2, *k).rho.matrix();
    for (double eps : {1e-11, 1e-10, 1e-9, 1e-8, 1e-7}) {
      const Matrix r = mfg_perturbative(two_qubit_hamiltonian(wz, eps), sx, lam2, *k).rho.matrix();
      CHECK(max_abs(r - merged) <= 1e-6);
    }
  }
}

TEST_CASE("engine on the effective Hamiltonian never couples the singlet") {
  const EffectiveSystem es(0.02, 0.0, 0.3, 1.0, InverseTemperature::finite(1 / 0.004));
  const ReservoirKernel k(SpectralDensity::reaction_coordinate(1.0, 0.1, 0.02), es.beta());
  const MFGResult r = mfg_perturbative(es.hamiltonian(), collective_sx(2), 0.01, k);
  const Matrix v = es.labelled_vectors();
  const Matrix rl = v.adjoint() * r.rho.matrix() * v;
  const Matrix gl = v.adjoint() * gibbs_state(es.hamiltonian(), es.beta()).matrix() * v;
  for (int j : {0, 2, 3}) CHECK(std::abs(rl(1, j)) < 1e-14);
  // |2> is only rescaled by the thermal term: its relative change equals minus the
  // lambda^2 beta <X X^dag> D weight shared by all populations
  const double s = -(rl(1, 1) - gl(1, 1)).real() / gl(1, 1).real();
  CHECK(s > 0);
  CHECK(std::abs((rl.diagonal() - gl.diagonal()).sum()) < 1e-14);
}

TEST_CASE("input validation") {
  const ReservoirKernel k = single_mode(InverseTemperature::infinite());
  Matrix nh = Matrix::Zero(4, 4);
  nh(0, 1) = 1.0;
  CHECK_THROWS_AS(mfg_perturbative(two_qubit_hamiltonian(0.02, 0), nh, 0.1, k), std::invalid_argument);
  CHECK_THROWS_AS(mfg_perturbative(two_qubit_hamiltonian(0.02, 0), collective_sx(2), -0.1, k), std::invalid_argument);
  CHECK_THROWS_AS(eigenoperator_decompose(Matrix::Zero(4, 4), Matrix::Zero(2, 2)), std::invalid_argument);
  // unreliable results are flagged but returned
  const MFGResult r = mfg_perturbative(two_qubit_hamiltonian(0.02, 0), collective_sx(2), 1.0, k);
  CHECK(!r.reliable);
  CHECK(r.validity >= 1.0);
}
