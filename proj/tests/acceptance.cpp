// Acceptance run: one PASS/FAIL line per criterion, details underneath.
// Units: Omega = 1 throughout.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Eigenvalues>

#include "mfg/engine.hpp"
#include "mfg/narrow.hpp"
#include "mfg/oracle_ed.hpp"
#include "mfg/sweep.hpp"
#include "mfg/weak.hpp"

using namespace mfg;

namespace {

struct Check {
  std::string what;
  bool ok;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  std::vector<Check> checks;
  void add(const std::string& what, bool ok, const std::string& detail = "") { checks.push_back({what, ok, detail}); }
  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.ok; });
  }
};

std::string fmt(const char* f, double a) {
  char b[128];
  std::snprintf(b, sizeof b, f, a);
  return b;
}
std::string fmt(const char* f, double a, double c) {
  char b[160];
  std::snprintf(b, sizeof b, f, a, c);
  return b;
}
std::string fmt(const char* f, double a, double c, double d) {
  char b[200];
  std::snprintf(b, sizeof b, f, a, c, d);
  return b;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int k = 0; k < n; ++k) v[k] = n == 1 ? a : a + (b - a) * k / (n - 1);
  return v;
}

std::vector<double> logspace(double a, double b, int n) {
  std::vector<double> v = linspace(std::log(a), std::log(b), n);
  for (double& x : v) x = std::exp(x);
  return v;
}

const double wz = 0.02;

double n_zero_width(double omega_z, double eps, double g, double t) {
  return negativity(mfg_zero_width(EffectiveSystem(omega_z, eps, g, 1.0, InverseTemperature::from_temperature(t))));
}

double n_weak_gamma(double g, double gamma, double t) {
  return evaluate_point(Method::weak, {wz, 0.0, t, g, gamma}).negativity;
}

// -- 1 -------------------------------------------------------------------
Criterion oracle_agreement() {
  Criterion c{1, "oracle agreement of the zero-width state", {}};
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0, at_g = 0, at_t = 0;
  int n_max = 0;
  for (double t : {0.0, 0.003, 0.006, 0.013})
    for (int k = 1; k <= 10; ++k) {
      const double g = 0.05 * k;
      const OracleResult ed = reduced_thermal_state({wz, 0.0, g, 1.0}, InverseTemperature::from_temperature(t));
      const double d = std::abs(n_zero_width(wz, 0.0, g, t) - negativity(ed.rho));
      n_max = std::max(n_max, ed.n_max);
      if (d > worst) worst = d, at_g = g, at_t = t;
    }
  const double secs = seconds_since(t0);
  c.add("max |N_zw - N_ED| <= 0.01 over 40 points", worst <= 0.01,
        fmt("max %.3e at g=%.2f", worst, at_g) + fmt(", T=%.3f", at_t) + fmt(", largest cutoff %g", n_max));
  c.add("runtime < 120 s", secs < 120, fmt("%.1f s", secs));
  return c;
}

// -- 2 -------------------------------------------------------------------
Criterion weak_regime() {
  Criterion c{2, "weak-coupling state in the weak-coupling regime", {}};
  double worst = 0, at_g = 0, at_t = 0;
  for (double t : {0.0, 0.006})
    for (int k = 1; k <= 10; ++k) {
      const double g = 0.01 * k;
      const double d = std::abs(n_weak_gamma(g, 0.0, t) - n_zero_width(wz, 0.0, g, t));
      if (d > worst) worst = d, at_g = g, at_t = t;
    }
  c.add("max |N_weak - N_zw| <= 0.02 for g <= 0.1, T in {0, 0.006}", worst <= 0.02,
        fmt("max %.3e at g=%.2f, T=%.3f", worst, at_g, at_t));
  return c;
}

// -- 3 -------------------------------------------------------------------
Criterion zero_t_peak() {
  Criterion c{3, "zero-temperature entanglement peak in g", {}};
  const GPeakResult p0 = find_g_peak(Method::zero_width, {wz, 0.0, 0.0, 0.0, 0.0}, 0.05, 0.6, 1e-6);
  const GPeakResult p1 = find_g_peak(Method::zero_width, {wz, 0.0, 0.006, 0.0, 0.0}, 0.05, 0.6, 1e-6);
  c.add("g_peak(T=0) in [0.25, 0.35]", p0.bracketed && p0.g_peak >= 0.25 && p0.g_peak <= 0.35,
        fmt("g_peak=%.6f, N=%.6f", p0.g_peak, p0.negativity));
  c.add("g_peak(T=0.006) < g_peak(T=0)", p1.bracketed && p1.g_peak < p0.g_peak, fmt("g_peak=%.6f", p1.g_peak));
  return c;
}

// -- 4 -------------------------------------------------------------------
Criterion width_enhancement() {
  Criterion c{4, "entanglement enhancement by bath width (weak method, g = 0.02)", {}};
  const double g = 0.02, cap = 1 / std::sqrt(5.0);
  std::vector<double> gs;
  for (int k = 0; k <= 44; ++k) gs.push_back(0.01 * k);
  for (double x : {0.445, 0.446, 0.447, 0.4472}) gs.push_back(x);
  std::vector<double> n;
  for (double gm : gs) n.push_back(n_weak_gamma(g, gm, 0.0));
  const std::size_t imax = std::max_element(n.begin(), n.end()) - n.begin();

  bool increasing = true;
  for (std::size_t k = 1; k < gs.size() && gs[k] <= 0.3 + 1e-12; ++k) increasing = increasing && n[k] > n[k - 1];
  c.add("N increasing on [0, 0.3]", increasing, fmt("N(0)=%.6f, N(0.3)=%.6f", n[0], n[30]));

  const double argmax = gs[imax];
  c.add("argmax gamma in [0.35, 0.45]", argmax >= 0.35 && argmax <= 0.45 && imax + 1 < gs.size(),
        fmt("argmax at gamma=%.4f (grid end %.5f, cap %.5f)", argmax, gs.back(), cap) +
            (imax + 1 == gs.size() ? "; maximum sits at the last grid point below the cap" : ""));

  // steep decrease: N drops by at least half of its peak-to-start rise within 0.05 past the peak
  bool steep = false;
  if (imax + 1 < gs.size()) {
    const double rise = n[imax] - n[0];
    for (std::size_t k = imax + 1; k < gs.size() && gs[k] <= argmax + 0.05; ++k)
      if (n[imax] - n[k] >= 0.5 * rise) steep = true;
  }
  c.add("steep decrease after the peak", steep,
        fmt("N at the last three grid points: %.6f %.6f %.6f", n[gs.size() - 3], n[gs.size() - 2], n.back()));

  double worst = 0, at = 0;
  for (std::size_t k = 0; k <= imax; ++k) {
    const double q = g * g / (1 - 4 * gs[k] * gs[k]);
    const double cf = negativity_closed_form(q, wz, InverseTemperature::infinite());
    const double rel = std::abs(cf - n[k]) / n[k];
    if (rel > worst) worst = rel, at = gs[k];
  }
  c.add("closed form within 10% up to the argmax", worst <= 0.10,
        fmt("max relative deviation %.3f at gamma=%.3f", worst, at));

  const double hot0 = n_weak_gamma(g, 0.0, 0.004), hot4 = n_weak_gamma(g, 0.4, 0.004);
  c.add("T=0.004: N(0)=0 and N(0.4)>0", hot0 == 0.0 && hot4 > 0.0, fmt("N(0)=%.3e, N(0.4)=%.3e", hot0, hot4));
  return c;
}

// -- 5 -------------------------------------------------------------------
Criterion phase_map() {
  Criterion c{5, "sign of dN/dgamma^2 at gamma = 0 follows g_peak", {}};
  const std::vector<double> gs = linspace(0.05, 0.5, 20), ts = linspace(0.0, 0.012, 20);
  const double cell = gs[1] - gs[0];
  std::vector<double> dn(gs.size() * ts.size());
  std::vector<char> stable(dn.size());
  parallel_for(dn.size(), static_cast<int>(std::max(1u, std::thread::hardware_concurrency())), [&](std::size_t i) {
    const BroadeningDerivative b = dn_dgamma2({wz, 0.0, ts[i / gs.size()], gs[i % gs.size()], 0.0});
    dn[i] = b.value;
    stable[i] = b.stable;
  });
  bool structure = true, located = true;
  double worst = 0;
  int unstable = 0;
  std::string rows;
  for (std::size_t it = 0; it < ts.size(); ++it) {
    std::string signs;
    std::size_t first_neg = gs.size();
    for (std::size_t ig = 0; ig < gs.size(); ++ig) {
      const double v = dn[it * gs.size() + ig];
      unstable += !stable[it * gs.size() + ig];
      signs += v > 0 ? '+' : (v < 0 ? '-' : '0');
      if (v < 0 && first_neg == gs.size()) first_neg = ig;
    }
    // nothing negative below the first negative cell, nothing non-negative above it, some positive cell
    bool ok = first_neg > 0 && first_neg < gs.size();
    for (std::size_t ig = 0; ig < gs.size(); ++ig) {
      const double v = dn[it * gs.size() + ig];
      if (ig < first_neg && v < 0) ok = false;
      if (ig >= first_neg && v >= 0) ok = false;
    }
    ok = ok && signs.find('+') != std::string::npos;
    structure = structure && ok;
    const GPeakResult p = find_g_peak(Method::zero_width, {wz, 0.0, ts[it], 0.0, 0.0}, 0.05, 0.6, 1e-6);
    double miss = INFINITY;
    if (ok && p.bracketed) {
      const double boundary = 0.5 * (gs[first_neg - 1] + gs[first_neg]);
      miss = std::abs(boundary - p.g_peak);
    }
    located = located && miss <= cell;
    worst = std::max(worst, miss);
    rows += "      T=" + fmt("%.5f ", ts[it]) + signs + fmt("  g_peak=%.4f", p.g_peak) + "\n";
  }
  c.add("one sign change per temperature, positive below, negative above", structure);
  c.add("boundary within one cell of g_peak", located,
        fmt("worst distance %.4f, cell %.4f", worst, cell) + fmt(", %g unstable step-halvings", unstable) + "\n" +
            rows.substr(0, rows.size() - 1));
  return c;
}

// -- 6 -------------------------------------------------------------------
Criterion level_spacing() {
  Criterion c{6, "level spacing and asymmetry at g = 0.2, gamma = 0", {}};
  const double g = 0.2;
  const std::vector<double> ws = logspace(0.005, 0.2, 400);
  bool mono = true;
  double prev = INFINITY;
  for (double w : ws) {
    const double n = n_zero_width(w, 0.0, g, 0.0);
    mono = mono && n < prev;
    prev = n;
  }
  c.add("T=0: N increases as omega_z decreases over [0.005, 0.2]", mono);

  for (double t : {0.001, 0.002, 0.004}) {
    std::vector<double> n;
    for (double w : ws) n.push_back(n_zero_width(w, 0.0, g, t));
    const std::size_t i = std::max_element(n.begin(), n.end()) - n.begin();
    const bool interior = i > 0 && i + 1 < ws.size();
    // omega_z with gap = kT, by bisection (the gap grows with omega_z)
    double lo = ws.front(), hi = ws.back();
    auto gap = [&](double w) { return energy_gap(EffectiveSystem(w, 0.0, g, 1.0, InverseTemperature::infinite())); };
    const bool bracket = gap(lo) < t && gap(hi) > t;
    for (int k = 0; k < 200 && bracket; ++k) {
      const double mid = std::sqrt(lo * hi);
      (gap(mid) < t ? lo : hi) = mid;
    }
    const double ratio = n_zero_width(lo, 0.0, g, t) / n[i];
    c.add(fmt("T=%.3f: interior peak in omega_z, N(gap=kT)/N_peak = 0.5 +- 0.15", t),
          interior && bracket && std::abs(ratio - 0.5) <= 0.15,
          fmt("peak at omega_z=%.4f, gap=kT at omega_z=%.4f, ratio %.3f", ws[i], lo, ratio));
  }

  double worst = 0;
  const double n0 = n_zero_width(wz, 0.0, g, 0.0);
  for (double e = 0.0; e <= 0.9 + 1e-12; e += 0.05) worst = std::max(worst, std::abs(n_zero_width(wz, e, g, 0.0) / n0 - 1));
  c.add("T=0: N(eps)/N(0) = 1 +- 1e-6 on [0, 0.9]", worst <= 1e-6, fmt("max deviation %.2e", worst));

  for (double t : {0.001, 0.002, 0.004}) {
    bool dec = true;
    double p = INFINITY;
    for (double e = 0.0; e <= 1.0 + 1e-12; e += 0.02) {
      const double n = n_zero_width(wz, std::min(e, 1.0), g, t);
      dec = dec && (n < p || (n == 0.0 && p == 0.0));
      p = n;
    }
    const double at1 = n_zero_width(wz, 1.0, g, t);
    c.add(fmt("T=%.3f: N decreasing in eps, N(eps=1)=0", t), dec && at1 == 0.0, fmt("N(1)=%.2e", at1));
  }
  return c;
}

// -- 7 -------------------------------------------------------------------
Criterion kernel_correctness() {
  Criterion c{7, "zero-temperature kernel: residue vs quadrature, Hilbert identity", {}};
  double worst = 0;
  std::string where;
  auto compare = [&](const SpectralDensity& sd, double w) {
    const ReservoirKernel r(sd, InverseTemperature::infinite(), KernelMethod::residue);
    const ReservoirKernel q(sd, InverseTemperature::infinite(), KernelMethod::quadrature);
    const double rel = std::abs(r.d(w) - q.d(w)) / std::abs(q.d(w));
    if (rel > worst) {
      worst = rel;
      where = fmt("gamma=%.3f, omega=%.5f", sd.gamma(), w);
    }
  };
  int count = 0;
  // primary family: the weak-coupling width sweep, Bohr frequencies +-omega_z
  for (int k = 1; k <= 44; ++k) {
    const auto sd = SpectralDensity::primary_at_rc_frequency(1.0, 0.01 * k, wz);
    for (double w : {wz, -wz}) compare(sd, w), ++count;
  }
  // mapped family: Bohr frequencies of the effective Hamiltonian over the phase-map g grid
  for (double gm : {0.01, 0.05, 0.1, 0.2, 0.28}) {
    const auto sd = SpectralDensity::reaction_coordinate(std::sqrt(1 - 5 * gm * gm), gm, wz);
    for (double g : linspace(0.05, 0.5, 20)) {
      const auto e = EffectiveSystem(wz, 0.0, g, 1.0, InverseTemperature::infinite()).labelled_energies();
      for (double w : {e[0] - e[2], e[2] - e[0], e[0] - e[3], e[3] - e[0]}) compare(sd, w), ++count;
    }
  }
  c.add("residue vs quadrature within 1e-6 relative", worst <= 1e-6,
        fmt("max %.2e", worst) + " at " + where + fmt(" (%g frequencies)", count));

  double hw = 0;
  for (double gm : {0.05, 0.1, 0.2, 0.3, 0.4}) {
    const auto sd = SpectralDensity::primary_at_rc_frequency(1.0, gm, wz);
    const auto rc = rc_spectral_density(sd);
    const double lrc = rc_params(sd, 1.0).lambda_rc_sq;
    for (double w : linspace(0.03, 2.97, 50)) {
      const double ref = lrc * rc.value(w);
      hw = std::max(hw, std::abs(rc_density_from_hilbert(sd, w) - ref) / ref);
    }
  }
  c.add("mapped density from the Hilbert transform within 1e-4 relative on (0, 3)", hw <= 1e-4,
        fmt("max %.2e", hw));
  return c;
}

// -- 8 -------------------------------------------------------------------
Criterion structural() {
  Criterion c{8, "structural invariants", {}};
  std::mt19937 rng(2024);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ug(0.0, 1.0);
  double tr = 0, unit = 0, mineig = INFINITY;
  for (int k = 0; k < 1000; ++k) {
    Matrix a(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) a(i, j) = Complex(nd(rng), nd(rng));
    const int rank = 1 + k % 4;
    Matrix psd = a.leftCols(rank) * a.leftCols(rank).adjoint();
    psd /= psd.trace().real();
    const double g = ug(rng);
    const Matrix l = channel_l(psd, g, 1.0);
    tr = std::max(tr, std::abs(l.trace() - 1.0));
    unit = std::max(unit, (channel_l(Matrix::Identity(4, 4), g, 1.0) - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff());
    mineig = std::min(mineig, Eigen::SelfAdjointEigenSolver<Matrix>(l).eigenvalues().minCoeff());
  }
  c.add("channel trace-preserving, unital, positive on 1000 random states", tr < 1e-13 && unit < 1e-14 && mineig >= -1e-12,
        fmt("trace err %.1e, unit err %.1e, min eigenvalue %.1e", tr, unit, mineig));

  double trace_worst = 0, weak_diff = 0, c8 = 0, b4 = 0;
  for (double t : {0.0, 0.006}) {
    const auto beta = InverseTemperature::from_temperature(t);
    const ReservoirKernel k(SpectralDensity::primary(1.0, 0.2, wz), beta);
    for (double eps : {0.0, 0.3}) {
      const MFGResult r = mfg_perturbative(two_qubit_hamiltonian(wz, eps), collective_sx(2), 0.05, k);
      for (const Matrix* m : {&r.terms.thermal, &r.terms.derivative, &r.terms.cross})
        trace_worst = std::max(trace_worst, std::abs(m->trace()));
    }
    const MFGResult e = mfg_perturbative(two_qubit_hamiltonian(wz, 0.0), collective_sx(2), 0.05, k);
    const WeakResult w = mfg_weak_two_qubit(wz, 0.0, 0.05, k);
    weak_diff = std::max(weak_diff, (e.rho.matrix() - w.rho.matrix()).cwiseAbs().maxCoeff());
    const WeakResult n2 = mfg_weak_n_qubit(2, wz, 0.05, k);
    b4 = std::max(b4, (n2.rho.matrix() - w.rho.matrix()).cwiseAbs().maxCoeff());
    for (double g : {0.1, 0.3, 0.5}) {
      const NarrowResult nr = mfg_narrow(EffectiveSystem(wz, 0.0, g, 1.0, beta), 0.1);
      c8 = std::max(c8, nr.analytic_discrepancy.value_or(INFINITY));
    }
  }
  c.add("perturbative corrections traceless", trace_worst <= 1e-12, fmt("max |Tr| %.1e", trace_worst));
  c.add("engine equals the two-qubit closed form (eps = 0) to 1e-9", weak_diff <= 1e-9, fmt("%.1e", weak_diff));
  c.add("engine narrow state equals its closed form (eps = 0) to 1e-9", c8 <= 1e-9, fmt("%.1e", c8));
  c.add("N-qubit form at N = 2 equals the two-qubit form", b4 <= 1e-14, fmt("%.1e", b4));

  bool cs = true;
  double near = 0;
  for (double gm : {1e-3, 0.05, 0.1, 0.2, 0.3, 0.4, 0.44}) {
    const auto sd = SpectralDensity::primary_at_rc_frequency(1.0, gm, wz);
    const RCParams rc = rc_params(sd, 0.5);
    const double ratio = rc.q * rc.frequency / (rc.coupling * rc.coupling);
    cs = cs && ratio >= 1.0 - 1e-12;
    if (gm == 1e-3) near = std::abs(ratio - 1);
  }
  c.add("Q Omega / g^2 >= 1, -> 1 as gamma -> 0", cs && near < 1e-5, fmt("|ratio - 1| at gamma=1e-3: %.1e", near));

  bool lin = true;
  for (double t : {0.0, 0.006}) {
    const ReservoirKernel k(SpectralDensity::primary(1.0, 0.2, wz), InverseTemperature::from_temperature(t));
    std::vector<double> v;
    for (int n = 1; n <= 6; ++n) {
      Matrix h = Matrix::Zero(1 << n, 1 << n);
      for (int q = 0; q < n; ++q) h += 0.5 * wz * pauli(q, Axis::z, n);
      v.push_back(validity_metric(h, collective_sx(n), 0.01, k));
    }
    for (int n = 1; n <= 6; ++n) lin = lin && std::abs(v[n - 1] - n * v[0]) <= 1e-12 * n * v[0];
  }
  c.add("validity metric linear in N (N = 1..6)", lin);
  return c;
}

// -- 9 -------------------------------------------------------------------
Criterion monotonicity() {
  Criterion c{9, "monotonicity", {}};
  bool in_t = true;
  std::string where;
  for (int k = 1; k <= 10; ++k) {
    const double g = 0.05 * k;
    double prev = INFINITY;
    for (double t : linspace(0.0, 0.03, 301)) {
      const double n = n_zero_width(wz, 0.0, g, t);
      if (n > prev) {
        in_t = false;
        where = fmt("g=%.2f, T=%.4f", g, t);
      }
      prev = n;
    }
  }
  c.add("zero-width N non-increasing in T (10 couplings x 301 temperatures)", in_t, where);

  bool in_g = true, below = true;
  double prev = -1;
  for (double g : linspace(0.0, 1.0, 501)) {
    const EffectiveSystem es(wz, 0.0, g, 1.0, InverseTemperature::infinite());
    const double nd = negativity(gibbs_direct(es));
    in_g = in_g && nd >= prev;
    below = below && negativity(mfg_zero_width(es)) <= nd + 1e-15;
    prev = nd;
  }
  c.add("direct-interaction N at T=0 non-decreasing in g on [0, 1]", in_g);
  c.add("zero-width N <= direct-interaction N at T=0", below);
  return c;
}

}  // namespace

int main() {
  std::vector<std::function<Criterion()>> all{oracle_agreement, weak_regime,        zero_t_peak,
                                              width_enhancement, phase_map,         level_spacing,
                                              kernel_correctness, structural,       monotonicity};
  int failed = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto& run = all[i];
    const auto t0 = std::chrono::steady_clock::now();
    Criterion c{static_cast<int>(i + 1), "(aborted)", {}};
    try {
      c = run();
    } catch (const std::exception& e) {
      c.add("evaluation", false, e.what());
    }
    const bool ok = c.passed();
    failed += !ok;
    std::printf("criterion %d: %s  %s (%.1f s)\n", c.id, ok ? "PASS" : "FAIL", c.title.c_str(), seconds_since(t0));
    for (const auto& ch : c.checks)
      std::printf("    [%s] %s%s%s\n", ch.ok ? "ok" : "FAILED", ch.what.c_str(), ch.detail.empty() ? "" : ": ",
                  ch.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
