#include "mfg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mfg {

using std::numbers::pi;
using cplx = std::complex<double>;

SpectralDensity::SpectralDensity(SpectralFamily f, double w0, double g, double wz)
    : family_(f), omega0_(w0), gamma_(g), omega_z_(wz) {
  if (!(w0 > 0.0) || !std::isfinite(w0)) throw std::invalid_argument("spectral density: omega0 must be positive");
  if (!(g >= 0.0) || !std::isfinite(g)) throw std::invalid_argument("spectral density: gamma must be >= 0");
  if (!(wz > 0.0) || !std::isfinite(wz)) throw std::invalid_argument("spectral density: omega_z must be positive");
}

SpectralDensity SpectralDensity::primary(double omega0, double gamma, double omega_z) {
  return SpectralDensity(SpectralFamily::primary, omega0, gamma, omega_z);
}

SpectralDensity SpectralDensity::reaction_coordinate(double omega0, double gamma, double omega_z) {
  return SpectralDensity(SpectralFamily::reaction_coordinate, omega0, gamma, omega_z);
}

SpectralDensity SpectralDensity::primary_at_rc_frequency(double rc_frequency, double gamma, double omega_z) {
  const double w0sq = rc_frequency * rc_frequency - 5.0 * gamma * gamma;
  if (!(w0sq > 0.0)) throw std::invalid_argument("spectral density: need 5 gamma^2 < Omega^2");
  return primary(std::sqrt(w0sq), gamma, omega_z);
}

namespace {

struct PrimaryParts {
  double p, m, dp, dm;
};

double rc_denominator(double w, double w0, double g) {
  const double d = w * w - w0 * w0;
  return g * g * g * g + 2.0 * g * g * (7.0 * w * w + w0 * w0) + d * d;
}

}  // namespace

double SpectralDensity::value(double w) const {
  if (single_mode()) throw std::domain_error("single-mode spectral density has no pointwise value");
  if (w <= 0.0) return 0.0;
  const double g = gamma_, w0 = omega0_;
  if (family_ == SpectralFamily::primary) {
    const double p = (w - w0) * (w - w0) + g * g;
    const double m = (w + w0) * (w + w0) + g * g;
    return 32.0 * omega_z_ * (w0 * w0 + g * g) * g * g * g * w * w * w / (pi * p * p * m * m);
  }
  return 8.0 * omega_z_ * g * w * w * w / (pi * rc_denominator(w, w0, g));
}

double SpectralDensity::derivative(double w) const {
  if (w <= 0.0) return 0.0;
  const double j = value(w);
  const double g = gamma_, w0 = omega0_;
  if (family_ == SpectralFamily::primary) {
    const double p = (w - w0) * (w - w0) + g * g;
    const double m = (w + w0) * (w + w0) + g * g;
    return j * (3.0 / w - 4.0 * (w - w0) / p - 4.0 * (w + w0) / m);
  }
  const double r = rc_denominator(w, w0, g);
  const double dr = 28.0 * g * g * w + 4.0 * w * (w * w - w0 * w0);
  return j * (3.0 / w - dr / r);
}

std::vector<double> SpectralDensity::features() const {
  std::vector<double> f;
  const double re = upper_pole().real();
  for (double c : {omega0_, re})
    for (double k : {0.0, -1.0, 1.0, -3.0, 3.0, -10.0, 10.0}) {
      const double x = c + k * gamma_;
      if (x > 0.0) f.push_back(x);
    }
  std::sort(f.begin(), f.end());
  f.erase(std::unique(f.begin(), f.end()), f.end());
  return f;
}

cplx SpectralDensity::upper_pole() const {
  if (family_ == SpectralFamily::primary) return {omega0_, gamma_};
  const double g = gamma_, w0 = omega0_;
  const double disc = w0 * w0 - 3.0 * g * g;
  if (disc < 0.0) {
    // zeta is real; the pole pair sits on the imaginary axis
    const double a = w0 * w0 - 7.0 * g * g, b = 4.0 * g * std::sqrt(-disc);
    return std::sqrt(cplx(a - b, 0.0));
  }
  return std::sqrt(cplx(w0 * w0 - 7.0 * g * g, 4.0 * g * std::sqrt(disc)));
}

RCParams rc_params(const SpectralDensity& primary, double lambda) {
  if (primary.family() != SpectralFamily::primary) throw std::invalid_argument("rc_params needs the primary family");
  const double g = primary.gamma(), wz = primary.omega_z();
  const double big = std::sqrt(5.0 * g * g + primary.omega0() * primary.omega0());
  RCParams rc;
  rc.frequency = big;
  rc.coupling = lambda * std::sqrt(wz * (big * big - 4.0 * g * g) / big);
  rc.lambda_rc_sq = 2.0 * pi * g * g / (wz * big);
  rc.lambda_eff_sq = 8.0 * pi * rc.coupling * rc.coupling * g * g / (wz * big * big * big);
  rc.q = lambda * lambda * wz;
  return rc;
}

double lambda_for_coupling(const SpectralDensity& primary, double g) {
  const double gm = primary.gamma();
  const double big = std::sqrt(5.0 * gm * gm + primary.omega0() * primary.omega0());
  return g / std::sqrt(primary.omega_z() * (big * big - 4.0 * gm * gm) / big);
}

SpectralDensity rc_spectral_density(const SpectralDensity& primary) {
  return SpectralDensity::reaction_coordinate(primary.omega0(), primary.gamma(), primary.omega_z());
}

double spectral_moment(const SpectralDensity& sd, int k, const QuadratureOptions& opts) {
  if (k < -1) throw std::invalid_argument("spectral_moment: k must be >= -1");
  if (sd.single_mode()) return sd.omega_z() * std::pow(sd.omega0(), k + 1);
  auto f = [&](double w) { return std::pow(w, k) * sd.value(w); };
  auto feats = sd.features();
  const double far = 4.0 * feats.back();
  std::vector<double> pts{0.0};
  pts.insert(pts.end(), feats.begin(), feats.end());
  pts.push_back(far);
  return integrate(f, pts, opts).value + integrate_to_infinity(f, far, {}, opts).value;
}

double hilbert_transform(const SpectralDensity& sd, double w, const QuadratureOptions& opts) {
  if (sd.single_mode()) {
    const double a = sd.omega_z() * sd.omega0();
    return a / (sd.omega0() - w) - a / (-sd.omega0() - w);
  }
  if (w == 0.0) return 2.0 * spectral_moment(sd, -1, opts);
  const double a = std::abs(w);
  auto j = [&](double y) { return sd.value(y); };
  auto reg = [&](double y) { return sd.value(y) / (y + a); };
  const double h = principal_value_half_line(j, a, reg, sd.features(), opts).value;
  return w > 0 ? h : -h;
}

double rc_density_from_hilbert(const SpectralDensity& primary, double w, const QuadratureOptions& opts) {
  const double m1 = spectral_moment(primary, 1, opts);
  const double m3 = spectral_moment(primary, 3, opts);
  const double big = std::sqrt(m3 / m1);
  const double j = primary.value(w);
  const double h = hilbert_transform(primary, w, opts);
  return (m1 / big) * 2.0 * pi * j / (h * h + pi * pi * j * j);
}

namespace {

// Bose factor n(x) = 1/(e^x - 1) and n(1+n), with x = beta*y.
struct Bose {
  double n, n1n;
};

Bose bose(double x) {
  if (x > 700.0) return {0.0, 0.0};
  if (x < 1e-4) {
    const double n = 1.0 / x - 0.5 + x / 12.0;
    return {n, 1.0 / (x * x) - 1.0 / 12.0 + x * x / 240.0};
  }
  const double n = 1.0 / std::expm1(x);
  return {n, n * (1.0 + n)};
}

struct Spectral {
  double sp, sm;  // J(1+n), J n
};

// J(1+n), Jn and their y-derivatives
struct SpectralD {
  double sp, sm;
};

Spectral weights(const SpectralDensity& sd, InverseTemperature beta, double y) {
  if (y <= 0.0) return {0.0, 0.0};
  const double j = sd.value(y);
  if (beta.is_infinite()) return {j, 0.0};
  const Bose b = bose(beta.value() * y);
  return {j * (1.0 + b.n), j * b.n};
}

SpectralD weights_derivative(const SpectralDensity& sd, InverseTemperature beta, double y) {
  if (y <= 0.0) return {0.0, 0.0};
  const double dj = sd.derivative(y);
  if (beta.is_infinite()) return {dj, 0.0};
  const double bt = beta.value();
  const Bose b = bose(bt * y);
  const double dn = -bt * b.n1n;
  const double j = sd.value(y);
  return {dj * (1.0 + b.n) + j * dn, dj * b.n + j * dn};
}

double single_mode_d(const SpectralDensity& sd, InverseTemperature beta, double w) {
  const double w0 = sd.omega0();
  const double n0 = beta.is_infinite() ? 0.0 : bose(beta.value() * w0).n;
  const double a = sd.omega_z() * w0;
  return a * (1.0 + n0) / (w0 - w) - a * n0 / (w0 + w);
}

double single_mode_dd(const SpectralDensity& sd, InverseTemperature beta, double w) {
  const double w0 = sd.omega0();
  const double n0 = beta.is_infinite() ? 0.0 : bose(beta.value() * w0).n;
  const double a = sd.omega_z() * w0;
  return a * (1.0 + n0) / ((w0 - w) * (w0 - w)) + a * n0 / ((w0 + w) * (w0 + w));
}

void check_single_mode_pole(const SpectralDensity& sd, double w) {
  if (std::abs(std::abs(w) - sd.omega0()) < 1e-12 * sd.omega0())
    throw std::domain_error("kernel evaluated on the single-mode resonance");
}

}  // namespace

double d_beta_quadrature(const SpectralDensity& sd, InverseTemperature beta, double w, const QuadratureOptions& opts) {
  if (sd.single_mode()) {
    check_single_mode_pole(sd, w);
    return single_mode_d(sd, beta, w);
  }
  if (w == 0.0) return spectral_moment(sd, -1, opts);
  const double a = std::abs(w);
  const auto feats = sd.features();
  if (w > 0.0) {
    auto f = [&](double y) { return weights(sd, beta, y).sp; };
    auto reg = [&](double y) { return -weights(sd, beta, y).sm / (y + a); };
    return principal_value_half_line(f, a, reg, feats, opts).value;
  }
  auto f = [&](double y) { return -weights(sd, beta, y).sm; };
  auto reg = [&](double y) { return weights(sd, beta, y).sp / (y + a); };
  return principal_value_half_line(f, a, reg, feats, opts).value;
}

double d_beta_derivative_quadrature(const SpectralDensity& sd, InverseTemperature beta, double w,
                                    const QuadratureOptions& opts) {
  if (sd.single_mode()) {
    check_single_mode_pole(sd, w);
    return single_mode_dd(sd, beta, w);
  }
  const auto feats = sd.features();
  if (w == 0.0) {
    auto f = [&](double y) {
      if (y <= 0.0) return 0.0;
      const SpectralD d = weights_derivative(sd, beta, y);
      return (d.sp + d.sm) / y;
    };
    std::vector<double> pts{0.0};
    pts.insert(pts.end(), feats.begin(), feats.end());
    const double far = 4.0 * feats.back();
    pts.push_back(far);
    return integrate(f, pts, opts).value + integrate_to_infinity(f, far, {}, opts).value;
  }
  const double a = std::abs(w);
  if (w > 0.0) {
    auto f = [&](double y) { return weights_derivative(sd, beta, y).sp; };
    auto reg = [&](double y) { return weights_derivative(sd, beta, y).sm / (y + a); };
    return principal_value_half_line(f, a, reg, feats, opts).value;
  }
  auto f = [&](double y) { return weights_derivative(sd, beta, y).sm; };
  auto reg = [&](double y) { return weights_derivative(sd, beta, y).sp / (y + a); };
  return principal_value_half_line(f, a, reg, feats, opts).value;
}

cplx rational_half_line_integral(int k, const std::vector<RationalPole>& poles) {
  int degree = 0;
  for (const auto& p : poles) {
    if (p.multiplicity < 1 || p.multiplicity > 2)
      throw std::invalid_argument("rational_half_line_integral: multiplicity must be 1 or 2");
    if (p.location.imag() == 0.0 && p.location.real() >= 0.0)
      throw std::invalid_argument("rational_half_line_integral: pole on the integration path");
    degree += p.multiplicity;
  }
  if (k < 0 || k - degree > -2) throw std::invalid_argument("rational_half_line_integral: not integrable");
  cplx total = 0.0;
  for (std::size_t i = 0; i < poles.size(); ++i) {
    const cplx p = poles[i].location;
    cplx h = std::pow(p, k);
    cplx dlog = k == 0 ? cplx(0.0) : cplx(k) / p;
    for (std::size_t j = 0; j < poles.size(); ++j) {
      if (j == i) continue;
      const cplx d = p - poles[j].location;
      h /= std::pow(d, poles[j].multiplicity);
      dlog -= cplx(poles[j].multiplicity) / d;
    }
    const cplx lg = std::log(-p);
    if (poles[i].multiplicity == 1)
      total += h * lg;
    else
      total += h * dlog * lg + h / p;
  }
  return -total;
}

bool residue_available(const SpectralDensity& sd) {
  if (sd.single_mode()) return true;
  if (sd.family() == SpectralFamily::primary) return true;
  return 7.0 * sd.gamma() * sd.gamma() < sd.omega0() * sd.omega0();
}

namespace {

struct BranchSetup {
  double c;
  int m;
  cplx zeta;
};

BranchSetup branch_setup(const SpectralDensity& sd) {
  const double g = sd.gamma(), w0 = sd.omega0(), wz = sd.omega_z();
  const cplx zp = sd.upper_pole();
  if (sd.family() == SpectralFamily::primary)
    return {32.0 * wz * (w0 * w0 + g * g) * g * g * g / pi, 2, zp * zp};
  return {8.0 * wz * g / pi, 1, zp * zp};
}

// I(a) = int_0^inf s / ((s + a)^r [(s+zeta)(s+conj zeta)]^m) ds
cplx branch_integral(const BranchSetup& b, double a, int r) {
  std::vector<RationalPole> poles{{-b.zeta, b.m}, {-std::conj(b.zeta), b.m}};
  int k = 1;
  if (a == 0.0)
    k = 1 - r;  // s/s^r
  else
    poles.push_back({cplx(-a, 0.0), r});
  if (k < 0) throw std::domain_error("branch integral singular at a = 0");
  return rational_half_line_integral(k, poles);
}

void require_residue(const SpectralDensity& sd) {
  if (!residue_available(sd))
    throw std::domain_error("residue kernel needs 7 gamma^2 < omega0^2 for the reaction-coordinate density");
}

// R_+ and dR_+/dw
std::pair<cplx, cplx> upper_residue(const SpectralDensity& sd, double w) {
  const double g = sd.gamma(), w0 = sd.omega0(), wz = sd.omega_z();
  if (sd.family() == SpectralFamily::primary) {
    const cplx zp(w0, g), zm(-w0, g);
    const double k = wz * (w0 * w0 + g * g) * g / (pi * w0 * w0);
    const cplx bb = (zp * zp + zm * zm) / (zp * zp - zm * zm);
    const cplx d = zp - w;
    return {k * (zp / (2.0 * d * d) + bb / d), k * (zp / (d * d * d) + bb / (d * d))};
  }
  const cplx zp = sd.upper_pole();
  const cplx zeta = zp * zp;
  const cplx r = 4.0 * wz * g * zeta / (pi * (zeta - std::conj(zeta)) * (zp - w));
  return {r, r / (zp - w)};
}

}  // namespace

ResidueParts d_infty_residue_parts(const SpectralDensity& sd, double w) {
  if (sd.single_mode()) {
    check_single_mode_pole(sd, w);
    return {single_mode_d(sd, InverseTemperature::infinite(), w), 0.0};
  }
  require_residue(sd);
  const double pole = -2.0 * pi * upper_residue(sd, w).first.imag();
  if (w == 0.0) return {pole, 0.0};
  const BranchSetup b = branch_setup(sd);
  const double branch = -0.5 * w * b.c * branch_integral(b, w * w, 1).real();
  return {pole, branch};
}

ResidueParts d_infty_residue_derivative_parts(const SpectralDensity& sd, double w) {
  if (sd.single_mode()) {
    check_single_mode_pole(sd, w);
    return {single_mode_dd(sd, InverseTemperature::infinite(), w), 0.0};
  }
  require_residue(sd);
  const double pole = -2.0 * pi * upper_residue(sd, w).second.imag();
  const BranchSetup b = branch_setup(sd);
  const double a = w * w;
  const double i0 = branch_integral(b, a, 1).real();
  const double di = a == 0.0 ? 0.0 : -branch_integral(b, a, 2).real();
  return {pole, -0.5 * b.c * (i0 + 2.0 * a * di)};
}

double d_infty_residue(const SpectralDensity& sd, double w) { return d_infty_residue_parts(sd, w).total(); }

QuadratureOptions ReservoirKernel::default_options(const SpectralDensity& sd) {
  QuadratureOptions o;
  o.abs_tol = 1e-12 * sd.omega_z();
  o.rel_tol = 1e-9;
  return o;
}

ReservoirKernel::ReservoirKernel(SpectralDensity sd, InverseTemperature beta, KernelMethod method)
    : ReservoirKernel(sd, beta, method, default_options(sd)) {}

ReservoirKernel::ReservoirKernel(SpectralDensity sd, InverseTemperature beta, KernelMethod method,
                                 QuadratureOptions opts)
    : sd_(sd), beta_(beta), method_(method), opts_(opts) {
  if (method_ == KernelMethod::automatic)
    method_ = (beta_.is_infinite() && residue_available(sd_)) ? KernelMethod::residue : KernelMethod::quadrature;
  if (method_ == KernelMethod::residue || method_ == KernelMethod::residue_pole_only) {
    if (!beta_.is_infinite()) throw std::invalid_argument("residue kernel is a zero-temperature method");
    require_residue(sd_);
  }
}

double ReservoirKernel::d(double w) const {
  switch (method_) {
    case KernelMethod::residue: return d_infty_residue_parts(sd_, w).total();
    case KernelMethod::residue_pole_only: return d_infty_residue_parts(sd_, w).pole;
    default: return d_beta_quadrature(sd_, beta_, w, opts_);
  }
}

double ReservoirKernel::d_derivative(double w) const {
  switch (method_) {
    case KernelMethod::residue: return d_infty_residue_derivative_parts(sd_, w).total();
    case KernelMethod::residue_pole_only: return d_infty_residue_derivative_parts(sd_, w).pole;
    default: return d_beta_derivative_quadrature(sd_, beta_, w, opts_);
  }
}

}  // namespace mfg
