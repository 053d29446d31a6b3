#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfg/spectral.hpp"

namespace mfg {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Method { zero_width, weak, narrow, oracle, direct_gibbs, closed_form };

Method parse_method(const std::string& name);  // ConfigError on unknown names
std::string method_name(Method m);
KernelMethod parse_kernel_method(const std::string& name);
std::string kernel_method_name(KernelMethod m);

// One parameter point; energies in units of the reaction-coordinate frequency
// unless rc_frequency says otherwise. temperature = k_B T, 0 meaning beta = inf.
struct PointParameters {
  double omega_z = 0.02;
  double epsilon = 0.0;
  double temperature = 0.0;
  double g = 0.2;
  double gamma = 0.0;
};

struct EvaluationOptions {
  double rc_frequency = 1.0;
  double validity_threshold = 0.1;
  KernelMethod kernel = KernelMethod::automatic;
  double oracle_tol = 1e-8;
  int oracle_max_cutoff = 200;
};

struct PointResult {
  double negativity = 0.0;
  double purity = 0.0;
  double validity = 0.0;
  bool reliable = true;
  int n_max = 0;  // oracle cutoff, 0 otherwise
};

// Negativity and purity of one state. Weak coupling uses the primary density
// with its reaction coordinate at rc_frequency and lambda fixed by g.
PointResult evaluate_point(Method m, const PointParameters& p, const EvaluationOptions& opts = {});

struct SweepConfig {
  Method method = Method::zero_width;
  std::vector<double> omega_z{0.02}, epsilon{0.0}, temperature{0.0}, g{0.2}, gamma{0.0};
  EvaluationOptions options;
  bool strict = false;
  int threads = 1;
  std::string output;  // empty: stdout
};

SweepConfig sweep_config_from_json(const std::string& text);
std::string sweep_config_to_json(const SweepConfig& c);

struct SweepRow {
  PointParameters point;
  PointResult result;
  std::string error;  // empty on success
};

struct SweepResult {
  std::vector<SweepRow> rows;  // lexicographic in (omega_z, epsilon, temperature, g, gamma)
  bool any_failure = false;
  bool any_unreliable = false;
};

SweepResult run_sweep(const SweepConfig& c, int threads);

// Runs body(i) for i in [0, n) on `threads` workers.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

std::string format_double(double x);  // 17 significant digits
void write_sweep_csv(std::ostream& os, const SweepConfig& c, const SweepResult& r, bool timestamp = true);

struct GPeakResult {
  double g_peak;
  double negativity;
  bool unimodal;    // coarse scan had a single interior maximum
  bool bracketed;   // maximum not on the bracket edge
};

// Maximiser of N(g) at fixed other parameters (golden section to tol).
GPeakResult find_g_peak(Method m, PointParameters p, double g_lo, double g_hi, double tol = 1e-4,
                        const EvaluationOptions& opts = {}, int scan_points = 41);

// Smallest temperature with N <= threshold, by bisection on [t_lo, t_hi].
double find_t_n(Method m, PointParameters p, double t_lo, double t_hi, double tol = 1e-5,
                const EvaluationOptions& opts = {}, double threshold = 1e-10);

struct BroadeningDerivative {
  double value;       // [N(gamma^2 = h) - N(0)] / h
  double half_step;   // same with h/2
  bool stable;        // relative difference within 5 %
  double negativity;  // N at gamma = 0
};

// dN/dgamma^2 at gamma = 0 with g and Omega fixed, from the narrow method.
BroadeningDerivative dn_dgamma2(PointParameters p, double h = 1e-4, const EvaluationOptions& opts = {});

}  // namespace mfg
