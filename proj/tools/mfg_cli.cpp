// mfg-sweep: parameter sweeps of two-qubit mean-force Gibbs entanglement.
//
// exit status: 0 ok, 1 configuration error, 2 numerical failure,
// 3 validity threshold breached with --strict

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "mfg/narrow.hpp"
#include "mfg/oracle_ed.hpp"
#include "mfg/spectral.hpp"
#include "mfg/sweep.hpp"

namespace {

using namespace mfg;

enum Exit { ok = 0, config_error = 1, numerical_failure = 2, validity_breach = 3 };

struct Common {
  std::string config_path;
  std::string out_path;
  int threads = 0;  // 0: take the config value
  double tol = 0;   // 0: command default
  bool strict = false;
};

void add_common(CLI::App* sub, Common& c, const std::string& tol_help) {
  sub->add_option("--config", c.config_path, "JSON configuration file")->required();
  sub->add_option("--out", c.out_path, "CSV output path (default: config 'output', else stdout)");
  sub->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--tol", c.tol, tol_help)->check(CLI::PositiveNumber);
  sub->add_flag("--strict", c.strict, "exit 3 when a row breaches the validity threshold");
}

SweepConfig load(const Common& c) {
  std::ifstream in(c.config_path);
  if (!in) throw ConfigError("cannot read config file '" + c.config_path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  SweepConfig cfg = sweep_config_from_json(ss.str());
  if (c.threads > 0) cfg.threads = c.threads;
  if (!c.out_path.empty()) cfg.output = c.out_path;
  cfg.strict = cfg.strict || c.strict;
  return cfg;
}

// Output stream that is either a file or stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ConfigError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void header(std::ostream& os, const char* command, const SweepConfig& cfg) {
  os << "# mfg-sweep 1.0 " << command << "\n# config: " << sweep_config_to_json(cfg) << "\n";
}

const char* yes_no(bool b) { return b ? "1" : "0"; }

std::string f(double x) { return format_double(x); }

void require_single(const std::vector<double>& v, const char* name, const char* command) {
  if (v.size() != 1) throw ConfigError(std::string(command) + " needs a single value of " + name);
}

int run_sweep_cmd(const Common& c) {
  const SweepConfig cfg = load(c);
  SweepConfig run = cfg;
  if (c.tol > 0) run.options.oracle_tol = c.tol;
  const SweepResult r = run_sweep(run, run.threads);
  Sink sink(run.output);
  write_sweep_csv(sink.os(), run, r);
  for (const auto& row : r.rows)
    if (!row.error.empty()) std::cerr << "mfg-sweep: row failed: " << row.error << "\n";
  if (r.any_failure) return numerical_failure;
  if (run.strict && r.any_unreliable) {
    std::cerr << "mfg-sweep: validity threshold exceeded\n";
    return validity_breach;
  }
  return ok;
}

int run_gpeak(const Common& c) {
  SweepConfig cfg = load(c);
  if (cfg.g.size() < 2) throw ConfigError("gpeak needs a g grid with at least two points (bracket and scan)");
  const double tol = c.tol > 0 ? c.tol : 1e-4;
  const int scan = std::max<int>(static_cast<int>(cfg.g.size()), 3);
  std::vector<PointParameters> pts;
  for (double wz : cfg.omega_z)
    for (double e : cfg.epsilon)
      for (double t : cfg.temperature)
        for (double gm : cfg.gamma) pts.push_back({wz, e, t, 0.0, gm});
  struct Row {
    GPeakResult peak{};
    PointResult at{};
    std::string error;
  };
  std::vector<Row> rows(pts.size());
  parallel_for(pts.size(), cfg.threads, [&](std::size_t i) {
    try {
      rows[i].peak = find_g_peak(cfg.method, pts[i], cfg.g.front(), cfg.g.back(), tol, cfg.options, scan);
      PointParameters p = pts[i];
      p.g = rows[i].peak.g_peak;
      rows[i].at = evaluate_point(cfg.method, p, cfg.options);
    } catch (const std::exception& e) {
      rows[i].error = e.what();
    }
  });
  Sink sink(cfg.output);
  auto& os = sink.os();
  header(os, "gpeak", cfg);
  os << "omega_z,epsilon,temperature,gamma,g_peak,negativity,validity,reliable,unimodal,bracketed,error\n";
  int code = ok;
  bool breach = false;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    const auto& r = rows[i];
    const bool good = r.error.empty();
    os << f(p.omega_z) << ',' << f(p.epsilon) << ',' << f(p.temperature) << ',' << f(p.gamma) << ','
       << f(good ? r.peak.g_peak : NAN) << ',' << f(good ? r.peak.negativity : NAN) << ','
       << f(good ? r.at.validity : NAN) << ',' << yes_no(good && r.at.reliable) << ','
       << yes_no(good && r.peak.unimodal) << ',' << yes_no(good && r.peak.bracketed) << ',' << r.error << '\n';
    if (!good || !r.peak.bracketed) {
      std::cerr << "mfg-sweep: no interior peak at T = " << f(p.temperature) << (good ? "" : ": " + r.error) << "\n";
      code = numerical_failure;
    }
    if (good && !r.at.reliable) breach = true;
  }
  if (code == ok && cfg.strict && breach) return validity_breach;
  return code;
}

int run_tn(const Common& c) {
  SweepConfig cfg = load(c);
  if (cfg.temperature.size() < 2) throw ConfigError("tn needs a temperature grid whose ends bracket T_N");
  const double tol = c.tol > 0 ? c.tol : 1e-5;
  std::vector<PointParameters> pts;
  for (double wz : cfg.omega_z)
    for (double e : cfg.epsilon)
      for (double g : cfg.g)
        for (double gm : cfg.gamma) pts.push_back({wz, e, 0.0, g, gm});
  std::vector<double> tn(pts.size(), NAN);
  std::vector<std::string> err(pts.size());
  std::vector<char> bad_bracket(pts.size(), 0);
  parallel_for(pts.size(), cfg.threads, [&](std::size_t i) {
    try {
      tn[i] = find_t_n(cfg.method, pts[i], cfg.temperature.front(), cfg.temperature.back(), tol, cfg.options);
    } catch (const std::invalid_argument& e) {
      err[i] = e.what();
      bad_bracket[i] = 1;
    } catch (const std::exception& e) {
      err[i] = e.what();
    }
  });
  Sink sink(cfg.output);
  auto& os = sink.os();
  header(os, "tn", cfg);
  os << "omega_z,epsilon,g,gamma,t_n,error\n";
  int code = ok;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    os << f(p.omega_z) << ',' << f(p.epsilon) << ',' << f(p.g) << ',' << f(p.gamma) << ',' << f(tn[i]) << ','
       << err[i] << '\n';
    if (!err[i].empty()) {
      std::cerr << "mfg-sweep: " << err[i] << "\n";
      // a bracket that misses T_N is a config problem and outranks numerical trouble
      code = bad_bracket[i] ? config_error : (code == config_error ? code : numerical_failure);
    }
  }
  return code;
}

int run_phasemap(const Common& c) {
  SweepConfig cfg = load(c);
  require_single(cfg.omega_z, "omega_z", "phasemap");
  require_single(cfg.epsilon, "epsilon", "phasemap");
  require_single(cfg.gamma, "gamma", "phasemap");
  if (cfg.g.size() < 3) throw ConfigError("phasemap needs at least three g values");
  const double tol = c.tol > 0 ? c.tol : 1e-4;
  const SweepResult grid = run_sweep(cfg, cfg.threads);
  const std::size_t nt = cfg.temperature.size();
  std::vector<GPeakResult> peaks(nt, GPeakResult{NAN, NAN, false, false});
  std::vector<std::string> err(nt);
  parallel_for(nt, cfg.threads, [&](std::size_t i) {
    PointParameters p{cfg.omega_z[0], cfg.epsilon[0], cfg.temperature[i], 0.0, cfg.gamma[0]};
    try {
      peaks[i] = find_g_peak(cfg.method, p, cfg.g.front(), cfg.g.back(), tol, cfg.options,
                             static_cast<int>(cfg.g.size()));
    } catch (const std::exception& e) {
      err[i] = e.what();
    }
  });
  Sink sink(cfg.output);
  auto& os = sink.os();
  header(os, "phasemap", cfg);
  os << "temperature,g,negativity,validity,reliable,g_peak,error\n";
  const std::size_t ng = cfg.g.size();
  int code = grid.any_failure ? numerical_failure : ok;
  for (std::size_t it = 0; it < nt; ++it) {
    const double gp = peaks[it].bracketed ? peaks[it].g_peak : NAN;
    for (std::size_t ig = 0; ig < ng; ++ig) {
      const auto& row = grid.rows[it * ng + ig];
      os << f(row.point.temperature) << ',' << f(row.point.g) << ',' << f(row.result.negativity) << ','
         << f(row.result.validity) << ',' << yes_no(row.result.reliable) << ',' << f(gp) << ','
         << (row.error.empty() ? err[it] : row.error) << '\n';
    }
    if (!err[it].empty()) code = numerical_failure;
  }
  if (code == ok && cfg.strict && grid.any_unreliable) return validity_breach;
  return code;
}

struct DbetaGrid {
  double w_min = -2.0, w_max = 2.0;
  int points = 81;
};

int run_dbeta(const Common& c, const DbetaGrid& wg) {
  SweepConfig cfg = load(c);
  require_single(cfg.omega_z, "omega_z", "dbeta");
  require_single(cfg.gamma, "gamma", "dbeta");
  if (!(wg.w_max > wg.w_min) || wg.points < 2) throw ConfigError("dbeta: bad frequency grid");
  const double big = cfg.options.rc_frequency, gamma = cfg.gamma[0], wz = cfg.omega_z[0];
  SpectralDensity sd = SpectralDensity::primary_at_rc_frequency(big, gamma, wz);
  if (cfg.method == Method::narrow)
    sd = SpectralDensity::reaction_coordinate(std::sqrt(big * big - 5 * gamma * gamma), gamma, wz);
  else if (cfg.method != Method::weak)
    throw ConfigError("dbeta: method must be 'weak' (primary density) or 'narrow' (reaction-coordinate density)");
  QuadratureOptions q = ReservoirKernel::default_options(sd);
  if (c.tol > 0) q.rel_tol = c.tol;

  const std::size_t nw = static_cast<std::size_t>(wg.points), nt = cfg.temperature.size();
  std::vector<double> d(nw * nt, NAN), dd(nw * nt, NAN);
  std::vector<std::string> err(nw * nt);
  std::vector<std::string> method(nt);
  for (std::size_t it = 0; it < nt; ++it) {
    const ReservoirKernel k(sd, InverseTemperature::from_temperature(cfg.temperature[it]), cfg.options.kernel, q);
    method[it] = kernel_method_name(k.method());
    parallel_for(nw, cfg.threads, [&](std::size_t iw) {
      const double w = wg.w_min + (wg.w_max - wg.w_min) * static_cast<double>(iw) / (nw - 1);
      try {
        d[it * nw + iw] = k.d(w);
        dd[it * nw + iw] = k.d_derivative(w);
      } catch (const std::exception& e) {
        err[it * nw + iw] = e.what();
      }
    });
  }
  Sink sink(cfg.output);
  auto& os = sink.os();
  header(os, "dbeta", cfg);
  os << "temperature,omega,d,d_derivative,kernel,error\n";
  int code = ok;
  for (std::size_t it = 0; it < nt; ++it)
    for (std::size_t iw = 0; iw < nw; ++iw) {
      const std::size_t i = it * nw + iw;
      const double w = wg.w_min + (wg.w_max - wg.w_min) * static_cast<double>(iw) / (nw - 1);
      os << f(cfg.temperature[it]) << ',' << f(w) << ',' << f(d[i]) << ',' << f(dd[i]) << ',' << method[it] << ','
         << err[i] << '\n';
      if (!err[i].empty()) code = numerical_failure;
    }
  return code;
}

int run_compare_oracle(const Common& c) {
  SweepConfig cfg = load(c);
  if (cfg.gamma.size() != 1 || cfg.gamma[0] != 0.0) throw ConfigError("compare-oracle needs gamma = 0");
  const double tol = c.tol > 0 ? c.tol : cfg.options.oracle_tol;
  std::vector<PointParameters> pts;
  for (double wz : cfg.omega_z)
    for (double e : cfg.epsilon)
      for (double t : cfg.temperature)
        for (double g : cfg.g) pts.push_back({wz, e, t, g, 0.0});
  struct Row {
    double n_zw = NAN, n_ed = NAN, p_zw = NAN, p_ed = NAN, diff = NAN;
    int n_max = 0;
    std::string error;
  };
  std::vector<Row> rows(pts.size());
  const double big = cfg.options.rc_frequency;
  parallel_for(pts.size(), cfg.threads, [&](std::size_t i) {
    const auto& p = pts[i];
    try {
      const InverseTemperature beta = InverseTemperature::from_temperature(p.temperature);
      const DensityMatrix zw = mfg_zero_width(EffectiveSystem(p.omega_z, p.epsilon, p.g, big, beta));
      const OracleResult ed = reduced_thermal_state({p.omega_z, p.epsilon, p.g, big}, beta, tol);
      rows[i] = {negativity(zw), negativity(ed.rho), purity(zw), purity(ed.rho),
                 (zw.matrix() - ed.rho.matrix()).cwiseAbs().maxCoeff(), ed.n_max, ""};
    } catch (const std::exception& e) {
      rows[i].error = e.what();
    }
  });
  Sink sink(cfg.output);
  auto& os = sink.os();
  header(os, "compare-oracle", cfg);
  os << "omega_z,epsilon,temperature,g,negativity_zero_width,negativity_oracle,purity_zero_width,purity_oracle,"
        "max_abs_diff,n_max,error\n";
  int code = ok;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    const auto& r = rows[i];
    os << f(p.omega_z) << ',' << f(p.epsilon) << ',' << f(p.temperature) << ',' << f(p.g) << ',' << f(r.n_zw) << ','
       << f(r.n_ed) << ',' << f(r.p_zw) << ',' << f(r.p_ed) << ',' << f(r.diff) << ',' << r.n_max << ',' << r.error
       << '\n';
    if (!r.error.empty()) code = numerical_failure;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-force Gibbs entanglement of two qubits in a common bath"};
  app.require_subcommand(1);
  Common common;
  DbetaGrid wg;

  auto* sweep = app.add_subcommand("sweep", "evaluate every grid point of a config");
  add_common(sweep, common, "oracle convergence tolerance");
  auto* gpeak = app.add_subcommand("gpeak", "coupling of maximal entanglement; bracket and scan from the g grid");
  add_common(gpeak, common, "tolerance on g_peak");
  auto* tn = app.add_subcommand("tn", "entanglement temperature; bracket from the temperature grid");
  add_common(tn, common, "tolerance on T_N");
  auto* phasemap = app.add_subcommand("phasemap", "temperature x coupling grid with g_peak per temperature");
  add_common(phasemap, common, "tolerance on g_peak");
  auto* dbeta = app.add_subcommand("dbeta", "reservoir kernel D_beta and its derivative on a frequency grid");
  add_common(dbeta, common, "relative quadrature tolerance");
  dbeta->add_option("--omega-min", wg.w_min, "lowest frequency");
  dbeta->add_option("--omega-max", wg.w_max, "highest frequency");
  dbeta->add_option("--points", wg.points, "number of frequencies");
  auto* compare = app.add_subcommand("compare-oracle", "zero-width state against exact diagonalisation");
  add_common(compare, common, "oracle convergence tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return config_error;
  }

  try {
    if (*sweep) return run_sweep_cmd(common);
    if (*gpeak) return run_gpeak(common);
    if (*tn) return run_tn(common);
    if (*phasemap) return run_phasemap(common);
    if (*dbeta) return run_dbeta(common, wg);
    if (*compare) return run_compare_oracle(common);
  } catch (const ConfigError& e) {
    std::cerr << "mfg-sweep: config error: " << e.what() << "\n";
    return config_error;
  } catch (const std::invalid_argument& e) {
    std::cerr << "mfg-sweep: " << e.what() << "\n";
    return config_error;
  } catch (const std::exception& e) {
    std::cerr << "mfg-sweep: numerical failure: " << e.what() << "\n";
    return numerical_failure;
  }
  return config_error;
}
