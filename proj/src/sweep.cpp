#include "mfg/sweep.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "mfg/narrow.hpp"
#include "mfg/oracle_ed.hpp"
#include "mfg/weak.hpp"

namespace mfg {

using nlohmann::json;

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

const std::pair<Method, const char*> method_names[] = {
    {Method::zero_width, "zero-width"}, {Method::weak, "weak"},
    {Method::narrow, "narrow"},         {Method::oracle, "oracle"},
    {Method::direct_gibbs, "direct-gibbs"}, {Method::closed_form, "closed-form"},
};

const std::pair<KernelMethod, const char*> kernel_names[] = {
    {KernelMethod::automatic, "auto"},
    {KernelMethod::quadrature, "quadrature"},
    {KernelMethod::residue, "residue"},
    {KernelMethod::residue_pole_only, "residue-pole-only"},
};

}  // namespace

Method parse_method(const std::string& name) {
  for (const auto& [m, n] : method_names)
    if (name == n) return m;
  throw ConfigError("unknown method '" + name + "'");
}

std::string method_name(Method m) {
  for (const auto& [k, n] : method_names)
    if (k == m) return n;
  return "?";
}

KernelMethod parse_kernel_method(const std::string& name) {
  for (const auto& [m, n] : kernel_names)
    if (name == n) return m;
  throw ConfigError("unknown kernel method '" + name + "'");
}

std::string kernel_method_name(KernelMethod m) {
  for (const auto& [k, n] : kernel_names)
    if (k == m) return n;
  return "?";
}

PointResult evaluate_point(Method m, const PointParameters& p, const EvaluationOptions& opts) {
  const InverseTemperature beta = InverseTemperature::from_temperature(p.temperature);
  const double big = opts.rc_frequency;
  PointResult r;
  auto fill = [&](const DensityMatrix& rho) {
    r.negativity = negativity(rho);
    r.purity = purity(rho);
  };
  switch (m) {
    case Method::zero_width: {
      fill(mfg_zero_width(EffectiveSystem(p.omega_z, p.epsilon, p.g, big, beta)));
      break;
    }
    case Method::direct_gibbs: {
      fill(gibbs_direct(EffectiveSystem(p.omega_z, p.epsilon, p.g, big, beta)));
      break;
    }
    case Method::oracle: {
      const OracleResult o = reduced_thermal_state({p.omega_z, p.epsilon, p.g, big}, beta, opts.oracle_tol, 20,
                                                     opts.oracle_max_cutoff);
      fill(o.rho);
      r.n_max = o.n_max;
      break;
    }
    case Method::narrow: {
      const NarrowResult n = mfg_narrow(EffectiveSystem(p.omega_z, p.epsilon, p.g, big, beta), p.gamma, opts.kernel,
                                        opts.validity_threshold);
      fill(n.rho);
      r.validity = n.validity;
      r.reliable = n.reliable;
      break;
    }
    case Method::weak: {
      const SpectralDensity sd = SpectralDensity::primary_at_rc_frequency(big, p.gamma, p.omega_z);
      const double lam = lambda_for_coupling(sd, p.g);
      const ReservoirKernel k(sd, beta, opts.kernel);
      const WeakResult w = mfg_weak_two_qubit(p.omega_z, p.epsilon, lam * lam, k, opts.validity_threshold);
      fill(w.rho);
      r.validity = w.validity;
      r.reliable = w.reliable;
      break;
    }
    case Method::closed_form: {
      const double q = p.g * p.g * big / (big * big - 4 * p.gamma * p.gamma);
      r.negativity = negativity_closed_form(q, p.omega_z, beta);
      r.purity = nan_v;
      r.validity = beta.is_infinite() ? 2 * q / p.omega_z : beta.value() * q / 2;
      r.reliable = r.validity < opts.validity_threshold;
      break;
    }
  }
  return r;
}

namespace {

std::vector<double> read_grid(const json& j, const char* key) {
  std::vector<double> v;
  try {
    if (j.is_number()) {
      v = {j.get<double>()};
    } else if (j.is_array()) {
      for (const auto& x : j) {
        if (!x.is_number()) throw ConfigError(std::string(key) + ": grid entries must be numbers");
        v.push_back(x.get<double>());
      }
    } else if (j.is_object()) {
      for (auto it = j.begin(); it != j.end(); ++it)
        if (it.key() != "start" && it.key() != "stop" && it.key() != "count")
          throw ConfigError(std::string(key) + ": unknown range key '" + it.key() + "'");
      const double a = j.at("start").get<double>(), b = j.at("stop").get<double>();
      const int n = j.at("count").get<int>();
      if (n < 1) throw ConfigError(std::string(key) + ": count must be >= 1");
      for (int k = 0; k < n; ++k) v.push_back(n == 1 ? a : a + (b - a) * k / (n - 1));
    } else {
      throw ConfigError(std::string(key) + ": expected a number, an array or {start, stop, count}");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string(key) + ": " + e.what());
  }
  if (v.empty()) throw ConfigError(std::string(key) + ": empty grid");
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!std::isfinite(v[k])) throw ConfigError(std::string(key) + ": non-finite value");
    if (k > 0 && !(v[k] > v[k - 1])) throw ConfigError(std::string(key) + ": grid must be strictly increasing");
  }
  return v;
}

void validate(const SweepConfig& c) {
  const double big = c.options.rc_frequency;
  if (!(big > 0)) throw ConfigError("rc_frequency must be positive");
  for (double x : c.omega_z)
    if (!(x > 0)) throw ConfigError("omega_z must be positive");
  for (double x : c.epsilon)
    if (!(std::abs(x) <= 1)) throw ConfigError("epsilon must lie in [-1, 1]");
  for (double x : c.temperature)
    if (!(x >= 0)) throw ConfigError("temperature must be >= 0");
  for (double x : c.g)
    if (!(x >= 0)) throw ConfigError("g must be >= 0");
  for (double x : c.gamma) {
    if (!(x >= 0)) throw ConfigError("gamma must be >= 0");
    if (!(5 * x * x < big * big)) throw ConfigError("gamma must satisfy 5 gamma^2 < Omega^2");
  }
  const bool needs_zero_gamma =
      c.method == Method::zero_width || c.method == Method::oracle || c.method == Method::direct_gibbs;
  if (needs_zero_gamma && (c.gamma.size() != 1 || c.gamma[0] != 0.0))
    throw ConfigError("method '" + method_name(c.method) + "' describes a single-mode reservoir; gamma must be 0");
  if (c.method == Method::closed_form && (c.epsilon.size() != 1 || c.epsilon[0] != 0.0))
    throw ConfigError("closed-form negativity is for epsilon = 0");
  const bool zero_t_kernel =
      c.options.kernel == KernelMethod::residue || c.options.kernel == KernelMethod::residue_pole_only;
  if (zero_t_kernel && std::any_of(c.temperature.begin(), c.temperature.end(), [](double t) { return t > 0; }))
    throw ConfigError("residue kernels need temperature 0");
  if (!(c.options.validity_threshold > 0)) throw ConfigError("validity_threshold must be positive");
  if (!(c.options.oracle_tol > 0)) throw ConfigError("oracle_tol must be positive");
  if (c.options.oracle_max_cutoff < 20) throw ConfigError("oracle_max_cutoff must be >= 20");
  if (c.threads < 1) throw ConfigError("threads must be >= 1");
}

json grid_json(const std::vector<double>& v) { return json(v); }

}  // namespace

SweepConfig sweep_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const char* known[] = {"method", "omega_z", "epsilon", "temperature", "g", "gamma", "rc_frequency",
                                "validity_threshold", "kernel", "oracle_tol",
                                "oracle_max_cutoff", "strict", "threads", "output"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::none_of(std::begin(known), std::end(known), [&](const char* k) { return it.key() == k; }))
      throw ConfigError("unknown config key '" + it.key() + "'");
  SweepConfig c;
  try {
    if (!j.contains("method")) throw ConfigError("config needs a 'method'");
    c.method = parse_method(j.at("method").get<std::string>());
    if (j.contains("omega_z")) c.omega_z = read_grid(j["omega_z"], "omega_z");
    if (j.contains("epsilon")) c.epsilon = read_grid(j["epsilon"], "epsilon");
    if (j.contains("temperature")) c.temperature = read_grid(j["temperature"], "temperature");
    if (j.contains("g")) c.g = read_grid(j["g"], "g");
    if (j.contains("gamma")) c.gamma = read_grid(j["gamma"], "gamma");
    if (j.contains("rc_frequency")) c.options.rc_frequency = j["rc_frequency"].get<double>();
    if (j.contains("validity_threshold")) c.options.validity_threshold = j["validity_threshold"].get<double>();
    if (j.contains("kernel")) c.options.kernel = parse_kernel_method(j["kernel"].get<std::string>());
    if (j.contains("oracle_tol")) c.options.oracle_tol = j["oracle_tol"].get<double>();
    if (j.contains("oracle_max_cutoff")) c.options.oracle_max_cutoff = j["oracle_max_cutoff"].get<int>();
    if (j.contains("strict")) c.strict = j["strict"].get<bool>();
    if (j.contains("threads")) c.threads = j["threads"].get<int>();
    if (j.contains("output")) c.output = j["output"].get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  validate(c);
  return c;
}

std::string sweep_config_to_json(const SweepConfig& c) {
  json j;
  j["method"] = method_name(c.method);
  j["omega_z"] = grid_json(c.omega_z);
  j["epsilon"] = grid_json(c.epsilon);
  j["temperature"] = grid_json(c.temperature);
  j["g"] = grid_json(c.g);
  j["gamma"] = grid_json(c.gamma);
  j["rc_frequency"] = c.options.rc_frequency;
  j["validity_threshold"] = c.options.validity_threshold;
  j["kernel"] = kernel_method_name(c.options.kernel);
  j["oracle_tol"] = c.options.oracle_tol;
  j["oracle_max_cutoff"] = c.options.oracle_max_cutoff;
  j["strict"] = c.strict;
  return j.dump();
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  {
    std::vector<std::jthread> pool;
    const int workers = static_cast<int>(std::min<std::size_t>(n, static_cast<std::size_t>(threads)));
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(mu);
            if (!first) first = std::current_exception();
          }
        }
      });
  }
  if (first) std::rethrow_exception(first);
}

SweepResult run_sweep(const SweepConfig& c, int threads) {
  validate(c);
  std::vector<PointParameters> points;
  for (double wz : c.omega_z)
    for (double e : c.epsilon)
      for (double t : c.temperature)
        for (double g : c.g)
          for (double gm : c.gamma) points.push_back({wz, e, t, g, gm});
  SweepResult out;
  out.rows.resize(points.size());
  parallel_for(points.size(), threads, [&](std::size_t i) {
    SweepRow& row = out.rows[i];
    row.point = points[i];
    try {
      row.result = evaluate_point(c.method, points[i], c.options);
    } catch (const std::exception& e) {
      row.error = e.what();
      row.result.negativity = row.result.purity = row.result.validity = nan_v;
      row.result.reliable = false;
    }
  });
  for (const auto& r : out.rows) {
    if (!r.error.empty()) out.any_failure = true;
    if (!r.result.reliable) out.any_unreliable = true;
  }
  return out;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string o = "\"";
  for (char ch : s) {
    if (ch == '"') o += '"';
    o += ch == '\n' ? ' ' : ch;
  }
  return o + "\"";
}

}  // namespace

void write_sweep_csv(std::ostream& os, const SweepConfig& c, const SweepResult& r, bool timestamp) {
  os << "# mfg-sweep 1.0\n";
  os << "# config: " << sweep_config_to_json(c) << "\n";
  if (timestamp) {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    os << "# generated: " << buf << "\n";
  }
  os << "omega_z,epsilon,temperature,g,gamma,negativity,purity,validity,reliable,n_max,error\n";
  for (const auto& row : r.rows) {
    const auto& p = row.point;
    const auto& q = row.result;
    os << format_double(p.omega_z) << ',' << format_double(p.epsilon) << ',' << format_double(p.temperature) << ','
       << format_double(p.g) << ',' << format_double(p.gamma) << ',' << format_double(q.negativity) << ','
       << format_double(q.purity) << ',' << format_double(q.validity) << ',' << (q.reliable ? 1 : 0) << ','
       << q.n_max << ',' << csv_field(row.error) << '\n';
  }
}

GPeakResult find_g_peak(Method m, PointParameters p, double g_lo, double g_hi, double tol,
                        const EvaluationOptions& opts, int scan_points) {
  if (!(g_lo >= 0) || !(g_hi > g_lo)) throw std::invalid_argument("find_g_peak: need 0 <= g_lo < g_hi");
  if (scan_points < 3) throw std::invalid_argument("find_g_peak: need at least 3 scan points");
  if (!(tol > 0)) throw std::invalid_argument("find_g_peak: tolerance must be positive");
  auto n_at = [&](double g) {
    p.g = g;
    return evaluate_point(m, p, opts).negativity;
  };
  std::vector<double> gs(scan_points), ns(scan_points);
  for (int k = 0; k < scan_points; ++k) {
    gs[k] = g_lo + (g_hi - g_lo) * k / (scan_points - 1);
    ns[k] = n_at(gs[k]);
  }
  int best = 0;
  for (int k = 1; k < scan_points; ++k)
    if (ns[k] > ns[best]) best = k;
  const double slack = 1e-12;
  bool unimodal = true;
  for (int k = 1; k <= best; ++k)
    if (ns[k] < ns[k - 1] - slack) unimodal = false;
  for (int k = best + 1; k < scan_points; ++k)
    if (ns[k] > ns[k - 1] + slack) unimodal = false;
  const bool bracketed = best > 0 && best < scan_points - 1;
  if (!unimodal || !bracketed) return {gs[best], ns[best], unimodal, bracketed};

  // golden section on the neighbouring cells; ties keep the smaller g
  const double r = (std::sqrt(5.0) - 1) / 2;
  double a = gs[best - 1], b = gs[best + 1];
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = n_at(c), fd = n_at(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = n_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = n_at(d);
    }
  }
  const double g = 0.5 * (a + b);
  return {g, n_at(g), true, true};
}

double find_t_n(Method m, PointParameters p, double t_lo, double t_hi, double tol, const EvaluationOptions& opts,
                double threshold) {
  if (!(t_lo >= 0) || !(t_hi > t_lo)) throw std::invalid_argument("find_t_n: need 0 <= t_lo < t_hi");
  auto n_at = [&](double t) {
    p.temperature = t;
    return evaluate_point(m, p, opts).negativity;
  };
  if (!(n_at(t_lo) > threshold)) throw std::invalid_argument("find_t_n: no entanglement at the lower bracket");
  if (!(n_at(t_hi) <= threshold)) throw std::invalid_argument("find_t_n: still entangled at the upper bracket");
  double lo = t_lo, hi = t_hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (n_at(mid) > threshold ? lo : hi) = mid;
  }
  return hi;
}

BroadeningDerivative dn_dgamma2(PointParameters p, double h, const EvaluationOptions& opts) {
  if (!(h > 0)) throw std::invalid_argument("dn_dgamma2: step must be positive");
  auto n_at = [&](double gamma_sq) {
    p.gamma = std::sqrt(gamma_sq);
    return evaluate_point(Method::narrow, p, opts).negativity;
  };
  const double n0 = n_at(0.0);
  const double v = (n_at(h) - n0) / h;
  const double v2 = (n_at(h / 2) - n0) / (h / 2);
  const double scale = std::max(std::abs(v), std::abs(v2));
  const bool stable = scale < 1e-9 || std::abs(v - v2) <= 0.05 * scale;
  return {v, v2, stable, n0};
}

}  // namespace mfg
