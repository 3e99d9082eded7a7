// gwsql: command-line front end for the detector model.
//
// Subcommands: constants, signal, sql, sweep, verify. Parameters default to
// the LIGO-II-scale set and may come from a key=value config file (keys are
// the flag names without dashes) or from flags; flags win over the file.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gwsql/closedform.hpp"
#include "gwsql/model.hpp"
#include "gwsql/oracle.hpp"
#include "gwsql/report.hpp"
#include "gwsql/sensitivity.hpp"

namespace {

namespace cf = gwsql::closedform;
namespace orc = gwsql::oracle;
namespace rep = gwsql::report;
namespace sens = gwsql::sensitivity;
using gwsql::model::DetectorParams;

struct Options {
  DetectorParams params;
  std::string format = "csv";
  std::string out_path;
  std::string config_path;
  double t_min = 0.0;
  double t_max = -1.0;  // resolved to t_obs when left unset
  int t_steps = 11;
  double T_min = 0.0;
  double T_max = 100.0;
  int T_steps = 11;
  bool log_grid = false;
  int n_osc = 60;
  int n_field = 32;
  bool use_printed_mean = false;
};

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad numeric value for '" + key + "': " + v);
  }
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const int x = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer value for '" + key + "': " + v);
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw std::invalid_argument("config: bad boolean value for '" + key + "': " + v);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Key -> assignment, shared by the config reader; keys are flag names with
// the dashes stripped.
std::map<std::string, std::function<void(Options&, const std::string&)>> config_setters() {
  using F = std::function<void(Options&, const std::string&)>;
  std::map<std::string, F> m;
  m["omega"] = [](Options& o, const std::string& v) { o.params.omega = parse_double("omega", v); };
  m["length"] = [](Options& o, const std::string& v) { o.params.L = parse_double("length", v); };
  m["mass"] = [](Options& o, const std::string& v) { o.params.m = parse_double("mass", v); };
  m["omega0"] = [](Options& o, const std::string& v) { o.params.omega0 = parse_double("omega0", v); };
  m["omegag"] = [](Options& o, const std::string& v) { o.params.omega_g = parse_double("omegag", v); };
  m["h0"] = [](Options& o, const std::string& v) { o.params.h0 = parse_double("h0", v); };
  m["photons"] = [](Options& o, const std::string& v) { o.params.N = parse_double("photons", v); };
  m["temperature"] = [](Options& o, const std::string& v) { o.params.T = parse_double("temperature", v); };
  m["tobs"] = [](Options& o, const std::string& v) { o.params.t_obs = parse_double("tobs", v); };
  m["format"] = [](Options& o, const std::string& v) { o.format = v; };
  m["out"] = [](Options& o, const std::string& v) { o.out_path = v; };
  m["tmin"] = [](Options& o, const std::string& v) { o.t_min = parse_double("tmin", v); };
  m["tmax"] = [](Options& o, const std::string& v) { o.t_max = parse_double("tmax", v); };
  m["tsteps"] = [](Options& o, const std::string& v) { o.t_steps = parse_int("tsteps", v); };
  m["Tmin"] = [](Options& o, const std::string& v) { o.T_min = parse_double("Tmin", v); };
  m["Tmax"] = [](Options& o, const std::string& v) { o.T_max = parse_double("Tmax", v); };
  m["Tsteps"] = [](Options& o, const std::string& v) { o.T_steps = parse_int("Tsteps", v); };
  m["loggrid"] = [](Options& o, const std::string& v) { o.log_grid = parse_bool("loggrid", v); };
  m["nosc"] = [](Options& o, const std::string& v) { o.n_osc = parse_int("nosc", v); };
  m["nfield"] = [](Options& o, const std::string& v) { o.n_field = parse_int("nfield", v); };
  m["useprintedmean"] = [](Options& o, const std::string& v) {
    o.use_printed_mean = parse_bool("useprintedmean", v);
  };
  return m;
}

// Keys present in the config file that were not also given as flags are
// applied on top of the built-in defaults.
std::set<std::string> apply_config_file(Options& o, const std::set<std::string>& from_flags) {
  std::set<std::string> applied;
  if (o.config_path.empty()) return applied;
  std::ifstream in(o.config_path);
  if (!in) throw std::invalid_argument("config: cannot open '" + o.config_path + "'");
  const auto setters = config_setters();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not key=value");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      std::string valid;
      for (const auto& [k, f] : setters) {
        if (!valid.empty()) valid += ", ";
        valid += k;
      }
      throw std::invalid_argument("config: unknown key '" + key + "'; valid keys: " + valid);
    }
    if (from_flags.count(key)) continue;  // flags win
    it->second(o, val);
    applied.insert(key);
  }
  return applied;
}

std::vector<double> make_grid(double lo, double hi, int steps, bool log_grid) {
  if (steps < 1) throw std::invalid_argument("grid: needs at least one point (empty grid)");
  std::vector<double> g;
  g.reserve(steps);
  if (steps == 1) {
    g.push_back(lo);
    return g;
  }
  if (log_grid) {
    if (!(lo > 0.0 && hi > 0.0))
      throw std::invalid_argument("grid: log spacing requires positive bounds");
    const double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < steps; ++i)
      g.push_back(std::exp(a + (b - a) * i / double(steps - 1)));
  } else {
    for (int i = 0; i < steps; ++i) g.push_back(lo + (hi - lo) * i / double(steps - 1));
  }
  return g;
}

void emit(const rep::Table& t, const Options& o) {
  std::string text;
  if (o.format == "csv") {
    text = rep::to_csv(t);
  } else if (o.format == "json") {
    text = rep::to_json(t).dump(2) + "\n";
  } else {
    throw std::invalid_argument("format must be csv or json");
  }
  if (o.out_path.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    std::ofstream out(o.out_path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file '" + o.out_path + "'");
    out << text;
  }
}

int cmd_constants(const Options& o) {
  const auto d = gwsql::model::derive_couplings(o.params);
  const auto ts = cf::thermal_alpha(d, o.params, o.params.T);
  const double ratio = o.params.k_B * o.params.T / (o.params.hbar * o.params.omega0);
  const double tl_max = 4.0 * d.kappa * d.g / o.params.omega0;
  rep::Table t;
  t.headers = {"g[-]",     "kappa[1/s]",             "nbar[-]",
               "alpha[-]", "kT_over_hbar_omega0[-]", "theta_l_max[-]"};
  t.rows = {{d.g, d.kappa, ts.nbar, ts.alpha, ratio, tl_max}};
  emit(t, o);
  return 0;
}

int cmd_signal(const Options& o) {
  const double t_hi = o.t_max < 0.0 ? o.params.t_obs : o.t_max;
  const auto grid = make_grid(o.t_min, t_hi, o.t_steps, false);
  DetectorParams pn = o.params;
  pn.I_N = 1.0;  // columns are in units of I_N
  const auto d = gwsql::model::derive_couplings(pn);
  const auto ts = cf::thermal_alpha(d, pn, pn.T);
  rep::Table t;
  t.headers = {"t[s]",
               "theta_g[-]",
               "theta_l[-]",
               "I_ground_over_IN[-]",
               "D_ground_over_IN2[-]",
               "I_thermal_over_IN[-]",
               "D_thermal_over_IN2[-]"};
  for (size_t i = 0; i < grid.size(); ++i) {
    try {
      const double tt = grid[i];
      const double hg = gwsql::model::theta_g(tt, pn);
      const double hl = gwsql::model::theta_l(tt, pn);
      const double ig = cf::mean_ground(d.g, hg, hl, pn.N, 1.0);
      const auto dg = cf::dispersion_ground(d.g, hg, hl, pn.N, 1.0);
      const double it = cf::mean_thermal(d.g, hg, hl, pn.N, 1.0, ts.nbar);
      const auto dt = cf::dispersion_thermal(d.g, hg, hl, pn.N, 1.0, ts.nbar);
      t.rows.push_back({tt, hg, hl, ig, dg.dispersion, it, dt.dispersion});
    } catch (const std::exception& e) {
      throw std::runtime_error("signal: row " + std::to_string(i) + " (t=" +
                               rep::format_double(grid[i]) + "): " + e.what());
    }
  }
  emit(t, o);
  return 0;
}

rep::Table sql_table() {
  rep::Table t;
  t.headers = {"T[K]", "t_obs[s]", "h_sql_T0[-]", "h_sql_thermal[-]", "h_linearized[-]"};
  return t;
}

void annotate_thermal(const sens::SqlResult& vac, const sens::SqlResult& th) {
  if (!(th.T > 0.0)) return;
  if (th.h_threshold > 1e-19) {
    std::fprintf(stderr,
                 "note: thermal SQL at T=%s K is %s, a factor %.3g above the 1e-19 level; "
                 "ratio to the zero-temperature SQL: %.4g\n",
                 rep::format_double(th.T).c_str(),
                 rep::format_double(th.h_threshold).c_str(), th.h_threshold / 1e-19,
                 th.h_threshold / vac.h_threshold);
  }
}

int cmd_sql(const Options& o) {
  const auto& p = o.params;
  sens::SqlResult r9 = sens::h_sql(p, p.t_obs);
  sens::SqlResult r15 = sens::h_sql_thermal(p, p.t_obs, p.T);
  sens::SqlResult rs;
  try {
    rs = sens::solve_h_threshold_linearized(p, p.t_obs, p.T);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("sql: threshold solve failed: ") + e.what());
  }
  auto t = sql_table();
  t.rows.push_back({p.T, p.t_obs, r9.h_threshold, r15.h_threshold, rs.h_threshold});
  emit(t, o);
  annotate_thermal(r9, r15);
  return 0;
}

int cmd_sweep(const Options& o, bool time_axis) {
  const auto& p = o.params;
  std::vector<sens::SweepPoint> points;
  if (time_axis) {
    const double t_hi = o.t_max < 0.0 ? p.t_obs : o.t_max;
    const auto grid = make_grid(o.t_min, t_hi, o.t_steps, o.log_grid);
    points = sens::sweep_time(p, p.T, grid);
  } else {
    const auto grid = make_grid(o.T_min, o.T_max, o.T_steps, o.log_grid);
    points = sens::sweep_temperature(p, p.t_obs, grid);
  }
  auto t = sql_table();
  for (const auto& sp : points) {
    if (!sp.error.empty() || !sp.h_vacuum || !sp.h_thermal || !sp.h_solver) {
      std::fprintf(stderr, "# skipped point T=%s t_obs=%s: %s\n",
                   rep::format_double(sp.T).c_str(), rep::format_double(sp.t_obs).c_str(),
                   sp.error.c_str());
      continue;
    }
    t.rows.push_back({sp.T, sp.t_obs, *sp.h_vacuum, *sp.h_thermal, *sp.h_solver});
  }
  emit(t, o);
  return 0;
}

int cmd_verify(const Options& o) {
  const auto d = gwsql::model::derive_couplings(o.params);
  if (d.g > 0.5 || o.params.N > 50.0)
    throw std::invalid_argument(
        "verify: refusing to run brute force outside the desk scale (need g <= 0.5 and "
        "N <= 50); rescale the parameters");
  orc::OracleConfig cfg;
  cfg.n_osc = o.n_osc;
  cfg.n_field = o.n_field;
  const auto checks =
      orc::run_adjudication(o.params, o.params.t_obs, cfg, o.use_printed_mean);
  bool all_pass = true;
  for (const auto& c : checks) all_pass = all_pass && c.pass;
  nlohmann::json doc;
  doc["all_pass"] = all_pass;
  doc["checks"] = rep::checks_to_json(checks);
  const std::string text = doc.dump(2) + "\n";
  if (o.out_path.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    std::ofstream out(o.out_path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file '" + o.out_path + "'");
    out << text;
  }
  size_t npass = 0;
  for (const auto& c : checks) npass += c.pass ? 1 : 0;
  std::fprintf(stderr, "verification: %zu/%zu checks passed\n", npass, checks.size());
  return all_pass ? 0 : 2;
}

int run(int argc, char** argv) {
  Options o;
  CLI::App app{"Quantum model of an interferometric gravitational-wave detector: "
               "output-signal statistics and the temperature-dependent SQL"};
  app.fallthrough(true);
  app.require_subcommand(1);

  std::map<std::string, CLI::Option*> opt_by_key;
  opt_by_key["omega"] = app.add_option("--omega", o.params.omega, "optical angular frequency [1/s]");
  opt_by_key["length"] = app.add_option("--length", o.params.L, "cavity length [m]");
  opt_by_key["mass"] = app.add_option("--mass", o.params.m, "oscillator mass [kg]");
  opt_by_key["omega0"] = app.add_option("--omega0", o.params.omega0, "oscillator eigenfrequency [1/s]");
  opt_by_key["omegag"] = app.add_option("--omega-g", o.params.omega_g, "GW angular frequency [1/s]");
  opt_by_key["h0"] = app.add_option("--h0", o.params.h0, "metric-perturbation amplitude");
  opt_by_key["photons"] = app.add_option("--photons", o.params.N, "mean photon number");
  opt_by_key["temperature"] = app.add_option("--temperature", o.params.T, "temperature [K]");
  opt_by_key["tobs"] = app.add_option("--t-obs", o.params.t_obs, "observation time [s]");
  opt_by_key["format"] = app.add_option("--format", o.format, "output format: csv or json");
  opt_by_key["out"] = app.add_option("--out", o.out_path, "output file path");
  app.add_option("--config", o.config_path, "flat key=value config file");

  auto* c_constants = app.add_subcommand("constants", "derived couplings and thermal factors");
  auto* c_signal = app.add_subcommand("signal", "signal mean/dispersion over a time grid");
  auto* c_sql = app.add_subcommand("sql", "minimal detectable strain at one point");
  auto* c_sweep = app.add_subcommand("sweep", "SQL over a temperature or time grid");
  auto* c_verify = app.add_subcommand("verify", "brute-force adjudication at desk scale");

  opt_by_key["tmin"] = c_signal->add_option("--t-min", o.t_min, "grid start [s]");
  opt_by_key["tmax"] = c_signal->add_option("--t-max", o.t_max, "grid end [s] (default t_obs)");
  opt_by_key["tsteps"] = c_signal->add_option("--t-steps", o.t_steps, "grid points");

  auto* sw_tmin = c_sweep->add_option("--t-min", o.t_min, "time-grid start [s]");
  auto* sw_tmax = c_sweep->add_option("--t-max", o.t_max, "time-grid end [s]");
  auto* sw_tsteps = c_sweep->add_option("--t-steps", o.t_steps, "time-grid points");
  opt_by_key["Tmin"] = c_sweep->add_option("--T-min", o.T_min, "temperature-grid start [K]");
  opt_by_key["Tmax"] = c_sweep->add_option("--T-max", o.T_max, "temperature-grid end [K]");
  opt_by_key["Tsteps"] = c_sweep->add_option("--T-steps", o.T_steps, "temperature-grid points");
  opt_by_key["loggrid"] = c_sweep->add_flag("--log-grid", o.log_grid, "log-spaced grid");

  opt_by_key["nosc"] = c_verify->add_option("--n-osc", o.n_osc, "oscillator Fock truncation");
  opt_by_key["nfield"] = c_verify->add_option("--n-field", o.n_field, "photon-sector cutoff");
  opt_by_key["useprintedmean"] = c_verify->add_flag(
      "--use-printed-mean", o.use_printed_mean,
      "hold the oracle against the verbatim sign variant of the mean (expected to fail)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  std::set<std::string> from_flags;
  for (const auto& [key, opt] : opt_by_key)
    if (opt->count() > 0) from_flags.insert(key);
  if (sw_tmin->count() || sw_tmax->count() || sw_tsteps->count()) {
    from_flags.insert("tmin");
    from_flags.insert("tmax");
    from_flags.insert("tsteps");
  }
  const auto from_config = apply_config_file(o, from_flags);
  auto given = [&](const std::string& key) {
    return from_flags.count(key) > 0 || from_config.count(key) > 0;
  };

  if (o.format != "csv" && o.format != "json")
    throw std::invalid_argument("format must be csv or json");

  if (c_verify->parsed()) {
    // verify runs at the engineered desk profile; explicitly-set physical
    // parameters override the profile.
    const Options user = o;
    const auto desk = orc::desk_profile();
    o.params = desk.params;
    o.params.t_obs = desk.t_star;
    if (given("omega")) o.params.omega = user.params.omega;
    if (given("length")) o.params.L = user.params.L;
    if (given("mass")) o.params.m = user.params.m;
    if (given("omega0")) o.params.omega0 = user.params.omega0;
    if (given("omegag")) o.params.omega_g = user.params.omega_g;
    if (given("h0")) o.params.h0 = user.params.h0;
    if (given("photons")) o.params.N = user.params.N;
    if (given("temperature")) o.params.T = user.params.T;
    if (given("tobs")) o.params.t_obs = user.params.t_obs;
    return cmd_verify(o);
  }

  gwsql::model::validate(o.params);
  if (c_constants->parsed()) return cmd_constants(o);
  if (c_signal->parsed()) return cmd_signal(o);
  if (c_sql->parsed()) return cmd_sql(o);
  if (c_sweep->parsed()) {
    const bool time_axis =
        sw_tmin->count() || sw_tmax->count() || sw_tsteps->count();
    return cmd_sweep(o, time_axis);
  }
  throw std::invalid_argument("no subcommand given");
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const gwsql::truncation_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
