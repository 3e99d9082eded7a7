#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gwsql/closedform.hpp"
#include "gwsql/model.hpp"

// Detection condition and minimal detectable strain: the zero-temperature
// standard quantum limit, its temperature scaling, and a threshold solver for
// the linearized detection condition.

namespace gwsql::sensitivity {

enum class Method { sql_zero_temperature, sql_thermal, linearized_solve };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::sql_zero_temperature: return "sql_zero_temperature";
    case Method::sql_thermal: return "sql_thermal";
    case Method::linearized_solve: return "linearized_solve";
  }
  return "?";
}

struct SqlResult {
  double h_threshold = 0.0;
  double T = 0.0;
  double t_obs = 0.0;
  Method method = Method::sql_zero_temperature;
};

// Detection margin I - sqrt(D); detection is declared when positive.
inline double detection_margin(const closedform::SignalStats& s) {
  return s.mean - std::sqrt(std::max(s.dispersion, 0.0));
}

// h_SQL = sqrt(hbar/(m omega0)) / (L t omega0).
inline SqlResult h_sql(const model::DetectorParams& p, double t_obs) {
  model::validate(p);
  if (!(t_obs > 0.0)) throw std::invalid_argument("h_sql: t_obs must be positive");
  const double h = std::sqrt(p.hbar / (p.m * p.omega0)) / (p.L * t_obs * p.omega0);
  return {h, 0.0, t_obs, Method::sql_zero_temperature};
}

// h_SQL(T) = h_SQL sqrt(1 + k_B T / (hbar omega0)).
inline SqlResult h_sql_thermal(const model::DetectorParams& p, double t_obs, double T) {
  if (T < 0.0) throw std::invalid_argument("h_sql_thermal: T must be non-negative");
  const double h =
      h_sql(p, t_obs).h_threshold * std::sqrt(1.0 + p.k_B * T / (p.hbar * p.omega0));
  return {h, T, t_obs, Method::sql_thermal};
}

// Envelope time: the instant with |sin(omega0 t)| = 1 nearest t_obs.
inline double envelope_time(const model::DetectorParams& p, double t_obs) {
  model::validate(p);
  if (!(t_obs > 0.0)) throw std::invalid_argument("envelope_time: t_obs must be positive");
  const double pi = std::numbers::pi;
  const double k = std::max(0.0, std::round(p.omega0 * t_obs / pi - 0.5));
  return (k + 0.5) * pi / p.omega0;
}

struct SolveOptions {
  // Default is the semiclassical comparison (photon-number fluctuations
  // dropped from both sides), the branch that yields the thermal SQL scaling.
  bool include_photon_fluctuations = false;
  // Thermal variance term: false -> g^2 kT/(hbar omega0) verbatim,
  // true -> 2 g^2 nbar(T) from the alpha^4 algebra.
  bool exact_thermal_variance = false;
  double rel_tol = 1e-3;
  double h_lo = 1e-30;
  double h_hi = 1e-10;
};

// Smallest h0 satisfying the linearized detection condition
//   |theta_g + N theta_l| > sqrt(g^2 + g^2 kT/(hbar omega0) + N theta_l^2)
// at the envelope time, found by bisection in log space to rel_tol.
inline SqlResult solve_h_threshold_linearized(const model::DetectorParams& p, double t_obs,
                                              double T, SolveOptions opt = {}) {
  model::validate(p);
  if (T < 0.0) throw std::invalid_argument("solve_h_threshold_linearized: T must be non-negative");
  const auto d = model::derive_couplings(p);
  if (!(d.g < 1e-2))
    throw std::invalid_argument("solve_h_threshold_linearized: outside the small-g regime");

  const double t_env = envelope_time(p, t_obs);
  model::DetectorParams unit = p;
  unit.h0 = 1.0;
  const double slope = std::abs(model::theta_g(t_env, unit));  // |theta_g| per unit h0
  const double th_l = 2.0 * d.kappa * d.g / p.omega0;          // cos(omega0 t_env) = 0
  const auto ts = closedform::thermal_alpha(d, p, T);
  const double var_term =
      opt.exact_thermal_variance ? 2.0 * ts.nbar : ts.theta / (p.hbar * p.omega0);
  const double radicand =
      d.g * d.g * (1.0 + var_term) +
      (opt.include_photon_fluctuations ? p.N * th_l * th_l : 0.0);
  const double rhs = std::sqrt(radicand);
  if (!(rhs < 0.1))
    throw std::invalid_argument(
        "solve_h_threshold_linearized: noise phase not small, linearization invalid");
  const double offset = opt.include_photon_fluctuations ? p.N * th_l : 0.0;
  auto margin = [&](double h) { return slope * h + offset - rhs; };

  if (margin(opt.h_lo) >= 0.0)
    throw std::domain_error(
        "solve_h_threshold_linearized: condition holds without a gravitational signal "
        "(threshold below h_lo)");
  if (margin(opt.h_hi) < 0.0)
    throw std::domain_error("solve_h_threshold_linearized: no threshold below h_hi");

  double lo = opt.h_lo, hi = opt.h_hi;
  while (hi - lo > opt.rel_tol * hi) {
    const double mid = std::sqrt(lo * hi);
    (margin(mid) < 0.0 ? lo : hi) = mid;
  }
  return {std::sqrt(lo * hi), T, t_obs, Method::linearized_solve};
}

struct SweepPoint {
  double T = 0.0;
  double t_obs = 0.0;
  std::optional<double> h_vacuum;   // zero-temperature formula
  std::optional<double> h_thermal;  // thermal formula
  std::optional<double> h_solver;   // linearized threshold solve
  std::string error;                // non-empty if any method failed here
};

namespace detail {
inline SweepPoint sweep_point(const model::DetectorParams& p, double t_obs, double T) {
  SweepPoint sp;
  sp.T = T;
  sp.t_obs = t_obs;
  auto attempt = [&](std::optional<double>& slot, auto&& fn) {
    try {
      slot = fn().h_threshold;
    } catch (const std::exception& e) {
      if (!sp.error.empty()) sp.error += "; ";
      sp.error += e.what();
    }
  };
  attempt(sp.h_vacuum, [&] { return h_sql(p, t_obs); });
  attempt(sp.h_thermal, [&] { return h_sql_thermal(p, t_obs, T); });
  attempt(sp.h_solver, [&] { return solve_h_threshold_linearized(p, t_obs, T); });
  return sp;
}
}  // namespace detail

inline std::vector<SweepPoint> sweep_temperature(const model::DetectorParams& p,
                                                 double t_obs,
                                                 std::span<const double> T_grid) {
  if (T_grid.empty()) throw std::invalid_argument("sweep_temperature: empty grid");
  std::vector<SweepPoint> out;
  out.reserve(T_grid.size());
  for (double T : T_grid) out.push_back(detail::sweep_point(p, t_obs, T));
  return out;
}

inline std::vector<SweepPoint> sweep_time(const model::DetectorParams& p, double T,
                                          std::span<const double> t_grid) {
  if (t_grid.empty()) throw std::invalid_argument("sweep_time: empty grid");
  std::vector<SweepPoint> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) out.push_back(detail::sweep_point(p, t, T));
  return out;
}

}  // namespace gwsql::sensitivity
