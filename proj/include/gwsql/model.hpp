#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "gwsql/constants.hpp"
#include "gwsql/numerics.hpp"

namespace gwsql::model {

using numerics::cplx;

// All physical inputs, SI units throughout. Defaults are the LIGO-II-scale
// set (omega_g = 30 1/s, L = 4e3 m, m = 10 kg, omega = 1.8e15 1/s) with the
// oscillator tuned resonant, a drive amplitude at the zero-temperature SQL,
// no laser photons, and one second of observation.
struct DetectorParams {
  double omega = 1.8e15;    // optical angular frequency [1/s]
  double L = 4.0e3;         // cavity length [m]
  double m = 10.0;          // oscillator mass [kg]
  double omega0 = 30.0;     // oscillator eigenfrequency [1/s]
  double omega_g = 30.0;    // gravitational-wave angular frequency [1/s]
  double h0 = 5.0e-24;      // metric-perturbation amplitude [-]
  double N = 0.0;           // mean photon number [-]
  double I_N = 1.0;         // output power scale [arb]
  double T = 0.0;           // temperature [K]
  double t_obs = 1.0;       // observation time [s]
  double hbar = constants::hbar;
  double c = constants::c;
  double k_B = constants::k_B;
};

inline void validate(const DetectorParams& p) {
  auto req = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("DetectorParams: ") + what);
  };
  req(p.L > 0.0, "L must be positive");
  req(p.m > 0.0, "m must be positive");
  req(p.omega0 > 0.0, "omega0 must be positive");
  req(p.omega >= 0.0, "omega must be non-negative");
  req(p.omega_g >= 0.0, "omega_g must be non-negative");
  req(p.h0 >= 0.0, "h0 must be non-negative");
  req(p.N >= 0.0, "N must be non-negative");
  req(p.I_N > 0.0, "I_N must be positive");
  req(p.T >= 0.0, "T must be non-negative");
  req(p.t_obs >= 0.0, "t_obs must be non-negative");
  req(p.hbar > 0.0, "hbar must be positive");
  req(p.c > 0.0, "c must be positive");
  req(p.k_B > 0.0, "k_B must be positive");
}

// g: dimensionless interference coupling; kappa: optomechanical rate [1/s].
struct DerivedCouplings {
  double g = 0.0;
  double kappa = 0.0;
};

inline DerivedCouplings derive_couplings(const DetectorParams& p) {
  validate(p);
  DerivedCouplings d;
  d.g = p.omega / p.c * std::sqrt(p.hbar / (2.0 * p.m * p.omega0));
  d.kappa = p.omega / p.L * std::sqrt(2.0 * p.hbar / (p.m * p.omega0));
  return d;
}

// Classical drive force F_g(tau) = L m h0 omega_g^2 cos(omega_g tau) [N].
inline double gravitational_force(double tau, const DetectorParams& p) {
  validate(p);
  if (tau < 0.0) throw std::invalid_argument("gravitational_force: tau must be non-negative");
  return p.L * p.m * p.h0 * p.omega_g * p.omega_g * std::cos(p.omega_g * tau);
}

// Interference phase accumulated from the drive,
//   theta_g(t) = (omega/omega0) * int_0^t F_g(tau)/(m c) sin(omega0 (t-tau)) dtau,
// evaluated through its antiderivative in product form,
//   theta_g = (omega L h0 omega_g^2 t / c) sin((omega_g+omega0)t/2)
//             * sinc((omega_g-omega0)t/2) / (omega_g+omega0),
// which is continuous through resonance and reduces there to
// (omega L h0 omega0 t / (2c)) sin(omega0 t).
inline double theta_g(double t, const DetectorParams& p) {
  validate(p);
  if (t < 0.0) throw std::invalid_argument("theta_g: t must be non-negative");
  const double wp = p.omega_g + p.omega0;
  const double wm = p.omega_g - p.omega0;
  return p.omega * p.L * p.h0 * p.omega_g * p.omega_g * t / p.c *
         std::sin(0.5 * wp * t) * numerics::sinc(0.5 * wm * t) / wp;
}

// Per-photon light-pressure phase, theta_l(t) = 2 kappa g (1 - cos(omega0 t)) / omega0.
inline double theta_l(double t, const DetectorParams& p) {
  const auto d = derive_couplings(p);
  if (t < 0.0) throw std::invalid_argument("theta_l: t must be non-negative");
  const double s = std::sin(0.5 * p.omega0 * t);
  return 4.0 * d.kappa * d.g * s * s / p.omega0;
}

// Per-time phase data: the drive and light-pressure phases, the complex force
// and per-photon integrals entering beta_n(t) = n beta_kappa + beta_f, and the
// photon-number polynomial coefficients of the scalar C(t) of the evolution
// operator, C_n(t) = c0 + c1 n + c2 n^2 (Re C_n = |beta_n|^2 / 2 identically).
struct PhaseState {
  double t = 0.0;
  double theta_g = 0.0;
  double theta_l = 0.0;
  cplx beta_f{};
  cplx beta_kappa{};
  cplx c0{};
  cplx c1{};
  cplx c2{};
  bool near_resonant = false;

  cplx beta(double n) const { return n * beta_kappa + beta_f; }
  cplx C(double n) const { return c0 + n * (c1 + n * c2); }
};

inline PhaseState phase_state(double t, const DetectorParams& p,
                              double resonance_window = 1e-6) {
  const auto d = derive_couplings(p);
  if (t < 0.0) throw std::invalid_argument("phase_state: t must be non-negative");
  using numerics::cross_phase_integral;
  using numerics::phase_integral;

  const double b = p.omega0;
  const double wp = b + p.omega_g;
  const double wm = b - p.omega_g;
  // f(tau) = F_g(tau)/sqrt(2 m omega0 hbar) = F cos(omega_g tau)
  const double F = p.L * p.m * p.h0 * p.omega_g * p.omega_g /
                   std::sqrt(2.0 * p.m * p.omega0 * p.hbar);

  PhaseState ps;
  ps.t = t;
  ps.theta_g = theta_g(t, p);
  ps.theta_l = theta_l(t, p);
  ps.beta_kappa = d.kappa * phase_integral(b, t);
  ps.beta_f = 0.5 * F * (phase_integral(wp, t) + phase_integral(wm, t));
  ps.c2 = d.kappa * d.kappa * cross_phase_integral(b, b, t);
  ps.c1 = 0.5 * d.kappa * F *
          (cross_phase_integral(b, wp, t) + cross_phase_integral(b, wm, t) +
           cross_phase_integral(wp, b, t) + cross_phase_integral(wm, b, t));
  ps.c0 = 0.25 * F * F *
          (cross_phase_integral(wp, wp, t) + cross_phase_integral(wp, wm, t) +
           cross_phase_integral(wm, wp, t) + cross_phase_integral(wm, wm, t));
  ps.near_resonant = std::abs(wm) < resonance_window * b;
  return ps;
}

}  // namespace gwsql::model
