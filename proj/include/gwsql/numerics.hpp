#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace gwsql {

// Raised when a truncated-basis computation cannot meet its accuracy contract.
class truncation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace numerics {

using cplx = std::complex<double>;

inline cplx cis(double x) { return {std::cos(x), std::sin(x)}; }

// sin(x)/x, continuous through x = 0.
inline double sinc(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
  }
  return std::sin(x) / x;
}

// Compensated accumulation for long alternating/geometric sums.
struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

// G(x; t) = integral over [0,t] of e^{i x tau} dtau = t e^{i x t / 2} sinc(x t / 2).
// The product form is exact and free of cancellation for all x, including x = 0.
inline cplx phase_integral(double x, double t) {
  const double u = 0.5 * x * t;
  return t * cis(u) * sinc(u);
}

// M_j(z; t) = integral over [0,t] of tau^j e^{i z tau} dtau.
// Power series in (i z t) for small |z t|, upward recursion from M_0 otherwise.
inline cplx power_phase_integral(int j, double z, double t) {
  if (j < 0) throw std::invalid_argument("power_phase_integral: j must be non-negative");
  if (t == 0.0) return 0.0;
  const double zt = std::abs(z * t);
  if (zt <= 5.0) {
    const cplx izt(0.0, z * t);
    cplx term(1.0, 0.0);  // (izt)^l / l!
    cplx acc = term / double(j + 1);
    for (int l = 1; l < 80; ++l) {
      term *= izt / double(l);
      const cplx add = term / double(j + l + 1);
      acc += add;
      if (std::abs(add) < 1e-20 * std::abs(acc)) break;
    }
    return std::pow(t, j + 1) * acc;
  }
  const cplx iz(0.0, z);
  cplx m = phase_integral(z, t);
  const cplx e = cis(z * t);
  double tp = 1.0;
  for (int k = 1; k <= j; ++k) {
    tp *= t;
    m = (tp * e - double(k) * m) / iz;
  }
  return m;
}

// J(x, y; t) = integral over [0,t] of e^{i x tau} (1 - e^{-i y tau}) / (i y) dtau,
// i.e. the cross term of one phase integral against the conjugate of another.
// The difference quotient cancels catastrophically for small |y t|; there the
// integrand is expanded as tau e^{i (x - y/2) tau} sinc(y tau / 2).
inline cplx cross_phase_integral(double x, double y, double t) {
  if (t == 0.0) return 0.0;
  if (std::abs(y) * std::abs(t) > 0.5) {
    return (phase_integral(x, t) - phase_integral(x - y, t)) / cplx(0.0, y);
  }
  const double z = x - 0.5 * y;
  const double h2 = 0.25 * y * y;
  cplx acc = 0.0;
  double coef = 1.0;  // (-1)^k (y/2)^{2k} / (2k+1)!
  for (int k = 0; k <= 8; ++k) {
    if (k > 0) coef *= -h2 / double(2 * k * (2 * k + 1));
    const cplx add = coef * power_phase_integral(2 * k + 1, z, t);
    acc += add;
    if (std::abs(add) < 1e-18 * std::abs(acc)) break;
  }
  return acc;
}

}  // namespace numerics
}  // namespace gwsql
