#ifndef TESTS_ORACLES_HPP
#define TESTS_ORACLES_HPP

// Test-side reference implementations, independent of the library under
// test. Everything here is deliberately simple and slow: fixed-step RK4,
// power series, bisection. Frozen reference values live next to the
// routine that re-derives them so the freeze can be audited.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracles {

// --- generating-curve reference integrator -------------------------------

struct State {
  double r, z, phi;
};

// Right-hand side of r' = cos(phi), z' = sin(phi),
// phi' = -2 cos(phi)/z - sin(phi)/r - 2 c_o, written from scratch.
inline State rhs(const State& s, double c_o) {
  return {std::cos(s.phi), std::sin(s.phi),
          -2.0 * std::cos(s.phi) / s.z - std::sin(s.phi) / s.r - 2.0 * c_o};
}

// Series start a small offset away from the coordinate singularity r = 0.
inline State apex_series(double z_hat, double c_o, double d) {
  const double p1 = -(1.0 / z_hat + c_o);
  const double p3 = -c_o * p1 / (4.0 * z_hat);
  State s;
  s.r = d - p1 * p1 * d * d * d / 6.0;
  s.z = z_hat + p1 * d * d / 2.0 + (p3 - p1 * p1 * p1 / 6.0) * d * d * d * d / 4.0;
  s.phi = p1 * d + p3 * d * d * d;
  return s;
}

// Classical RK4 with n fixed steps from sigma = delta to sigma = sigma_end.
inline State rk4_profile(double z_hat, double c_o, double sigma_end, int n,
                         double delta = 1e-6) {
  State s = apex_series(z_hat, c_o, delta);
  const double h = (sigma_end - delta) / n;
  for (int i = 0; i < n; ++i) {
    const State k1 = rhs(s, c_o);
    const State s2{s.r + 0.5 * h * k1.r, s.z + 0.5 * h * k1.z, s.phi + 0.5 * h * k1.phi};
    const State k2 = rhs(s2, c_o);
    const State s3{s.r + 0.5 * h * k2.r, s.z + 0.5 * h * k2.z, s.phi + 0.5 * h * k2.phi};
    const State k3 = rhs(s3, c_o);
    const State s4{s.r + h * k3.r, s.z + h * k3.z, s.phi + h * k3.phi};
    const State k4 = rhs(s4, c_o);
    s.r += h / 6.0 * (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r);
    s.z += h / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z);
    s.phi += h / 6.0 * (k1.phi + 2.0 * k2.phi + 2.0 * k3.phi + k4.phi);
  }
  return s;
}

// --- Bessel J0 and its first zero -----------------------------------------

inline double bessel_j0(double x) {
  // Power series sum (-1)^k (x/2)^{2k} / (k!)^2; fine for |x| < 12.
  const double q = -0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// k-th positive zero of J0 (k = 1, 2, 3) by sign bisection on unit brackets.
inline double j0_zero(int k) {
  // J0 changes sign once inside each bracket.
  const double brackets[3][2] = {{2.0, 3.0}, {5.0, 6.0}, {8.0, 9.0}};
  if (k < 1 || k > 3) throw std::invalid_argument("j0_zero: k in 1..3");
  double lo = brackets[k - 1][0], hi = brackets[k - 1][1];
  const double sign_lo = bessel_j0(lo) > 0.0 ? 1.0 : -1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (sign_lo * bessel_j0(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double first_j0_zero() { return j0_zero(1); }

// DERIVED (frozen): first positive zero of J0, from first_j0_zero().
constexpr double kJ01 = 2.404825557695773;

// Dirichlet eigenvalues of the flat-disc pencils of radius R at height
// z = -1/c_o, reduced to the Bessel problem on the disc:
//   P f + lambda f / z^2 = 0  =>  lambda = 2 + (j01 / R)^2 / c_o^2
//   P f + lambda z^2 f   = 0  =>  lambda = c_o^2 ((j01 / R)^2 + 2 c_o^2)
inline double disc_lambda1_invzsq(double c_o, double R) {
  const double k2 = (kJ01 / R) * (kJ01 / R);
  return 2.0 + k2 / (c_o * c_o);
}
// k-th InvZSq disc eigenvalue (k = 1, 2, 3) via the J0 zeros.
inline double disc_lambda_invzsq(double c_o, double R, int k) {
  const double j = j0_zero(k);
  return 2.0 + (j / R) * (j / R) / (c_o * c_o);
}
inline double disc_lambda1_zsq(double c_o, double R) {
  const double k2 = (kJ01 / R) * (kJ01 / R);
  return c_o * c_o * (k2 + 2.0 * c_o * c_o);
}

// --- quadrature ------------------------------------------------------------

inline double trapz(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("trapz: bad sizes");
  double acc = 0.0;
  for (size_t i = 1; i < x.size(); ++i)
    acc += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  return acc;
}

// Adaptive-by-refinement composite Simpson on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int n = 1 << 14) {
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return acc * h / 3.0;
}

// --- spherical-cap closed forms (unit sphere, apex height 1) ---------------
// Cap sigma in [0, s]: r = sin(sigma), z = cos(sigma), phi = -sigma.
//   area                 2 pi (1 - cos s)
//   hyperbolic area      2 pi (1/cos s - 1)          [int z^-2 dSigma]
//   Willmore (c_o = 0)   equals the area (H = -1)
//   potential volume     pi (cos s + 1/cos s - 2)    [int z^-2 dV, slicing]
inline double cap_area(double s) { return 2.0 * M_PI * (1.0 - std::cos(s)); }
inline double cap_hyperbolic_area(double s) {
  return 2.0 * M_PI * (1.0 / std::cos(s) - 1.0);
}
inline double cap_potential_volume(double s) {
  const double c = std::cos(s);
  return M_PI * (c + 1.0 / c - 2.0);
}

}  // namespace oracles

#endif  // TESTS_ORACLES_HPP
