#include "membrane/fields.hpp"

#include <cmath>

namespace membrane {

namespace {

constexpr Scalar kFluxGuard = 1e-10;

bool grid_is_uniform(const Eigen::ArrayXd& sigma) {
  const Eigen::Index n = sigma.size() - 1;
  if (n < 2) return false;
  const Scalar h = sigma[n] / static_cast<Scalar>(n);
  for (Eigen::Index i = 0; i <= n; ++i)
    if (std::abs(sigma[i] - h * static_cast<Scalar>(i)) > 1e-10 * (1.0 + std::abs(sigma[i])))
      return false;
  return true;
}

}  // namespace

FieldTable geometric_fields(const ProfileCurve& curve) {
  const Eigen::Index n = curve.node_count();
  FieldTable f;
  f.H.resize(n);
  f.K.resize(n);
  f.nu3.resize(n);
  f.nu_r.resize(n);
  f.q.resize(n);
  f.kappa_m.resize(n);
  f.kappa_p.resize(n);

  for (Eigen::Index i = 0; i < n; ++i) {
    const CurveState s{curve.r[i], curve.z[i], curve.phi[i]};
    const Scalar km = curve.phi_rate(s);
    const Scalar kp = (s.r > 0.0) ? std::sin(s.phi) / s.r : curve.apex_slope;
    f.kappa_m[i] = km;
    f.kappa_p[i] = kp;
    f.H[i] = 0.5 * (km + kp);
    f.K[i] = km * kp;
    f.nu3[i] = std::cos(s.phi);
    f.nu_r[i] = -std::sin(s.phi);
    f.q[i] = -s.r * std::sin(s.phi) + s.z * std::cos(s.phi);
  }
  return f;
}

Scalar rme_residual(const ProfileCurve& curve, const FieldTable& fields, Scalar c_o) {
  Scalar worst = 0.0;
  for (Eigen::Index i = 0; i < curve.node_count(); ++i)
    worst = std::max(worst, std::abs(fields.H[i] + c_o + fields.nu3[i] / curve.z[i]));
  return worst;
}

FluxScalarResult flux_scalar(const ProfileCurve& curve, const FieldTable& fields,
                             Scalar c_o) {
  FluxScalarResult out;
  for (Eigen::Index i = 0; i < curve.node_count(); ++i) {
    const Scalar denom = fields.H[i] + c_o;
    if (std::abs(denom) < kFluxGuard) {
      ++out.skipped_nodes;
      continue;
    }
    out.residual = std::max(out.residual, std::abs(fields.nu3[i] / denom + curve.z[i]));
  }
  return out;
}

BoundaryData boundary_darboux(const ProfileCurve& curve, const FieldTable& fields) {
  const Eigen::Index n = curve.node_count() - 1;
  const Scalar phi_e = curve.phi[n];
  BoundaryData b;
  b.r_o = curve.r[n];
  b.z_o = curve.z[n];
  b.kappa = 1.0 / b.r_o;
  b.kappa_n = std::sin(phi_e) / b.r_o;
  b.kappa_g = -std::cos(phi_e) / b.r_o;
  b.tau_g = 0.0;
  b.dn_z = std::sin(phi_e);

  // One-sided 3-point derivative of nu3 at sigma_end. Uses the curve's own
  // spacing on a uniform grid, otherwise a dense-output stencil.
  Scalar h;
  Scalar f0, f1, f2;
  if (grid_is_uniform(curve.sigma)) {
    h = curve.sigma[n] - curve.sigma[n - 1];
    f0 = fields.nu3[n];
    f1 = fields.nu3[n - 1];
    f2 = fields.nu3[n - 2];
  } else {
    h = curve.sigma_end() / 512.0;
    f0 = std::cos(curve.at(curve.sigma_end()).phi);
    f1 = std::cos(curve.at(curve.sigma_end() - h).phi);
    f2 = std::cos(curve.at(curve.sigma_end() - 2.0 * h).phi);
  }
  b.dn_nu3 = (3.0 * f0 - 4.0 * f1 + f2) / (2.0 * h);
  b.dn_H = -b.dn_nu3 / b.z_o + fields.nu3[n] * b.dn_z / (b.z_o * b.z_o);
  return b;
}

namespace {

bool uniform_grid(const Eigen::ArrayXd& sigma) {
  const Eigen::Index n = sigma.size() - 1;
  const Scalar h = (sigma[n] - sigma[0]) / static_cast<Scalar>(n);
  for (Eigen::Index i = 0; i <= n; ++i)
    if (std::abs(sigma[i] - sigma[0] - h * static_cast<Scalar>(i)) >
        1e-10 * (1.0 + std::abs(sigma[n])))
      return false;
  return true;
}

}  // namespace

Scalar surface_integral(const ProfileCurve& curve, const Eigen::ArrayXd& g, int mode) {
  if (g.size() != curve.node_count())
    throw InvalidArgument("surface_integral: integrand size mismatch");
  const Eigen::Index n = curve.node_count() - 1;
  const Scalar angular = mode == 0 ? 2.0 * M_PI : M_PI;
  // Composite Simpson on uniform grids with an even panel count; trapezoid
  // otherwise. The integrand g r is smooth in sigma on resampled curves.
  if (n >= 2 && n % 2 == 0 && uniform_grid(curve.sigma)) {
    const Scalar h = (curve.sigma[n] - curve.sigma[0]) / static_cast<Scalar>(n);
    Scalar acc = g[0] * curve.r[0] + g[n] * curve.r[n];
    for (Eigen::Index i = 1; i < n; ++i)
      acc += (i % 2 ? 4.0 : 2.0) * g[i] * curve.r[i];
    return acc * h / 3.0 * angular;
  }
  Scalar acc = 0.0;
  for (Eigen::Index i = 0; i + 1 < curve.node_count(); ++i) {
    const Scalar w = curve.sigma[i + 1] - curve.sigma[i];
    acc += 0.5 * w * (g[i] * curve.r[i] + g[i + 1] * curve.r[i + 1]);
  }
  return acc * angular;
}

Scalar potential_volume_integral(const ProfileCurve& curve) {
  const Eigen::Index n = curve.node_count() - 1;
  const Scalar zs = curve.z_hat > 0.0 ? 1.0 : -1.0;
  for (Eigen::Index i = 0; i <= n; ++i)
    if (curve.z[i] * zs <= 0.0)
      throw InvalidArgument("potential_volume_integral: curve crosses z = 0");

  Eigen::ArrayXd integrand(n + 1);
  for (Eigen::Index i = 0; i <= n; ++i) {
    const Scalar q = -curve.r[i] * std::sin(curve.phi[i]) +
                     curve.z[i] * std::cos(curve.phi[i]);
    integrand[i] = q / (curve.z[i] * curve.z[i]);
  }
  const Scalar surface_part = surface_integral(curve, integrand, 0);
  const Scalar disc_part = M_PI * curve.r[n] * curve.r[n] / curve.z[n];
  return surface_part - disc_part;
}

EnergyRecord energies(const ProfileCurve& curve, const FieldTable& fields,
                      const ModelParams& params) {
  EnergyRecord e;
  const Eigen::ArrayXd bend = (fields.H + params.c_o).square();
  e.helfrich = surface_integral(curve, bend, 0);
  e.gauss_term = params.b * surface_integral(curve, fields.K, 0);
  e.hyperbolic_area = surface_integral(curve, curve.z.square().inverse(), 0);
  e.potential = potential_volume_integral(curve);
  e.G = e.hyperbolic_area - 2.0 * params.c_o * e.potential;
  const Scalar r_o = curve.r[curve.node_count() - 1];
  e.boundary_elastic = 2.0 * M_PI * r_o * (params.alpha / (r_o * r_o) + params.beta);
  e.euler_helfrich = params.a * e.helfrich + e.gauss_term + e.boundary_elastic;
  return e;
}

}  // namespace membrane
