#ifndef MEMBRANE_FIELDS_HPP
#define MEMBRANE_FIELDS_HPP

#include <Eigen/Dense>

#include "membrane/profile.hpp"

namespace membrane {

// Pointwise geometric quantities on the curve grid.
struct FieldTable {
  Eigen::ArrayXd H;        // mean curvature
  Eigen::ArrayXd K;        // Gaussian curvature
  Eigen::ArrayXd nu3;      // vertical normal component, cos(phi)
  Eigen::ArrayXd nu_r;     // radial normal component, -sin(phi)
  Eigen::ArrayXd q;        // support function X.nu
  Eigen::ArrayXd kappa_m;  // meridian principal curvature, phi'
  Eigen::ArrayXd kappa_p;  // parallel principal curvature, sin(phi)/r
};

// Darboux data of the boundary parallel circle.
struct BoundaryData {
  Scalar r_o = 0.0;      // boundary circle radius
  Scalar z_o = 0.0;      // boundary height
  Scalar kappa = 0.0;    // space curvature of the circle, 1/r_o
  Scalar kappa_n = 0.0;  // normal curvature, sin(phi_end)/r_o
  Scalar kappa_g = 0.0;  // geodesic curvature, -cos(phi_end)/r_o
  Scalar tau_g = 0.0;    // geodesic torsion (zero for parallels)
  Scalar dn_z = 0.0;     // outward-conormal derivative of z, sin(phi_end)
  Scalar dn_H = 0.0;     // from the reduced membrane equation
  Scalar dn_nu3 = 0.0;   // one-sided finite difference
};

struct FluxScalarResult {
  Scalar residual = 0.0;
  int skipped_nodes = 0;  // nodes where |H + c_o| < 1e-10
};

struct EnergyRecord {
  Scalar helfrich = 0.0;         // integral of (H + c_o)^2
  Scalar gauss_term = 0.0;       // b * integral of K
  Scalar hyperbolic_area = 0.0;  // integral of z^-2
  Scalar potential = 0.0;        // volume integral of z^-2
  Scalar G = 0.0;                // hyperbolic_area - 2 c_o potential
  Scalar boundary_elastic = 0.0; // 2 pi r_o (alpha/r_o^2 + beta)
  Scalar euler_helfrich = 0.0;   // a*helfrich + gauss_term + boundary_elastic
};

FieldTable geometric_fields(const ProfileCurve& curve);

// Max-norm residual of H + c_o + nu3/z; doubles as an integration-quality
// metric.
Scalar rme_residual(const ProfileCurve& curve, const FieldTable& fields, Scalar c_o);

// Max |nu3/(H+c_o) + z| over nodes where H + c_o is bounded away from zero.
// Identically zero on solutions of the reduced membrane equation.
FluxScalarResult flux_scalar(const ProfileCurve& curve, const FieldTable& fields,
                             Scalar c_o);

BoundaryData boundary_darboux(const ProfileCurve& curve, const FieldTable& fields);

// Integral of g against r dsigma, times the angular factor (2 pi for mode 0,
// pi for modes m >= 1). Composite Simpson on uniform grids with an even
// number of panels, composite trapezoid otherwise.
Scalar surface_integral(const ProfileCurve& curve, const Eigen::ArrayXd& g, int mode = 0);

// Integral of z^-2 over the region bounded by the surface and the flat disc
// at the boundary parallel, via the divergence reduction
//   int_V z^-2 dV = int_Sigma q/z^2 dSigma - pi r_o^2 / z_o.
Scalar potential_volume_integral(const ProfileCurve& curve);

EnergyRecord energies(const ProfileCurve& curve, const FieldTable& fields,
                      const ModelParams& params);

}  // namespace membrane

#endif  // MEMBRANE_FIELDS_HPP
