#ifndef MEMBRANE_PROFILE_HPP
#define MEMBRANE_PROFILE_HPP

#include <Eigen/Dense>
#include <memory>
#include <optional>

#include "membrane/types.hpp"

namespace membrane {

// Point on the generating curve: radius, height and tangent angle.
struct CurveState {
  Scalar r = 0.0;
  Scalar z = 0.0;
  Scalar phi = 0.0;
};

// Extended-precision state, used where finite differences would otherwise
// amplify double rounding (fourth-order compositions divide by h^4).
struct CurveStateL {
  long double r = 0.0L;
  long double z = 0.0L;
  long double phi = 0.0L;
};

// Dense-output backend of a generating curve; evaluable anywhere on
// [0, sigma_end] without reintegration.
class DenseCurve {
 public:
  virtual ~DenseCurve() = default;
  virtual CurveState eval(Scalar sigma) const = 0;
  virtual Scalar sigma_end() const = 0;

  // Backends that integrate in extended precision override this. The
  // parameter is long double as well: double-rounded stencil abscissae
  // would reintroduce noise of size eps |f'| into fourth-order residuals.
  virtual CurveStateL eval_ld(long double sigma) const {
    const CurveState s = eval(static_cast<Scalar>(sigma));
    return CurveStateL{s.r, s.z, s.phi};
  }
};

// Arc-length-sampled generating curve of an axially symmetric solution of
// the reduced membrane equation H + c_o = -nu3/z.
//
// Sign conventions (see docs/conventions.md): the unit normal is
// nu = (-sin(phi) cos(theta), -sin(phi) sin(theta), cos(phi)), so
// nu3 = cos(phi), kappa_m = phi', kappa_p = sin(phi)/r and 2H = phi' +
// sin(phi)/r = -2 cos(phi)/z - 2 c_o along solutions.
struct ProfileCurve {
  Eigen::ArrayXd sigma;  // strictly increasing, sigma[0] = 0
  Eigen::ArrayXd r;      // r[0] = 0
  Eigen::ArrayXd z;      // one sign throughout
  Eigen::ArrayXd phi;    // phi[0] = 0

  std::optional<Scalar> event_sigma;  // located event parameter, if any
  StopKind event_kind = StopKind::SigmaMax;
  ModelParams params;
  Scalar z_hat = 0.0;
  Scalar apex_slope = 0.0;  // phi'(0) = -(1/z_hat + c_o)

  std::shared_ptr<const DenseCurve> dense;

  Eigen::Index node_count() const { return sigma.size(); }
  Scalar sigma_end() const { return sigma[sigma.size() - 1]; }
  CurveState at(Scalar s) const { return dense->eval(s); }

  // phi'(sigma) from the generating-curve system; apex handled by the
  // symmetric limit phi'(0) = apex_slope.
  Scalar phi_rate(const CurveState& s) const;
  Scalar phi_rate_at(Scalar sig) const { return phi_rate(at(sig)); }
};

// phi'(0) for the regular series start at the apex.
Scalar apex_slope_of(const ModelParams& params, const ApexInit& init);

// Series state of the generating curve at sigma = delta. Regularizes the
// sin(phi)/r term of the system at r = 0.
CurveState apex_expansion(const ModelParams& params, const ApexInit& init, Scalar delta);

// Offset at which adaptive integration takes over from the apex series.
Scalar apex_start_offset(const ModelParams& params, const ApexInit& init);

// Adaptive integration of the generating-curve system from the apex until
// the requested stopping event (bracketed and bisected on dense output) or
// the arc-length cap.
// The default tolerance is tight because finite-difference rows divide
// dense-output values by h^2; looser tolerances leak into operator
// residuals.
ProfileCurve integrate_profile(const ModelParams& params, const ApexInit& init,
                               const StopRule& stop, Scalar tol = 1e-12);

// Refined event parameter on an already integrated curve. Idempotent when
// the curve already terminates at the event.
Scalar locate_event(const ProfileCurve& curve, const StopRule& rule);

// Re-evaluation of the dense output on a uniform grid of n+1 nodes.
ProfileCurve resample(const ProfileCurve& curve, int n);

// Synthetic planar disc r = sigma, z = -1/c_o, phi = 0: the flat solution
// of the reduced membrane equation. Requires c_o != 0.
ProfileCurve make_flat_disc(const ModelParams& params, Scalar radius, int n = 64);

}  // namespace membrane

#endif  // MEMBRANE_PROFILE_HPP
