#ifndef MEMBRANE_STABILITY_HPP
#define MEMBRANE_STABILITY_HPP

#include <string>
#include <vector>

#include "membrane/fields.hpp"
#include "membrane/spectrum.hpp"

namespace membrane {

enum class Verdict {
  Stable,               // gate holds and the h-integral criterion passes
  Unstable,             // gate holds and the criterion fails (or no h exists)
  StableUnconstrained,  // lambda1 >= 0, form nonnegative without the constraint
  UnstableTwoNegative,  // lambda2 < 0, two-dimensional negative subspace
  Inapplicable
};

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Stable: return "stable";
    case Verdict::Unstable: return "unstable";
    case Verdict::StableUnconstrained: return "stable-unconstrained";
    case Verdict::UnstableTwoNegative: return "unstable-two-negative";
    case Verdict::Inapplicable: return "inapplicable";
  }
  return "?";
}

inline bool is_unstable(Verdict v) {
  return v == Verdict::Unstable || v == Verdict::UnstableTwoNegative;
}

struct QuadFormSample {
  std::string id;
  Scalar d2G = 0.0;
  Scalar d2H = 0.0;
  Scalar d2E = 0.0;
};

struct ElResiduals {
  Scalar el2 = 0.0;  // a(H + c_o) + b kappa_n
  Scalar el3 = 0.0;  // J'.nu - a dn_H + b tau_g'
  Scalar el4 = 0.0;  // J'.n + a(H + c_o)^2 + b K
};

struct AlphaBetaSample {
  Scalar alpha = 0.0;
  Scalar beta = 0.0;
  ElResiduals res;
};

struct ElReport {
  ElResiduals at_params;          // residuals at the model alpha, beta
  Scalar admissibility_c = 0.0;   // a(1 - 2 c_o r_o) / z_o
  std::vector<AlphaBetaSample> admissible;  // samples on beta = alpha/r_o^2 - C
};

struct CorollaryReport {
  bool cor_applicable = false;
  std::string cor_reason;       // failed precondition, when inapplicable
  Verdict cor_verdict = Verdict::Inapplicable;
  Scalar cor_value = 0.0;       // boundary-only second variation of E at nu3
  bool cor2_applicable = false;
  std::string cor2_reason;
  Verdict cor2_verdict = Verdict::Inapplicable;
  Scalar cor2_sign = 0.0;       // (alpha/r_o^2 - beta) K at the boundary
};

struct PsiSolution {
  Eigen::ArrayXd psi;       // on the curve grid, psi(0) = 1
  Scalar psi_boundary = 0.0;
  Scalar dn_psi_boundary = 0.0;
};

struct StabilityReport {
  Scalar lambda1 = 0.0;  // first two axisymmetric (mode 0) ZSq eigenvalues
  Scalar lambda2 = 0.0;
  // First Dirichlet eigenvalue of the mode-1 pencil. Mode m >= 1 variations
  // integrate to zero against 1/z^2, so they are automatically admissible;
  // a negative value is unconstrained instability (this is the eigenvalue
  // that crosses zero at the horizontal-tangent rim, where the conormal
  // translation field -sin(phi) becomes a Dirichlet kernel element).
  Scalar lambda1_m1 = 0.0;
  Scalar h_integral = 0.0;
  Verdict verdict = Verdict::Inapplicable;
  std::string reason;
  bool h_solved = false;
  Eigen::ArrayXd h;
  Scalar psi_boundary = 0.0;
  Scalar dn_psi_boundary = 0.0;
  std::vector<QuadFormSample> quadratic_form_samples;
  ElReport el;
};

// Banded solve of P[h] = -2 with Dirichlet outer data and the regular apex
// closure. Throws SingularOperator when 0 is a ZSq eigenvalue within
// tolerance.
Eigen::ArrayXd solve_h(const DiscreteOperator& opP);

// Axially symmetric kernel field: P[psi] = 0, psi(0) = 1, psi'(0) = 0,
// integrated as an initial value problem on the curve's dense output.
PsiSolution shoot_psi(const ProfileCurve& curve, const FieldTable& fields,
                      const ModelParams& params);

// Stability decision procedure. Mode-1 spectrum first (negative means
// unconstrained instability), then the constrained axisymmetric criterion
// (gate lambda1 < 0 <= lambda2 on the ZSq spectrum, then the sign of
// int h/z^2 dSigma).
StabilityReport thmbif_verdict(const ProfileCurve& curve, const FieldTable& fields,
                               const ModelParams& params);

// int f z^-2 dSigma, the admissible-variation constraint.
Scalar constraint_integral(const ProfileCurve& curve, const Eigen::ArrayXd& f);

// -int f P[f] z^-2 dSigma.
Scalar second_variation_G(const DiscreteOperator& opP, const ProfileCurve& curve,
                          const Eigen::ArrayXd& f);

// (1/2) int P[f](P + 2/z^2)[f] dSigma + ring (dn f)^2 dn_z / z.
Scalar second_variation_H(const DiscreteOperator& opP, const ProfileCurve& curve,
                          const Eigen::ArrayXd& f);

// (a/2) int P[f](P + 2/z^2)[f] dSigma + ring (a dn_z/z - b kappa_g)(dn f)^2.
Scalar second_variation_E(const DiscreteOperator& opP, const ProfileCurve& curve,
                          const Eigen::ArrayXd& f, const ModelParams& params);

CorollaryReport corollary_checks(const ProfileCurve& curve, const FieldTable& fields,
                                 const ModelParams& params);

ElResiduals el_residuals(const ProfileCurve& curve, const FieldTable& fields,
                         const ModelParams& params, Scalar alpha, Scalar beta);

ElReport el_residuals_and_alpha_beta(const ProfileCurve& curve,
                                     const FieldTable& fields,
                                     const ModelParams& params);

}  // namespace membrane

#endif  // MEMBRANE_STABILITY_HPP
