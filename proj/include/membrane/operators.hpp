#ifndef MEMBRANE_OPERATORS_HPP
#define MEMBRANE_OPERATORS_HPP

#include <Eigen/Dense>

#include "membrane/fields.hpp"
#include "membrane/profile.hpp"

namespace membrane {

enum class OperatorKind { L, CalL, P, Pstar, F };

enum class ApexBc {
  Regular,    // f'(0) = 0, symmetric limit of the axis terms (mode 0)
  Vanishing,  // f(0) = 0 (modes m >= 1)
};

enum class OuterBc { Dirichlet, Free };

struct BcPair {
  ApexBc apex = ApexBc::Regular;
  OuterBc outer = OuterBc::Dirichlet;
};

// Finite-difference representation of one of L, calL, P, P*, F for a fixed
// Fourier mode on a uniform sigma-grid.
//
// The matrix acts on full-grid vectors f(0..n). Interior rows of L, calL and
// P are assembled in divergence (flux) form on half-grid points, so the
// matrix is exactly symmetric under the stored volume weighting: P in the
// r z^-2 dsigma weighting, L and calL in r dsigma. The outer row is always a
// one-sided second-order closure; OuterBc::Dirichlet only marks which block
// solvers operate on.
struct DiscreteOperator {
  Eigen::MatrixXd mat;
  Eigen::ArrayXd sa_weight;  // volume weights making the interior block symmetric
  OperatorKind kind = OperatorKind::P;
  int mode = 0;
  BcPair bc;
  Scalar h = 0.0;  // grid spacing

  // grid data carried along for eigen-solves and quadratures
  Eigen::ArrayXd sigma, r_nodes, z_nodes;

  Eigen::Index n() const { return mat.rows() - 1; }
  Eigen::Index lo() const { return mode == 0 ? 0 : 1; }  // first Dirichlet unknown
};

// Assemble L, calL, P or P* for the given Fourier mode. The curve must be
// uniformly resampled (it carries the dense output used for half-grid
// weights).
DiscreteOperator assemble(const ProfileCurve& curve, const FieldTable& fields,
                          const ModelParams& params, OperatorKind which, int mode,
                          BcPair bc);

// Matrix-vector product on a full-grid vector.
Eigen::ArrayXd apply(const DiscreteOperator& op, const Eigen::ArrayXd& f);

// Fourth-order composition F = (P* + 2/z^2) P / 2, with the inner P applied
// through its one-sided outer closure so Dirichlet data feeds the outer
// operator.
DiscreteOperator assemble_F(const ProfileCurve& curve, const FieldTable& fields,
                            const ModelParams& params, int mode);

// Max-norm residuals of the operator identities, each O(h^2):
//   easy_p:      (P + 2/z^2)[f] - z calL[f/z]
//   easy_pstar:  (P* + 2/z^2)[f] - (1/z) calL[z f]
//   pp_star:     P*[f/z^2] - z^-2 P[f]
//   adjoint:     integral adjoint relation for non-vanishing probes
//   p_nu3:       P[nu3] + 2 nu3 / z^2
//   p_q:         P[q] - 2 c_o
//   f_nu3:       F[nu3], over the purely interior composite rows
struct IdentityReport {
  Scalar easy_p = 0.0;
  Scalar easy_pstar = 0.0;
  Scalar pp_star = 0.0;
  Scalar adjoint = 0.0;
  Scalar p_nu3 = 0.0;
  Scalar p_q = 0.0;
  Scalar f_nu3 = 0.0;
};

// Smooth mode-0 probe functions evaluated on the grid; defaults are
// apex-regular polynomials that do not vanish at the outer boundary.
struct IdentityProbes {
  Eigen::ArrayXd f;
  Eigen::ArrayXd g;
};

IdentityProbes default_probes(const ProfileCurve& curve);

// Max-norm residual of F[nu3] over the purely interior composite rows,
// evaluated in extended precision off the dense output (the h^-4 stencil
// would otherwise amplify double rounding above the truncation error).
Scalar f_nu3_residual(const ProfileCurve& curve, const ModelParams& params);

IdentityReport identity_suite(const ProfileCurve& curve, const FieldTable& fields,
                              const ModelParams& params);
IdentityReport identity_suite(const ProfileCurve& curve, const FieldTable& fields,
                              const ModelParams& params, const IdentityProbes& probes);

}  // namespace membrane

#endif  // MEMBRANE_OPERATORS_HPP
