#ifndef MEMBRANE_SPECTRUM_HPP
#define MEMBRANE_SPECTRUM_HPP

#include <vector>

#include "membrane/operators.hpp"

namespace membrane {

// Weight of the Dirichlet eigenproblem for P:
//   InvZSq:  P[f] + lambda f / z^2 = 0
//   ZSq:     P[f] + lambda z^2 f = 0   (the form used by the stability gate)
enum class WeightKind { InvZSq, ZSq };

inline const char* to_string(WeightKind w) {
  return w == WeightKind::InvZSq ? "invzsq" : "zsq";
}

struct EigenPair {
  Scalar lambda = 0.0;
  Eigen::ArrayXd f;       // full-grid eigenfunction, unit weighted norm,
                          // positive at the first interior node
  Scalar residual = 0.0;  // ||P f + lambda rho f||_inf / ||f||_inf
  int sign_changes = 0;   // interior sign changes (Sturm oscillation)
};

// First k eigenpairs of the Dirichlet pencil -P f = lambda rho f, ascending.
// Eigenvalues by Sturm-sequence bisection on the symmetrized tridiagonal
// pencil, eigenvectors by inverse iteration.
std::vector<EigenPair> solve_dirichlet_spectrum(const DiscreteOperator& opP,
                                                WeightKind weight, int k);

// Number of pencil eigenvalues strictly below x.
int sturm_count_below(const DiscreteOperator& opP, WeightKind weight, Scalar x);

// (-int f P[f] z^-2 dSigma) / (int f^2 rho z^-2 dSigma) in the discrete
// volume weighting; equals lambda exactly on a discrete eigenfunction.
Scalar rayleigh_quotient(const DiscreteOperator& opP, const Eigen::ArrayXd& f,
                         WeightKind weight);

// Max-norm residual of F[f] - lambda (lambda - 2) f / (2 z^4) over the
// purely interior composite rows (eigenpair from the InvZSq weight).
Scalar fp_consistency(const DiscreteOperator& opF, const EigenPair& pair);

}  // namespace membrane

#endif  // MEMBRANE_SPECTRUM_HPP
