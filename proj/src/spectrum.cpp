#include "membrane/spectrum.hpp"

#include <cmath>
#include <limits>

namespace membrane {

namespace {

// Symmetrized standard-form tridiagonal C = B^{-1/2} (-D A) B^{-1/2} of the
// Dirichlet pencil, plus the scaling back to grid values.
struct TriPencil {
  Eigen::VectorXd d;       // diagonal of C
  Eigen::VectorXd e;       // superdiagonal of C
  Eigen::ArrayXd b_sqrt;   // sqrt(B_i), f_grid = v / b_sqrt
  Eigen::Index lo = 0;
};

Eigen::ArrayXd weight_values(const DiscreteOperator& op, WeightKind w) {
  if (w == WeightKind::InvZSq) return op.z_nodes.square().inverse();
  return op.z_nodes.square();
}

TriPencil build_pencil(const DiscreteOperator& opP, WeightKind weight) {
  if (opP.kind != OperatorKind::P)
    throw InvalidArgument("spectrum: pencil requires the operator P");
  const Eigen::Index lo = opP.lo();
  const Eigen::Index n = opP.n();
  const Eigen::Index N = n - lo;
  if (N < 3) throw InvalidArgument("spectrum: grid too coarse");

  const Eigen::ArrayXd rho = weight_values(opP, weight);

  TriPencil p;
  p.lo = lo;
  p.d.resize(N);
  p.e.resize(N - 1);
  p.b_sqrt.resize(N);

  for (Eigen::Index i = 0; i < N; ++i) {
    const Eigen::Index gi = lo + i;
    const Scalar D = opP.sa_weight[gi];
    const Scalar B = D * rho[gi];
    if (!(B > 0.0) || !std::isfinite(B))
      throw DegenerateWeight("spectrum: weight lost positivity");
    p.b_sqrt[i] = std::sqrt(B);
    p.d[i] = -D * opP.mat(gi, gi) / B;
  }
  for (Eigen::Index i = 0; i + 1 < N; ++i) {
    const Eigen::Index gi = lo + i;
    const Scalar m_upper = -opP.sa_weight[gi] * opP.mat(gi, gi + 1);
    const Scalar m_lower = -opP.sa_weight[gi + 1] * opP.mat(gi + 1, gi);
    if (std::abs(m_upper - m_lower) >
        1e-8 * (std::abs(m_upper) + std::abs(m_lower) + 1.0))
      throw NumericalError("spectrum: weighted operator lost symmetry");
    p.e[i] = m_upper / (p.b_sqrt[i] * p.b_sqrt[i + 1]);
  }
  return p;
}

// Number of eigenvalues of C strictly below x (LDL^T inertia count).
int count_below(const TriPencil& p, Scalar x) {
  const Eigen::Index N = p.d.size();
  int count = 0;
  Scalar q = p.d[0] - x;
  if (q < 0.0) ++count;
  for (Eigen::Index i = 1; i < N; ++i) {
    Scalar denom = q;
    if (denom == 0.0) denom = 1e-300;
    q = p.d[i] - x - p.e[i - 1] * p.e[i - 1] / denom;
    if (q < 0.0) ++count;
  }
  return count;
}

std::pair<Scalar, Scalar> gershgorin_bounds(const TriPencil& p) {
  const Eigen::Index N = p.d.size();
  Scalar lo = std::numeric_limits<Scalar>::max();
  Scalar hi = std::numeric_limits<Scalar>::lowest();
  for (Eigen::Index i = 0; i < N; ++i) {
    Scalar rad = 0.0;
    if (i > 0) rad += std::abs(p.e[i - 1]);
    if (i + 1 < N) rad += std::abs(p.e[i]);
    lo = std::min(lo, p.d[i] - rad);
    hi = std::max(hi, p.d[i] + rad);
  }
  return {lo, hi};
}

// j-th (0-based) eigenvalue by bisection on the inertia count.
Scalar bisect_eigenvalue(const TriPencil& p, int j, Scalar lo, Scalar hi) {
  const Scalar scale = std::max(std::abs(lo), std::abs(hi));
  for (int it = 0; it < 200; ++it) {
    const Scalar mid = 0.5 * (lo + hi);
    if (count_below(p, mid) <= j)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-15 * scale + 1e-300) break;
  }
  return 0.5 * (lo + hi);
}

// (C - mu I) x = rhs via LU with partial pivoting (one extra superdiagonal).
bool solve_shifted(const TriPencil& p, Scalar mu, Eigen::VectorXd& x) {
  const Eigen::Index N = p.d.size();
  Eigen::VectorXd a(N), b(N), c(N);  // diag, super, super2 after elimination
  for (Eigen::Index i = 0; i < N; ++i) {
    a[i] = p.d[i] - mu;
    b[i] = (i + 1 < N) ? p.e[i] : 0.0;
    c[i] = 0.0;
  }
  Eigen::VectorXd sub(N);  // subdiagonal (symmetric)
  for (Eigen::Index i = 0; i + 1 < N; ++i) sub[i] = p.e[i];

  for (Eigen::Index i = 0; i + 1 < N; ++i) {
    Scalar pivot = a[i];
    Scalar low = sub[i];
    if (std::abs(low) > std::abs(pivot)) {
      std::swap(a[i], sub[i]);
      std::swap(b[i], a[i + 1]);
      std::swap(c[i], b[i + 1]);
      std::swap(x[i], x[i + 1]);
      pivot = a[i];
      low = sub[i];
    }
    if (pivot == 0.0) return false;
    const Scalar m = low / pivot;
    a[i + 1] -= m * b[i];
    b[i + 1] -= m * c[i];
    x[i + 1] -= m * x[i];
  }
  if (a[N - 1] == 0.0) return false;
  x[N - 1] /= a[N - 1];
  if (N >= 2) x[N - 2] = (x[N - 2] - b[N - 2] * x[N - 1]) / a[N - 2];
  for (Eigen::Index i = N - 3; i >= 0; --i)
    x[i] = (x[i] - b[i] * x[i + 1] - c[i] * x[i + 2]) / a[i];
  return true;
}

Eigen::VectorXd tri_mul(const TriPencil& p, const Eigen::VectorXd& v) {
  const Eigen::Index N = p.d.size();
  Eigen::VectorXd out(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    Scalar s = p.d[i] * v[i];
    if (i > 0) s += p.e[i - 1] * v[i - 1];
    if (i + 1 < N) s += p.e[i] * v[i + 1];
    out[i] = s;
  }
  return out;
}

}  // namespace

int sturm_count_below(const DiscreteOperator& opP, WeightKind weight, Scalar x) {
  return count_below(build_pencil(opP, weight), x);
}

std::vector<EigenPair> solve_dirichlet_spectrum(const DiscreteOperator& opP,
                                                WeightKind weight, int k) {
  if (k < 1) throw InvalidArgument("solve_dirichlet_spectrum: k must be positive");
  if (opP.bc.outer != OuterBc::Dirichlet)
    throw InvalidArgument("solve_dirichlet_spectrum: operator needs the Dirichlet closure");
  const TriPencil p = build_pencil(opP, weight);
  const Eigen::Index N = p.d.size();
  if (k > N) throw InvalidArgument("solve_dirichlet_spectrum: k exceeds pencil size");

  const auto [glo, ghi] = gershgorin_bounds(p);
  const Scalar scale = std::max(std::abs(glo), std::abs(ghi));
  const Eigen::ArrayXd rho = weight_values(opP, weight);

  std::vector<EigenPair> pairs;
  pairs.reserve(k);
  for (int j = 0; j < k; ++j) {
    const Scalar lambda = bisect_eigenvalue(p, j, glo, ghi);

    // Inverse iteration at a slightly detuned shift.
    Eigen::VectorXd v(N);
    unsigned state = 0x9e3779b9u + 77u * static_cast<unsigned>(j);
    for (Eigen::Index i = 0; i < N; ++i) {
      state = state * 1664525u + 1013904223u;
      v[i] = static_cast<Scalar>(state) / 4294967296.0 - 0.5;
    }
    v.normalize();
    const Scalar shift = lambda + 1e-12 * scale;
    bool ok = false;
    for (int it = 0; it < 6; ++it) {
      Eigen::VectorXd x = v;
      if (!solve_shifted(p, shift, x)) {
        v = Eigen::VectorXd::Ones(N).normalized();
        continue;
      }
      const Scalar growth = x.norm();
      v = x / growth;
      if (growth > 1.0 / (1e-10 * std::max(scale, 1.0))) {
        ok = true;
        break;
      }
    }
    // Rayleigh-quotient polish: the bisection shift leaves an eigenvector
    // contamination of order (shift error)/(spectral gap), which fourth-order
    // compositions later amplify by h^-2. A couple of RQI steps push the
    // residual to the rounding floor.
    Scalar lambda_r = v.dot(tri_mul(p, v));
    for (int it = 0; it < 3; ++it) {
      Eigen::VectorXd x = v;
      if (!solve_shifted(p, lambda_r, x)) break;  // exactly converged shift
      const Scalar growth = x.norm();
      if (!std::isfinite(growth) || growth == 0.0) break;
      v = x / growth;
      lambda_r = v.dot(tri_mul(p, v));
    }
    if (!ok && (tri_mul(p, v) - lambda_r * v).norm() > 1e-6 * std::max(scale, 1.0))
      throw ConvergenceFailure("solve_dirichlet_spectrum: inverse iteration stalled");

    EigenPair pair;
    pair.lambda = lambda_r;
    pair.f = Eigen::ArrayXd::Zero(opP.n() + 1);
    for (Eigen::Index i = 0; i < N; ++i) pair.f[p.lo + i] = v[i] / p.b_sqrt[i];

    // sign convention: positive at the first interior node
    Scalar lead = pair.f[p.lo];
    if (lead == 0.0) lead = pair.f.abs().maxCoeff() > 0 ? pair.f[p.lo + 1] : 1.0;
    if (lead < 0.0) pair.f = -pair.f;

    // residual of the unsymmetrized problem P f + lambda rho f = 0
    const Eigen::ArrayXd pf = (opP.mat * pair.f.matrix()).array();
    Scalar res = 0.0;
    for (Eigen::Index i = p.lo; i < opP.n(); ++i)
      res = std::max(res, std::abs(pf[i] + pair.lambda * rho[i] * pair.f[i]));
    pair.residual = res / pair.f.abs().maxCoeff();

    for (Eigen::Index i = p.lo; i + 1 < opP.n(); ++i)
      if (pair.f[i] * pair.f[i + 1] < 0.0) ++pair.sign_changes;

    pairs.push_back(std::move(pair));
  }
  return pairs;
}

Scalar rayleigh_quotient(const DiscreteOperator& opP, const Eigen::ArrayXd& f,
                         WeightKind weight) {
  if (f.size() != opP.mat.rows())
    throw InvalidArgument("rayleigh_quotient: vector does not match the grid");
  const Eigen::ArrayXd pf = (opP.mat * f.matrix()).array();
  const Eigen::ArrayXd rho = weight_values(opP, weight);
  Scalar num = 0.0, den = 0.0;
  for (Eigen::Index i = opP.lo(); i < opP.n(); ++i) {
    num -= opP.sa_weight[i] * f[i] * pf[i];
    den += opP.sa_weight[i] * rho[i] * f[i] * f[i];
  }
  if (den == 0.0) throw InvalidArgument("rayleigh_quotient: zero weighted norm");
  return num / den;
}

Scalar fp_consistency(const DiscreteOperator& opF, const EigenPair& pair) {
  if (opF.kind != OperatorKind::F)
    throw InvalidArgument("fp_consistency: operator must be F");
  const Eigen::ArrayXd Ff = (opF.mat * pair.f.matrix()).array();
  const Scalar coeff = 0.5 * pair.lambda * (pair.lambda - 2.0);
  Scalar res = 0.0;
  // Composite rows touching the apex/outer closures of the inner P mix
  // stencil families; only purely interior rows are pointwise consistent.
  for (Eigen::Index i = opF.lo() + 2; i <= opF.n() - 2; ++i) {
    const Scalar z = opF.z_nodes[i];
    res = std::max(res, std::abs(Ff[i] - coeff * pair.f[i] / (z * z * z * z)));
  }
  return res;
}

}  // namespace membrane
