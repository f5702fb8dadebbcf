#include "membrane/stability.hpp"

#include <cmath>
#include <cstdio>

#include "membrane/ode45.hpp"

namespace membrane {

namespace {

// Pivoted tridiagonal solve (Thomas with row swaps, one fill-in diagonal).
Eigen::VectorXd solve_tridiag(Eigen::VectorXd dl, Eigen::VectorXd d, Eigen::VectorXd du,
                              Eigen::VectorXd x) {
  const Eigen::Index N = d.size();
  Eigen::VectorXd du2 = Eigen::VectorXd::Zero(N);
  for (Eigen::Index i = 0; i + 1 < N; ++i) {
    if (std::abs(dl[i]) > std::abs(d[i])) {
      std::swap(d[i], dl[i]);
      std::swap(du[i], d[i + 1]);
      std::swap(du2[i], du[i + 1]);
      std::swap(x[i], x[i + 1]);
    }
    if (d[i] == 0.0) throw SingularOperator("solve_tridiag: zero pivot");
    const Scalar m = dl[i] / d[i];
    d[i + 1] -= m * du[i];
    du[i + 1] -= m * du2[i];
    x[i + 1] -= m * x[i];
  }
  if (d[N - 1] == 0.0) throw SingularOperator("solve_tridiag: zero pivot");
  x[N - 1] /= d[N - 1];
  if (N >= 2) x[N - 2] = (x[N - 2] - du[N - 2] * x[N - 1]) / d[N - 2];
  for (Eigen::Index i = N - 3; i >= 0; --i)
    x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
  return x;
}

Scalar dn_boundary(const Eigen::ArrayXd& u, Scalar h) {
  const Eigen::Index n = u.size() - 1;
  return (3.0 * u[n] - 4.0 * u[n - 1] + u[n - 2]) / (2.0 * h);
}

void check_grid(const DiscreteOperator& op, const ProfileCurve& curve) {
  if (op.mat.rows() != curve.node_count())
    throw InvalidArgument("stability: operator and curve grids differ");
}

// Zero-order coefficient of P at an arbitrary parameter via dense output.
Scalar p_coeff_at(const ProfileCurve& curve, const ModelParams& params, Scalar s) {
  const CurveState st = curve.at(s);
  const Scalar km = curve.phi_rate(st);
  const Scalar kp = (st.r > 0.0) ? std::sin(st.phi) / st.r : curve.apex_slope;
  const Scalar Hc = 0.5 * (km + kp) + params.c_o;
  return km * km + kp * kp - 2.0 * Hc * Hc;
}

}  // namespace

Eigen::ArrayXd solve_h(const DiscreteOperator& opP) {
  if (opP.kind != OperatorKind::P || opP.mode != 0 ||
      opP.bc.outer != OuterBc::Dirichlet)
    throw InvalidArgument("solve_h: need P, mode 0, Dirichlet outer closure");

  // 0 must not be a ZSq eigenvalue: bracket the two eigenvalues around zero.
  {
    const int below = sturm_count_below(opP, WeightKind::ZSq, 0.0);
    std::vector<EigenPair> around =
        solve_dirichlet_spectrum(opP, WeightKind::ZSq, std::min<int>(below + 1, static_cast<int>(opP.n() - opP.lo())));
    Scalar nearest = std::numeric_limits<Scalar>::max();
    Scalar span = 0.0;
    for (const auto& p : around) {
      nearest = std::min(nearest, std::abs(p.lambda));
      span = std::max(span, std::abs(p.lambda));
    }
    if (nearest < 1e-9 * std::max(span, 1.0))
      throw SingularOperator("solve_h: 0 is a ZSq eigenvalue within tolerance");
  }

  const Eigen::Index lo = opP.lo();
  const Eigen::Index n = opP.n();
  const Eigen::Index N = n - lo;
  Eigen::VectorXd dl = Eigen::VectorXd::Zero(N), d(N), du = Eigen::VectorXd::Zero(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const Eigen::Index gi = lo + i;
    d[i] = opP.mat(gi, gi);
    if (i + 1 < N) du[i] = opP.mat(gi, gi + 1);
    if (i > 0) dl[i - 1] = opP.mat(gi, gi - 1);
  }
  const Eigen::VectorXd rhs = Eigen::VectorXd::Constant(N, -2.0);
  Eigen::VectorXd sol = solve_tridiag(dl, d, du, rhs);

  Eigen::ArrayXd h = Eigen::ArrayXd::Zero(n + 1);
  for (Eigen::Index i = 0; i < N; ++i) h[lo + i] = sol[i];

  const Eigen::ArrayXd ph = (opP.mat * h.matrix()).array();
  Scalar res = 0.0;
  for (Eigen::Index i = lo; i < n; ++i) res = std::max(res, std::abs(ph[i] + 2.0));
  if (res > 1e-8 * std::max(1.0, h.abs().maxCoeff()))
    throw ConvergenceFailure("solve_h: linear solve residual too large");
  return h;
}

PsiSolution shoot_psi(const ProfileCurve& curve, const FieldTable& fields,
                      const ModelParams& params) {
  using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
  const Scalar s_end = curve.sigma_end();
  const Scalar c0 = fields.kappa_m[0] * fields.kappa_m[0] +
                    fields.kappa_p[0] * fields.kappa_p[0] -
                    2.0 * (fields.H[0] + params.c_o) * (fields.H[0] + params.c_o);

  auto rhs = [&](Scalar s, const Vec2& y) -> Vec2 {
    const CurveState st = curve.at(s);
    const Scalar a1 = std::cos(st.phi) / st.r - 2.0 * std::sin(st.phi) / st.z;
    Vec2 dy;
    dy[0] = y[1];
    dy[1] = -a1 * y[1] - p_coeff_at(curve, params, s) * y[0];
    return dy;
  };

  const Scalar delta = std::max(1e-7, 1e-4 * s_end);
  Dopri5<2>::Options opt;
  opt.rtol = 1e-10;
  opt.atol = 1e-12;
  opt.h_max = s_end / 16.0;
  Dopri5<2> stepper(rhs, opt);
  stepper.reset_step(delta);

  Scalar t = delta;
  Vec2 y;
  y[0] = 1.0 - 0.25 * c0 * delta * delta;
  y[1] = -0.5 * c0 * delta;

  PsiSolution out;
  out.psi.resize(curve.node_count());
  for (Eigen::Index i = 0; i < curve.node_count(); ++i) {
    const Scalar target = curve.sigma[i];
    if (target <= delta) {
      out.psi[i] = 1.0 - 0.25 * c0 * target * target;
      continue;
    }
    while (t < target) {
      stepper.step(t, y, target);
      if (std::abs(y[0]) > 1e12)
        throw SingularBlowup("shoot_psi: solution blow-up");
    }
    out.psi[i] = y[0];
  }
  out.psi_boundary = y[0];
  out.dn_psi_boundary = y[1];
  return out;
}

Scalar constraint_integral(const ProfileCurve& curve, const Eigen::ArrayXd& f) {
  return surface_integral(curve, f / curve.z.square(), 0);
}

Scalar second_variation_G(const DiscreteOperator& opP, const ProfileCurve& curve,
                          const Eigen::ArrayXd& f) {
  check_grid(opP, curve);
  const Eigen::ArrayXd pf = (opP.mat * f.matrix()).array();
  return -surface_integral(curve, f * pf / curve.z.square(), 0);
}

Scalar second_variation_H(const DiscreteOperator& opP, const ProfileCurve& curve,
                          const Eigen::ArrayXd& f) {
  check_grid(opP, curve);
  const Eigen::Index n = curve.node_count() - 1;
  if (std::abs(f[n]) > 1e-10 * std::max(1.0, f.abs().maxCoeff()))
    std::fprintf(stderr, "second_variation_H: probe does not vanish at the boundary\n");
  const Eigen::ArrayXd pf = (opP.mat * f.matrix()).array();
  const Eigen::ArrayXd pf2 = pf + 2.0 * f / curve.z.square();
  const Scalar area = 0.5 * surface_integral(curve, pf * pf2, 0);
  const Scalar h = curve.sigma[1] - curve.sigma[0];
  const Scalar dnf = dn_boundary(f, h);
  const Scalar ring = 2.0 * M_PI * curve.r[n] * dnf * dnf *
                      std::sin(curve.phi[n]) / curve.z[n];
  return area + ring;
}

Scalar second_variation_E(const DiscreteOperator& opP, const ProfileCurve& curve,
                          const Eigen::ArrayXd& f, const ModelParams& params) {
  check_grid(opP, curve);
  const Eigen::Index n = curve.node_count() - 1;
  const Eigen::ArrayXd pf = (opP.mat * f.matrix()).array();
  const Eigen::ArrayXd pf2 = pf + 2.0 * f / curve.z.square();
  const Scalar area = 0.5 * params.a * surface_integral(curve, pf * pf2, 0);
  const Scalar h = curve.sigma[1] - curve.sigma[0];
  const Scalar dnf = dn_boundary(f, h);
  const Scalar kappa_g = -std::cos(curve.phi[n]) / curve.r[n];
  const Scalar ring = 2.0 * M_PI * curve.r[n] * dnf * dnf *
                      (params.a * std::sin(curve.phi[n]) / curve.z[n] -
                       params.b * kappa_g);
  return area + ring;
}

ElResiduals el_residuals(const ProfileCurve& curve, const FieldTable& fields,
                         const ModelParams& params, Scalar alpha, Scalar beta) {
  const Eigen::Index n = curve.node_count() - 1;
  const BoundaryData bd = boundary_darboux(curve, fields);
  const Scalar coeff = alpha / (bd.r_o * bd.r_o) - beta;
  const Scalar hc = fields.H[n] + params.c_o;
  ElResiduals res;
  res.el2 = params.a * hc + params.b * bd.kappa_n;
  res.el3 = coeff * bd.kappa_n - params.a * bd.dn_H;  // tau_g' = 0 on parallels
  res.el4 = coeff * bd.kappa_g + params.a * hc * hc + params.b * fields.K[n];
  return res;
}

ElReport el_residuals_and_alpha_beta(const ProfileCurve& curve,
                                     const FieldTable& fields,
                                     const ModelParams& params) {
  const BoundaryData bd = boundary_darboux(curve, fields);
  ElReport rep;
  rep.at_params = el_residuals(curve, fields, params, params.alpha, params.beta);
  rep.admissibility_c = params.a * (1.0 - 2.0 * params.c_o * bd.r_o) / bd.z_o;
  for (int k = 1; k <= 3; ++k) {
    AlphaBetaSample s;
    s.beta = std::max(rep.admissibility_c, 0.0) + k - rep.admissibility_c;
    s.alpha = bd.r_o * bd.r_o * (s.beta + rep.admissibility_c);
    s.res = el_residuals(curve, fields, params, s.alpha, s.beta);
    rep.admissible.push_back(s);
  }
  return rep;
}

CorollaryReport corollary_checks(const ProfileCurve& curve, const FieldTable& fields,
                                 const ModelParams& params) {
  const Eigen::Index n = curve.node_count() - 1;
  const BoundaryData bd = boundary_darboux(curve, fields);
  CorollaryReport rep;

  // Instability of b = 0 critical discs above a positive boundary plane.
  if (!(params.c_o > 0.0))
    rep.cor_reason = "requires c_o > 0";
  else if (params.b != 0.0)
    rep.cor_reason = "requires b = 0";
  else if (!(bd.z_o > 0.0) || curve.z.minCoeff() < bd.z_o - 1e-8 * std::abs(bd.z_o))
    rep.cor_reason = "surface not contained in z >= z_o > 0";
  else if (std::abs(fields.nu3[n]) > 1e-6)
    rep.cor_reason = "nu3 does not vanish on the boundary";
  else {
    rep.cor_applicable = true;
    rep.cor_value = 2.0 * M_PI * bd.r_o * params.a * (bd.dn_z / bd.z_o) *
                    bd.dn_nu3 * bd.dn_nu3;
    rep.cor_verdict = rep.cor_value < 0.0 ? Verdict::Unstable : Verdict::Inapplicable;
  }

  // Geometric sign condition (alpha/r_o^2 - beta) K < 0 at the boundary.
  if (params.b != 0.0)
    rep.cor2_reason = "requires b = 0";
  else {
    rep.cor2_applicable = true;
    rep.cor2_sign =
        (params.alpha / (bd.r_o * bd.r_o) - params.beta) * fields.K[n];
    rep.cor2_verdict =
        rep.cor2_sign < 0.0 ? Verdict::Unstable : Verdict::Inapplicable;
    if (rep.cor2_verdict == Verdict::Inapplicable)
      rep.cor2_reason = "sign condition not met";
  }
  return rep;
}

StabilityReport thmbif_verdict(const ProfileCurve& curve, const FieldTable& fields,
                               const ModelParams& params) {
  const DiscreteOperator opP =
      assemble(curve, fields, params, OperatorKind::P, 0,
               BcPair{ApexBc::Regular, OuterBc::Dirichlet});

  StabilityReport rep;
  const auto pairs = solve_dirichlet_spectrum(opP, WeightKind::ZSq, 2);
  rep.lambda1 = pairs[0].lambda;
  rep.lambda2 = pairs[1].lambda;

  const PsiSolution psi = shoot_psi(curve, fields, params);
  rep.psi_boundary = psi.psi_boundary;
  rep.dn_psi_boundary = psi.dn_psi_boundary;

  // Mode-1 variations are admissible without any compensation (their angular
  // average vanishes), so a negative mode-1 eigenvalue decides instability
  // outright. Eigenvalues increase with the Fourier index m (the pencils
  // differ by +m^2/r^2), so m = 1 bounds all m >= 1. The margin absorbs the
  // O(h^2) discretization error of an exact zero crossing, which occurs
  // precisely at the horizontal-tangent rim.
  {
    const DiscreteOperator opP1 =
        assemble(curve, fields, params, OperatorKind::P, 1,
                 BcPair{ApexBc::Vanishing, OuterBc::Dirichlet});
    rep.lambda1_m1 = solve_dirichlet_spectrum(opP1, WeightKind::ZSq, 1)[0].lambda;
  }
  const Scalar m1_margin = 1e-2 * std::max(1.0, std::abs(rep.lambda1));

  if (rep.lambda1_m1 < -m1_margin) {
    rep.verdict = Verdict::Unstable;
    rep.reason = "mode-1 negative";
  } else if (rep.lambda1 >= 0.0) {
    rep.verdict = Verdict::StableUnconstrained;
    rep.reason = "lambda1 >= 0";
  } else if (rep.lambda2 < 0.0) {
    rep.verdict = Verdict::UnstableTwoNegative;
    rep.reason = "lambda2 < 0";
  } else {
    try {
      rep.h = solve_h(opP);
      rep.h_solved = true;
      rep.h_integral = constraint_integral(curve, rep.h);
      if (rep.h_integral <= 0.0) {
        rep.verdict = Verdict::Stable;
        rep.reason = "h-integral nonpositive";
      } else {
        rep.verdict = Verdict::Unstable;
        rep.reason = "h-integral positive";
      }
    } catch (const SingularOperator&) {
      rep.verdict = Verdict::Unstable;
      rep.reason = "no-solution-P-2";
    }
  }

  // quadratic-form audit trail
  {
    QuadFormSample s;
    s.id = "f1-zsq";
    const Eigen::ArrayXd& f1 = pairs[0].f;
    s.d2G = second_variation_G(opP, curve, f1);
    s.d2H = second_variation_H(opP, curve, f1);
    s.d2E = second_variation_E(opP, curve, f1, params);
    rep.quadratic_form_samples.push_back(std::move(s));
  }
  if (rep.h_solved) {
    QuadFormSample s;
    s.id = "h";
    s.d2G = second_variation_G(opP, curve, rep.h);
    s.d2H = second_variation_H(opP, curve, rep.h);
    s.d2E = second_variation_E(opP, curve, rep.h, params);
    rep.quadratic_form_samples.push_back(std::move(s));
    // Balancing combination mu f1 + h with vanishing constraint integral:
    // the witness direction of the criterion (destabilizing when the
    // h-integral is positive).
    const Scalar denom = constraint_integral(curve, pairs[0].f);
    if (denom != 0.0) {
      const Scalar mu = -rep.h_integral / denom;
      const Eigen::ArrayXd g = mu * pairs[0].f + rep.h;
      QuadFormSample t;
      t.id = "mu-f1-plus-h";
      t.d2G = second_variation_G(opP, curve, g);
      t.d2H = second_variation_H(opP, curve, g);
      t.d2E = second_variation_E(opP, curve, g, params);
      rep.quadratic_form_samples.push_back(std::move(t));
    }
  }

  rep.el = el_residuals_and_alpha_beta(curve, fields, params);
  return rep;
}

}  // namespace membrane
