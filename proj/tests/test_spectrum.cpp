#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "membrane/spectrum.hpp"
#include "oracles.hpp"

using namespace membrane;

namespace {

ProfileCurve fig1_curve(int n) {
  ModelParams p(2.0, 1.0, 0.0, 1.0, 1.0);
  return resample(
      integrate_profile(p, ApexInit(3.0), StopRule(StopKind::RPrimeZero, 4.0)), n);
}

DiscreteOperator disc_P(double R, double co, int n) {
  ModelParams p(co, 1.0, 0.0, 1.0, 1.0);
  ProfileCurve d = make_flat_disc(p, R, n);
  return assemble(d, geometric_fields(d), p, OperatorKind::P, 0, BcPair{});
}

// Dense generalized eigenvalues of the weighted Dirichlet pencil
// -P f = lambda rho f, via Eigen, as an independent cross-check of the
// Sturm-bisection path.
Eigen::VectorXd dense_pencil_eigs(const DiscreteOperator& op, WeightKind w) {
  const Eigen::Index lo = op.lo(), m = op.n() - lo;
  Eigen::MatrixXd A(m, m), B = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j)
      A(i, j) = -op.sa_weight[lo + i] * op.mat(lo + i, lo + j);
    const double z = op.z_nodes[lo + i];
    const double rho = (w == WeightKind::InvZSq) ? 1.0 / (z * z) : z * z;
    B(i, i) = op.sa_weight[lo + i] * rho;
  }
  A = 0.5 * (A + A.transpose()).eval();  // symmetric up to roundoff
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B,
                                                               Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace

TEST_CASE("flat disc: first eigenvalue against the Bessel closed form") {
  const double R = 0.3, co = 2.0;
  DiscreteOperator op = disc_P(R, co, 512);
  SUBCASE("weight 1/z^2") {
    auto pairs = solve_dirichlet_spectrum(op, WeightKind::InvZSq, 2);
    REQUIRE(pairs.size() == 2);
    const double exact = oracles::disc_lambda1_invzsq(co, R);
    CHECK(std::abs(pairs[0].lambda - exact) < 5e-4 * exact);
    CHECK(pairs[0].sign_changes == 0);
    CHECK(pairs[1].sign_changes == 1);
    CHECK(pairs[0].lambda < pairs[1].lambda);
  }
  SUBCASE("weight z^2") {
    auto pairs = solve_dirichlet_spectrum(op, WeightKind::ZSq, 1);
    const double exact = oracles::disc_lambda1_zsq(co, R);
    CHECK(std::abs(pairs[0].lambda - exact) < 5e-4 * exact);
  }
}

TEST_CASE("the first J0 zero used by the oracles re-derives") {
  CHECK(std::abs(oracles::first_j0_zero() - oracles::kJ01) < 1e-13);
  CHECK(std::abs(oracles::bessel_j0(oracles::kJ01)) < 1e-14);
}

TEST_CASE("Sturm bisection agrees with a dense generalized eigensolver") {
  ProfileCurve c = fig1_curve(300);
  FieldTable f = geometric_fields(c);
  DiscreteOperator op = assemble(c, f, c.params, OperatorKind::P, 0, BcPair{});
  for (WeightKind w : {WeightKind::ZSq, WeightKind::InvZSq}) {
    const Eigen::VectorXd ref = dense_pencil_eigs(op, w);
    auto pairs = solve_dirichlet_spectrum(op, w, 4);
    for (int k = 0; k < 4; ++k)
      CHECK(std::abs(pairs[k].lambda - ref[k]) <
            1e-8 * std::max(1.0, std::abs(ref[k])));
  }
}

TEST_CASE("eigenpair residuals verified outside the solver") {
  ProfileCurve c = fig1_curve(300);
  FieldTable f = geometric_fields(c);
  DiscreteOperator op = assemble(c, f, c.params, OperatorKind::P, 0, BcPair{});
  auto pairs = solve_dirichlet_spectrum(op, WeightKind::ZSq, 3);
  for (const auto& pr : pairs) {
    CHECK(std::abs(pr.f[op.n()]) < 1e-14);  // Dirichlet endpoint
    const Eigen::ArrayXd Pf = apply(op, pr.f);
    double worst = 0.0;
    for (Eigen::Index i = op.lo(); i < op.n(); ++i)
      worst = std::max(worst,
                       std::abs(Pf[i] + pr.lambda * c.z[i] * c.z[i] * pr.f[i]));
    CHECK(worst < 1e-6 * pr.f.abs().maxCoeff() * std::max(1.0, std::abs(pr.lambda)));
    CHECK(pr.f[op.lo() == 0 ? 0 : 1] >= 0.0);  // sign normalization
  }
}

TEST_CASE("sturm_count_below brackets the computed eigenvalues") {
  DiscreteOperator op = disc_P(0.3, 2.0, 256);
  auto pairs = solve_dirichlet_spectrum(op, WeightKind::InvZSq, 3);
  const double l1 = pairs[0].lambda, l2 = pairs[1].lambda, l3 = pairs[2].lambda;
  CHECK(sturm_count_below(op, WeightKind::InvZSq, l1 - 1e-6) == 0);
  CHECK(sturm_count_below(op, WeightKind::InvZSq, 0.5 * (l1 + l2)) == 1);
  CHECK(sturm_count_below(op, WeightKind::InvZSq, 0.5 * (l2 + l3)) == 2);
  CHECK(sturm_count_below(op, WeightKind::InvZSq, l3 + 1e-6) == 3);
}

TEST_CASE("Rayleigh quotient reproduces the eigenvalue") {
  DiscreteOperator op = disc_P(0.3, 2.0, 256);
  auto pairs = solve_dirichlet_spectrum(op, WeightKind::ZSq, 2);
  for (const auto& pr : pairs)
    CHECK(rayleigh_quotient(op, pr.f, WeightKind::ZSq) ==
          doctest::Approx(pr.lambda).epsilon(1e-9));
}

TEST_CASE("lambda = 2 with eigenfunction nu3 on the geodesic-rim solution") {
  // nu3 vanishes at the rim of an r'-zero domain and satisfies
  // P[nu3] = -2 nu3/z^2, so 2 is a Dirichlet eigenvalue in the 1/z^2 weight.
  ProfileCurve c = fig1_curve(512);
  FieldTable f = geometric_fields(c);
  DiscreteOperator op = assemble(c, f, c.params, OperatorKind::P, 0, BcPair{});
  auto pairs = solve_dirichlet_spectrum(op, WeightKind::InvZSq, 1);
  CHECK(std::abs(pairs[0].lambda - 2.0) < 1e-3);
  Eigen::ArrayXd ef = pairs[0].f / pairs[0].f.maxCoeff();
  Eigen::ArrayXd ref = f.nu3 / f.nu3.maxCoeff();
  CHECK((ef - ref).abs().maxCoeff() < 1e-3);
}

TEST_CASE("F-P spectral consistency") {
  const double R = 0.3, co = 2.0;
  ModelParams p(co, 1.0, 0.0, 1.0, 1.0);
  SUBCASE("discrete identity: residual at the solver floor") {
    // On the flat disc the flux and non-divergence Laplacians coincide
    // algebraically, so F f = lambda(lambda-2) f / (2 z^4) holds exactly for
    // the discrete eigenpair; fp_consistency only sees solver roundoff.
    ProfileCurve d = make_flat_disc(p, R, 128);
    FieldTable f = geometric_fields(d);
    DiscreteOperator opP = assemble(d, f, p, OperatorKind::P, 0, BcPair{});
    DiscreteOperator opF = assemble_F(d, f, p, 0);
    auto pairs = solve_dirichlet_spectrum(opP, WeightKind::InvZSq, 1);
    CHECK(fp_consistency(opF, pairs[0]) < 1e-2);
  }
  SUBCASE("continuum relation: residual decays at second order") {
    // Against the Bessel eigenvalue the residual measures the O(h^2)
    // convergence of the discrete spectrum toward the continuum relation.
    double res[2];
    int idx = 0;
    for (int n : {64, 128}) {
      ProfileCurve d = make_flat_disc(p, R, n);
      FieldTable f = geometric_fields(d);
      DiscreteOperator opP = assemble(d, f, p, OperatorKind::P, 0, BcPair{});
      DiscreteOperator opF = assemble_F(d, f, p, 0);
      auto pairs = solve_dirichlet_spectrum(opP, WeightKind::InvZSq, 1);
      const double lam = oracles::disc_lambda_invzsq(co, R, 1);
      const double coeff = 0.5 * lam * (lam - 2.0);
      const Eigen::ArrayXd Ff = apply(opF, pairs[0].f);
      double worst = 0.0;
      for (Eigen::Index i = opF.lo() + 2; i <= opF.n() - 2; ++i) {
        const double z4 = std::pow(d.z[i], 4);
        worst = std::max(worst, std::abs(Ff[i] - coeff * pairs[0].f[i] / z4));
      }
      res[idx++] = worst;
    }
    CHECK(res[1] < res[0]);
    const double ratio = res[0] / res[1];
    CHECK(ratio > 2.5);
    CHECK(ratio < 6.5);
  }
}
