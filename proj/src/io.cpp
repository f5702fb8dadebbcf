#include "membrane/io.hpp"

#include <cstdio>
#include <fstream>

namespace membrane {

namespace {

std::string fmt(Scalar x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("io: cannot open " + path + " for writing");
  return out;
}

}  // namespace

void write_profile_csv(const std::string& path, const ProfileCurve& curve) {
  std::ofstream out = open_out(path);
  out << "sigma,r,z,phi\n";
  for (Eigen::Index i = 0; i < curve.node_count(); ++i)
    out << fmt(curve.sigma[i]) << ',' << fmt(curve.r[i]) << ','
        << fmt(curve.z[i]) << ',' << fmt(curve.phi[i]) << '\n';
}

void write_fields_csv(const std::string& path, const ProfileCurve& curve,
                      const FieldTable& fields, const ModelParams& params) {
  std::ofstream out = open_out(path);
  out << "sigma,r,z,phi,H,K,nu3,q,rme_residual\n";
  for (Eigen::Index i = 0; i < curve.node_count(); ++i) {
    const Scalar res = fields.H[i] + params.c_o + fields.nu3[i] / curve.z[i];
    out << fmt(curve.sigma[i]) << ',' << fmt(curve.r[i]) << ','
        << fmt(curve.z[i]) << ',' << fmt(curve.phi[i]) << ','
        << fmt(fields.H[i]) << ',' << fmt(fields.K[i]) << ','
        << fmt(fields.nu3[i]) << ',' << fmt(fields.q[i]) << ','
        << fmt(res) << '\n';
  }
}

void write_operator_coo(const std::string& path, const DiscreteOperator& op) {
  std::ofstream out = open_out(path);
  for (Eigen::Index i = 0; i < op.mat.rows(); ++i)
    for (Eigen::Index j = 0; j < op.mat.cols(); ++j)
      if (op.mat(i, j) != 0.0)
        out << i << ' ' << j << ' ' << fmt(op.mat(i, j)) << '\n';
}

nlohmann::json to_json(const ModelParams& params) {
  return {{"c_o", params.c_o}, {"a", params.a},     {"b", params.b},
          {"alpha", params.alpha}, {"beta", params.beta}};
}

nlohmann::json to_json(const BoundaryData& bd) {
  return {{"r_o", bd.r_o},         {"z_o", bd.z_o},     {"kappa", bd.kappa},
          {"kappa_n", bd.kappa_n}, {"kappa_g", bd.kappa_g},
          {"tau_g", bd.tau_g},     {"dn_z", bd.dn_z},   {"dn_H", bd.dn_H},
          {"dn_nu3", bd.dn_nu3}};
}

nlohmann::json to_json(const EnergyRecord& rec) {
  return {{"helfrich", rec.helfrich},
          {"gauss_term", rec.gauss_term},
          {"hyperbolic_area", rec.hyperbolic_area},
          {"potential", rec.potential},
          {"G", rec.G},
          {"boundary_elastic", rec.boundary_elastic},
          {"euler_helfrich", rec.euler_helfrich}};
}

nlohmann::json to_json(const IdentityReport& rep) {
  return {{"easy_p", rep.easy_p},   {"easy_pstar", rep.easy_pstar},
          {"pp_star", rep.pp_star}, {"adjoint", rep.adjoint},
          {"p_nu3", rep.p_nu3},     {"p_q", rep.p_q},
          {"f_nu3", rep.f_nu3}};
}

nlohmann::json to_json(const ElResiduals& res) {
  return {{"el2", res.el2}, {"el3", res.el3}, {"el4", res.el4}};
}

nlohmann::json to_json(const ElReport& rep) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : rep.admissible)
    samples.push_back(
        {{"alpha", s.alpha}, {"beta", s.beta}, {"residuals", to_json(s.res)}});
  return {{"at_params", to_json(rep.at_params)},
          {"admissibility_c", rep.admissibility_c},
          {"admissible_samples", samples}};
}

nlohmann::json to_json(const CorollaryReport& rep) {
  return {{"cor_applicable", rep.cor_applicable},
          {"cor_reason", rep.cor_reason},
          {"cor_verdict", to_string(rep.cor_verdict)},
          {"cor_value", rep.cor_value},
          {"cor2_applicable", rep.cor2_applicable},
          {"cor2_reason", rep.cor2_reason},
          {"cor2_verdict", to_string(rep.cor2_verdict)},
          {"cor2_sign", rep.cor2_sign}};
}

nlohmann::json to_json(const std::vector<EigenPair>& pairs, WeightKind weight,
                       int mode) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : pairs) {
    nlohmann::json f = nlohmann::json::array();
    for (Eigen::Index i = 0; i < p.f.size(); ++i) f.push_back(p.f[i]);
    arr.push_back({{"lambda", p.lambda},
                   {"residual", p.residual},
                   {"sign_changes", p.sign_changes},
                   {"f", std::move(f)}});
  }
  return {{"weight", to_string(weight)}, {"mode", mode}, {"pairs", arr}};
}

nlohmann::json to_json(const StabilityReport& rep) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : rep.quadratic_form_samples)
    samples.push_back(
        {{"id", s.id}, {"d2G", s.d2G}, {"d2H", s.d2H}, {"d2E", s.d2E}});
  nlohmann::json h = nlohmann::json::array();
  if (rep.h_solved)
    for (Eigen::Index i = 0; i < rep.h.size(); ++i) h.push_back(rep.h[i]);
  return {{"lambda1", rep.lambda1},
          {"lambda2", rep.lambda2},
          {"lambda1_m1", rep.lambda1_m1},
          {"verdict", to_string(rep.verdict)},
          {"reason", rep.reason},
          {"h_solved", rep.h_solved},
          {"h_integral", rep.h_integral},
          {"h", std::move(h)},
          {"psi_boundary", rep.psi_boundary},
          {"dn_psi_boundary", rep.dn_psi_boundary},
          {"quadratic_form_samples", std::move(samples)},
          {"euler_lagrange", to_json(rep.el)}};
}

void write_json(const std::string& path, const nlohmann::json& doc) {
  std::ofstream out = open_out(path);
  out << doc.dump(2) << '\n';
}

}  // namespace membrane
