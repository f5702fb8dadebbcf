// Command-line front end: trace generating curves, sweep apex heights, run
// the operator identity suite, solve Dirichlet spectra and emit stability
// reports as plot-ready CSV/JSON artifacts.

#include <chrono>
#include <cstdio>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "membrane/io.hpp"

namespace {

using namespace membrane;

struct Opts {
  Scalar co = 2.0;
  Scalar a = 1.0;
  Scalar b = 0.0;
  Scalar alpha = 1.0;
  Scalar beta = 1.0;
  std::string zhat = "3";
  std::string stop = "rprime-zero";
  Scalar sigma_max = 10.0;
  int grid_n = 512;
  int mode = 0;
  std::string weight = "zsq";
  int k = 4;
  std::string outdir = ".";
  std::string op_name = "p";
  bool assert_stable = false;
};

StopKind parse_stop(const std::string& s) {
  if (s == "rprime-zero") return StopKind::RPrimeZero;
  if (s == "phi-pi") return StopKind::PhiReachesMinusPi;
  if (s == "z-zero") return StopKind::ZApproachesZero;
  if (s == "sigma-max") return StopKind::SigmaMax;
  throw InvalidArgument("unknown stop rule: " + s);
}

WeightKind parse_weight(const std::string& s) {
  if (s == "invzsq") return WeightKind::InvZSq;
  if (s == "zsq") return WeightKind::ZSq;
  throw InvalidArgument("unknown weight: " + s);
}

OperatorKind parse_operator(const std::string& s) {
  if (s == "l") return OperatorKind::L;
  if (s == "call") return OperatorKind::CalL;
  if (s == "p") return OperatorKind::P;
  if (s == "pstar") return OperatorKind::Pstar;
  if (s == "f") return OperatorKind::F;
  throw InvalidArgument("unknown operator: " + s);
}

// "v" or "start:end:count"
std::vector<Scalar> parse_zhat_range(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  std::vector<Scalar> out;
  if (parts.size() == 1) {
    out.push_back(std::stod(parts[0]));
  } else if (parts.size() == 3) {
    const Scalar lo = std::stod(parts[0]);
    const Scalar hi = std::stod(parts[1]);
    const int count = std::stoi(parts[2]);
    if (count < 1) throw InvalidArgument("zhat range: count must be >= 1");
    for (int i = 0; i < count; ++i)
      out.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1.0));
  } else {
    throw InvalidArgument("zhat: expected a value or start:end:count");
  }
  return out;
}

// Artifacts written so far; removed unless released on success.
struct ArtifactSet {
  std::vector<std::string> paths;
  bool keep = false;
  void add(std::string p) { paths.push_back(std::move(p)); }
  ~ArtifactSet() {
    if (!keep)
      for (const auto& p : paths) std::remove(p.c_str());
  }
};

ModelParams params_of(const Opts& o) {
  return ModelParams(o.co, o.a, o.b, o.alpha, o.beta);
}

ProfileCurve traced(const Opts& o, Scalar zhat) {
  const ProfileCurve raw = integrate_profile(
      params_of(o), ApexInit(zhat), StopRule(parse_stop(o.stop), o.sigma_max));
  return resample(raw, o.grid_n);
}

ProfileCurve traced(const Opts& o) {
  const auto zs = parse_zhat_range(o.zhat);
  if (zs.size() != 1)
    throw InvalidArgument("this command takes a single --zhat value");
  return traced(o, zs[0]);
}

std::string joined(const std::string& dir, const std::string& name) {
  return dir + "/" + name;
}

void write_meta(const Opts& o, const std::string& command, ArtifactSet& art) {
  nlohmann::json meta = {
      {"command", command},
      {"params", to_json(params_of(o))},
      {"zhat", o.zhat},
      {"stop", o.stop},
      {"sigma_max", o.sigma_max},
      {"grid_n", o.grid_n},
      {"mode", o.mode},
      {"weight", o.weight},
  };
  const auto now = std::chrono::system_clock::now();
  meta["unix_time"] =
      std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch())
          .count();
  const std::string path = joined(o.outdir, "run_meta.json");
  write_json(path, meta);
  art.add(path);
}

nlohmann::json curve_json(const ProfileCurve& curve, const FieldTable& fields) {
  nlohmann::json j = to_json(boundary_darboux(curve, fields));
  j["sigma_end"] = curve.sigma_end();
  j["event"] = to_string(curve.event_kind);
  j["z_hat"] = curve.z_hat;
  j["rme_residual"] = rme_residual(curve, fields, curve.params.c_o);
  return j;
}

int cmd_trace(const Opts& o) {
  ArtifactSet art;
  const ProfileCurve curve = traced(o);
  const FieldTable fields = geometric_fields(curve);

  const std::string profile = joined(o.outdir, "profile.csv");
  write_profile_csv(profile, curve);
  art.add(profile);

  const std::string fpath = joined(o.outdir, "fields.csv");
  write_fields_csv(fpath, curve, fields, curve.params);
  art.add(fpath);

  const std::string bpath = joined(o.outdir, "boundary.json");
  write_json(bpath, curve_json(curve, fields));
  art.add(bpath);

  write_meta(o, "trace", art);
  art.keep = true;
  return 0;
}

int cmd_scan(const Opts& o) {
  ArtifactSet art;
  const auto zs = parse_zhat_range(o.zhat);

  struct JobResult {
    ProfileCurve curve;
    FieldTable fields;
    StabilityReport report;
  };
  std::vector<std::future<JobResult>> jobs;
  jobs.reserve(zs.size());
  for (const Scalar zh : zs)
    jobs.push_back(std::async(std::launch::async, [&o, zh] {
      JobResult res;
      res.curve = traced(o, zh);
      res.fields = geometric_fields(res.curve);
      res.report = thmbif_verdict(res.curve, res.fields, res.curve.params);
      return res;
    }));

  nlohmann::json table = nlohmann::json::array();
  bool any_unstable = false;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    JobResult res = jobs[i].get();
    const std::string profile =
        joined(o.outdir, "profile_" + std::to_string(i) + ".csv");
    write_profile_csv(profile, res.curve);
    art.add(profile);

    nlohmann::json row = curve_json(res.curve, res.fields);
    row["lambda1"] = res.report.lambda1;
    row["lambda2"] = res.report.lambda2;
    row["verdict"] = to_string(res.report.verdict);
    table.push_back(std::move(row));
    any_unstable = any_unstable || is_unstable(res.report.verdict);
  }

  const std::string spath = joined(o.outdir, "scan.json");
  write_json(spath, nlohmann::json{{"rows", table}});
  art.add(spath);

  write_meta(o, "scan", art);
  art.keep = true;
  return (o.assert_stable && any_unstable) ? 1 : 0;
}

int cmd_identities(const Opts& o) {
  ArtifactSet art;
  nlohmann::json runs = nlohmann::json::array();
  std::vector<int> ns = {o.grid_n, 2 * o.grid_n, 4 * o.grid_n};
  std::vector<IdentityReport> reports;
  for (int n : ns) {
    Opts local = o;
    local.grid_n = n;
    const ProfileCurve curve = traced(local);
    const FieldTable fields = geometric_fields(curve);
    const IdentityReport rep = identity_suite(curve, fields, curve.params);
    reports.push_back(rep);
    nlohmann::json j = to_json(rep);
    j["n"] = n;
    runs.push_back(std::move(j));
  }

  auto slope = [](Scalar coarse, Scalar fine) {
    return std::log(coarse / fine) / std::log(4.0);
  };
  const IdentityReport& c = reports.front();
  const IdentityReport& f = reports.back();
  nlohmann::json slopes = {
      {"easy_p", slope(c.easy_p, f.easy_p)},
      {"easy_pstar", slope(c.easy_pstar, f.easy_pstar)},
      {"pp_star", slope(c.pp_star, f.pp_star)},
      {"adjoint", slope(c.adjoint, f.adjoint)},
      {"p_nu3", slope(c.p_nu3, f.p_nu3)},
      {"p_q", slope(c.p_q, f.p_q)},
      {"f_nu3", slope(c.f_nu3, f.f_nu3)},
  };

  const std::string path = joined(o.outdir, "identities.json");
  write_json(path, nlohmann::json{{"runs", runs}, {"slopes", slopes}});
  art.add(path);

  write_meta(o, "identities", art);
  art.keep = true;
  return 0;
}

int cmd_spectrum(const Opts& o) {
  ArtifactSet art;
  const ProfileCurve curve = traced(o);
  const FieldTable fields = geometric_fields(curve);
  const BcPair bc{o.mode == 0 ? ApexBc::Regular : ApexBc::Vanishing,
                  OuterBc::Dirichlet};
  const DiscreteOperator opP =
      assemble(curve, fields, curve.params, OperatorKind::P, o.mode, bc);
  const auto pairs =
      solve_dirichlet_spectrum(opP, parse_weight(o.weight), o.k);

  const std::string path = joined(o.outdir, "spectrum.json");
  write_json(path, to_json(pairs, parse_weight(o.weight), o.mode));
  art.add(path);

  write_meta(o, "spectrum", art);
  art.keep = true;
  return 0;
}

int cmd_stability(const Opts& o) {
  ArtifactSet art;
  const ProfileCurve curve = traced(o);
  const FieldTable fields = geometric_fields(curve);
  const StabilityReport rep = thmbif_verdict(curve, fields, curve.params);

  nlohmann::json j = to_json(rep);
  j["boundary"] = curve_json(curve, fields);
  j["corollaries"] = to_json(corollary_checks(curve, fields, curve.params));

  const std::string path = joined(o.outdir, "stability.json");
  write_json(path, j);
  art.add(path);

  write_meta(o, "stability", art);
  art.keep = true;
  return (o.assert_stable && is_unstable(rep.verdict)) ? 1 : 0;
}

int cmd_energy(const Opts& o) {
  ArtifactSet art;
  const ProfileCurve curve = traced(o);
  const FieldTable fields = geometric_fields(curve);

  const std::string path = joined(o.outdir, "energies.json");
  write_json(path, to_json(energies(curve, fields, curve.params)));
  art.add(path);

  write_meta(o, "energy", art);
  art.keep = true;
  return 0;
}

int cmd_export(const Opts& o) {
  ArtifactSet art;
  const ProfileCurve curve = traced(o);
  const FieldTable fields = geometric_fields(curve);
  const OperatorKind kind = parse_operator(o.op_name);
  const BcPair bc{o.mode == 0 ? ApexBc::Regular : ApexBc::Vanishing,
                  OuterBc::Dirichlet};
  const DiscreteOperator op =
      kind == OperatorKind::F
          ? assemble_F(curve, fields, curve.params, o.mode)
          : assemble(curve, fields, curve.params, kind, o.mode, bc);

  const std::string path = joined(o.outdir, "operator.coo");
  write_operator_coo(path, op);
  art.add(path);

  write_meta(o, "export", art);
  art.keep = true;
  return 0;
}

void add_common(CLI::App* cmd, Opts& o) {
  cmd->add_option("--co", o.co, "spontaneous curvature c_o");
  cmd->add_option("--a", o.a, "bending rigidity a > 0");
  cmd->add_option("--b", o.b, "saddle-splay modulus b");
  cmd->add_option("--alpha", o.alpha, "boundary flexural rigidity alpha > 0");
  cmd->add_option("--beta", o.beta, "boundary line tension beta > 0");
  cmd->add_option("--zhat", o.zhat, "apex height, or start:end:count for scan");
  cmd->add_option("--stop", o.stop,
                  "stop rule: rprime-zero | phi-pi | z-zero | sigma-max");
  cmd->add_option("--sigma-max", o.sigma_max, "arc-length cap");
  cmd->add_option("--grid-n", o.grid_n, "uniform grid intervals")
      ->check(CLI::Range(32, 1 << 20));
  cmd->add_option("--mode", o.mode, "Fourier mode m >= 0")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--weight", o.weight, "eigenproblem weight: invzsq | zsq");
  cmd->add_option("--k", o.k, "number of eigenpairs")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.outdir, "output directory (must exist)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"axially symmetric membrane laboratory"};
  app.require_subcommand(1);

  Opts o;
  auto* trace = app.add_subcommand("trace", "integrate one generating curve");
  auto* scan = app.add_subcommand("scan", "sweep apex heights");
  auto* identities =
      app.add_subcommand("identities", "operator identity convergence study");
  auto* spectrum = app.add_subcommand("spectrum", "Dirichlet eigenpairs of P");
  auto* stability = app.add_subcommand("stability", "constrained stability report");
  auto* energy = app.add_subcommand("energy", "energy functionals of a trace");
  auto* exportc = app.add_subcommand("export", "operator matrix as COO text");
  for (auto* cmd : {trace, scan, identities, spectrum, stability, energy, exportc})
    add_common(cmd, o);
  scan->add_flag("--assert-stable", o.assert_stable,
                 "exit 1 on any unstable verdict");
  stability->add_flag("--assert-stable", o.assert_stable,
                      "exit 1 on an unstable verdict");
  exportc->add_option("--operator", o.op_name,
                      "operator: l | call | p | pstar | f");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (trace->parsed()) return cmd_trace(o);
    if (scan->parsed()) return cmd_scan(o);
    if (identities->parsed()) return cmd_identities(o);
    if (spectrum->parsed()) return cmd_spectrum(o);
    if (stability->parsed()) return cmd_stability(o);
    if (energy->parsed()) return cmd_energy(o);
    if (exportc->parsed()) return cmd_export(o);
  } catch (const InvalidArgument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
