#include "membrane/profile.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "membrane/ode45.hpp"

namespace membrane {

namespace {

constexpr Scalar kPhiRateBlowup = 1e6;
constexpr Scalar kEventSigmaTol = 1e-12;

// Integration runs in long double: finite-difference assemblies divide the
// dense output by h^2 (and compositions by h^3), so node data must be
// machine-accurate once rounded to double.
using LD = long double;
using Vec3 = Eigen::Matrix<LD, 3, 1>;  // (r, z, phi)
using Segment = Dopri5<3, LD>::Segment;

Vec3 system_rhs(const ModelParams& p, const Vec3& y) {
  const LD r = y[0], z = y[1], phi = y[2];
  Vec3 dy;
  dy[0] = std::cos(phi);
  dy[1] = std::sin(phi);
  dy[2] = -2.0L * std::cos(phi) / z - std::sin(phi) / r - 2.0L * static_cast<LD>(p.c_o);
  return dy;
}

// Cubic apex series. phi1 = -(1/z_hat + c_o), phi3 = -c_o*phi1/(4 z_hat).
struct ApexSeries {
  LD z_hat, phi1, phi3;

  Vec3 eval_state(LD s) const {  // (r, z, phi)
    Vec3 y;
    y[2] = phi1 * s + phi3 * s * s * s;
    y[0] = s - phi1 * phi1 * s * s * s / 6.0L;
    y[1] = z_hat + phi1 * s * s / 2.0L +
           (phi3 - phi1 * phi1 * phi1 / 6.0L) * s * s * s * s / 4.0L;
    return y;
  }

  CurveState eval(Scalar s) const {
    const Vec3 y = eval_state(s);
    return CurveState{static_cast<Scalar>(y[0]), static_cast<Scalar>(y[1]),
                      static_cast<Scalar>(y[2])};
  }
};

class RkDenseCurve final : public DenseCurve {
 public:
  RkDenseCurve(ApexSeries series, Scalar delta, std::vector<Segment> segs, Scalar s_end)
      : series_(series), delta_(delta), segments_(std::move(segs)), sigma_end_(s_end) {}

  CurveState eval(Scalar sigma) const override {
    if (sigma <= delta_ || segments_.empty()) return series_.eval(sigma);
    // Locate the covering segment by binary search on start parameters.
    std::size_t lo = 0, hi = segments_.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi + 1) / 2;
      if (static_cast<Scalar>(segments_[mid].t0) <= sigma)
        lo = mid;
      else
        hi = mid - 1;
    }
    const Vec3 y = segments_[lo].eval(std::min<LD>(sigma, sigma_end_));
    return CurveState{static_cast<Scalar>(y[0]), static_cast<Scalar>(y[1]),
                      static_cast<Scalar>(y[2])};
  }

  CurveStateL eval_ld(long double sigma) const override {
    Vec3 y;
    if (sigma <= static_cast<LD>(delta_) || segments_.empty()) {
      y = series_.eval_state(sigma);
    } else {
      std::size_t lo = 0, hi = segments_.size() - 1;
      while (lo < hi) {
        const std::size_t mid = (lo + hi + 1) / 2;
        if (segments_[mid].t0 <= sigma)
          lo = mid;
        else
          hi = mid - 1;
      }
      y = segments_[lo].eval(std::min<LD>(sigma, sigma_end_));
    }
    return CurveStateL{y[0], y[1], y[2]};
  }

  Scalar sigma_end() const override { return sigma_end_; }

 private:
  ApexSeries series_;
  Scalar delta_;
  std::vector<Segment> segments_;
  Scalar sigma_end_;
};

class FlatDiscCurve final : public DenseCurve {
 public:
  FlatDiscCurve(Scalar z0, Scalar radius) : z0_(z0), radius_(radius) {}
  CurveState eval(Scalar sigma) const override { return CurveState{sigma, z0_, 0.0}; }
  Scalar sigma_end() const override { return radius_; }

 private:
  Scalar z0_, radius_;
};

Scalar event_value(StopKind kind, const CurveState& s) {
  switch (kind) {
    case StopKind::RPrimeZero: return std::cos(s.phi);
    case StopKind::PhiReachesMinusPi: return s.phi + M_PI;
    case StopKind::ZApproachesZero: return s.z;
    case StopKind::SigmaMax: return 1.0;
  }
  return 1.0;
}

// Bisection of the event function on one dense segment; [sa, sb] brackets.
Scalar bisect_event(const DenseCurve& dense, StopKind kind, Scalar sa, Scalar sb) {
  Scalar ga = event_value(kind, dense.eval(sa));
  while (sb - sa > kEventSigmaTol) {
    const Scalar sm = 0.5 * (sa + sb);
    const Scalar gm = event_value(kind, dense.eval(sm));
    if (ga * gm <= 0.0)
      sb = sm;
    else {
      sa = sm;
      ga = gm;
    }
  }
  return 0.5 * (sa + sb);
}

ProfileCurve finalize(const ModelParams& params, const ApexInit& init,
                      std::vector<Scalar> sig, std::shared_ptr<const DenseCurve> dense,
                      std::optional<Scalar> event_sigma, StopKind kind) {
  ProfileCurve curve;
  const Eigen::Index n = static_cast<Eigen::Index>(sig.size());
  curve.sigma.resize(n);
  curve.r.resize(n);
  curve.z.resize(n);
  curve.phi.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    curve.sigma[i] = sig[i];
    const CurveState s = dense->eval(sig[i]);
    curve.r[i] = s.r;
    curve.z[i] = s.z;
    curve.phi[i] = s.phi;
  }
  curve.r[0] = 0.0;
  curve.phi[0] = 0.0;
  curve.z[0] = init.z_hat;
  curve.event_sigma = event_sigma;
  curve.event_kind = kind;
  curve.params = params;
  curve.z_hat = init.z_hat;
  curve.apex_slope = apex_slope_of(params, init);
  curve.dense = std::move(dense);
  return curve;
}

}  // namespace

Scalar ProfileCurve::phi_rate(const CurveState& s) const {
  if (s.r <= 0.0) return apex_slope;
  return -2.0 * std::cos(s.phi) / s.z - std::sin(s.phi) / s.r - 2.0 * params.c_o;
}

Scalar apex_slope_of(const ModelParams& params, const ApexInit& init) {
  if (init.z_hat == 0.0) throw InvalidArgument("apex_slope_of: z_hat must be nonzero");
  return -(1.0 / init.z_hat + params.c_o);
}

CurveState apex_expansion(const ModelParams& params, const ApexInit& init, Scalar delta) {
  if (!(delta > 0.0)) throw InvalidArgument("apex_expansion: delta must be positive");
  const Scalar phi1 = apex_slope_of(params, init);
  const ApexSeries series{init.z_hat, phi1, -params.c_o * phi1 / (4.0 * init.z_hat)};
  return series.eval(delta);
}

Scalar apex_start_offset(const ModelParams& params, const ApexInit& init) {
  const Scalar scale = std::min(std::abs(init.z_hat), 1.0 / (1.0 + std::abs(params.c_o)));
  return std::max(1e-6, 1e-3 * scale);
}

ProfileCurve integrate_profile(const ModelParams& params, const ApexInit& init,
                               const StopRule& stop, Scalar tol) {
  if (!(tol > 0.0)) throw InvalidArgument("integrate_profile: tol must be positive");
  if (init.z_hat == 0.0) throw InvalidArgument("integrate_profile: z_hat must be nonzero");

  const Scalar phi1 = apex_slope_of(params, init);
  const ApexSeries series{init.z_hat, phi1, -params.c_o * phi1 / (4.0 * init.z_hat)};
  const Scalar delta = apex_start_offset(params, init);
  const CurveState s0 = series.eval(delta);
  const Scalar z_sign = init.z_hat > 0.0 ? 1.0 : -1.0;

  Dopri5<3, LD>::Options opt;
  // The working precision is long double; push the tolerance well below the
  // double rounding level of the emitted node data.
  opt.rtol = std::max<LD>(1e-17L, static_cast<LD>(tol) * 1e-5L);
  opt.atol = 0.01L * opt.rtol;
  // Cap the step below any plausible operator grid spacing: the dense
  // interpolant has derivative kinks at step joints, and fourth-order
  // stencils divide them by h^4. Small steps push the kinks to the long
  // double error floor.
  opt.h_max = std::min<LD>(2e-4L, static_cast<LD>(stop.sigma_max) / 16.0L);
  Dopri5<3, LD> stepper([&params](LD, const Vec3& y) { return system_rhs(params, y); }, opt);
  stepper.reset_step(std::min<LD>(delta, opt.h_max));

  std::vector<Segment> segments;
  std::vector<Scalar> nodes{0.0, delta};

  LD t = delta;
  Vec3 y = series.eval_state(delta);
  Scalar g_prev = event_value(stop.kind, s0);
  std::optional<Scalar> event_sigma;

  while (t < static_cast<LD>(stop.sigma_max)) {
    const Scalar t_before = static_cast<Scalar>(t);
    Segment seg = stepper.step(t, y, stop.sigma_max);
    segments.push_back(seg);
    const CurveState s_now{static_cast<Scalar>(y[0]), static_cast<Scalar>(y[1]),
                           static_cast<Scalar>(y[2])};

    // Curvature blow-up guard (the system stiffens as z -> 0).
    const Scalar rate = -2.0 * std::cos(s_now.phi) / s_now.z -
                        std::sin(s_now.phi) / s_now.r - 2.0 * params.c_o;
    if (std::abs(rate) > kPhiRateBlowup)
      throw SingularBlowup("integrate_profile: |phi'| exceeded blow-up bound");

    if (stop.kind != StopKind::SigmaMax) {
      const Scalar g_now = event_value(stop.kind, s_now);
      if (g_prev * g_now <= 0.0) {
        // Interim dense curve over what has been integrated so far.
        auto dense = std::make_shared<RkDenseCurve>(series, delta, segments,
                                                    static_cast<Scalar>(t));
        const Scalar s_star =
            bisect_event(*dense, stop.kind, t_before, static_cast<Scalar>(t));
        // Half-space guard up to the event itself. The boundary may touch
        // z = 0 exactly at the event (unit sphere), hence the tolerance.
        if (stop.kind != StopKind::ZApproachesZero &&
            dense->eval(s_star).z * z_sign < -1e-9 * std::abs(init.z_hat))
          throw HalfSpaceExit("integrate_profile: z changed sign before the event");
        event_sigma = s_star;
        nodes.push_back(s_star);
        auto final_dense = std::make_shared<RkDenseCurve>(series, delta,
                                                          std::move(segments), s_star);
        return finalize(params, init, std::move(nodes), std::move(final_dense),
                        event_sigma, stop.kind);
      }
      g_prev = g_now;
    }

    if (stop.kind != StopKind::ZApproachesZero && s_now.z * z_sign <= 0.0)
      throw HalfSpaceExit("integrate_profile: z changed sign");

    nodes.push_back(static_cast<Scalar>(t));
  }

  if (stop.kind != StopKind::SigmaMax)
    throw EventNotFound("integrate_profile: event function never changed sign before sigma_max");

  if (nodes.back() != stop.sigma_max) nodes.push_back(stop.sigma_max);
  auto dense = std::make_shared<RkDenseCurve>(series, delta, std::move(segments),
                                              stop.sigma_max);
  return finalize(params, init, std::move(nodes), std::move(dense), std::nullopt,
                  stop.kind);
}

Scalar locate_event(const ProfileCurve& curve, const StopRule& rule) {
  if (rule.kind == StopKind::SigmaMax)
    throw InvalidArgument("locate_event: SigmaMax is not a locatable event");
  if (curve.event_sigma && curve.event_kind == rule.kind) return *curve.event_sigma;

  for (Eigen::Index i = 1; i < curve.node_count(); ++i) {
    const CurveState sa{curve.r[i - 1], curve.z[i - 1], curve.phi[i - 1]};
    const CurveState sb{curve.r[i], curve.z[i], curve.phi[i]};
    const Scalar ga = event_value(rule.kind, sa);
    const Scalar gb = event_value(rule.kind, sb);
    if (ga * gb <= 0.0)
      return bisect_event(*curve.dense, rule.kind, curve.sigma[i - 1], curve.sigma[i]);
  }
  throw EventNotFound("locate_event: no bracketing interval on the curve");
}

ProfileCurve resample(const ProfileCurve& curve, int n) {
  if (n < 16) throw InvalidArgument("resample: need at least 16 intervals");
  const Scalar s_end = curve.sigma_end();
  ProfileCurve out;
  out.sigma.resize(n + 1);
  out.r.resize(n + 1);
  out.z.resize(n + 1);
  out.phi.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    const Scalar s = (i == n) ? s_end : s_end * static_cast<Scalar>(i) / n;
    const CurveState st = curve.dense->eval(s);
    out.sigma[i] = s;
    out.r[i] = st.r;
    out.z[i] = st.z;
    out.phi[i] = st.phi;
  }
  out.r[0] = 0.0;
  out.phi[0] = 0.0;
  out.z[0] = curve.z_hat;
  out.event_sigma = curve.event_sigma;
  out.event_kind = curve.event_kind;
  out.params = curve.params;
  out.z_hat = curve.z_hat;
  out.apex_slope = curve.apex_slope;
  out.dense = curve.dense;
  return out;
}

ProfileCurve make_flat_disc(const ModelParams& params, Scalar radius, int n) {
  if (params.c_o == 0.0) throw InvalidArgument("make_flat_disc: c_o must be nonzero");
  if (!(radius > 0.0)) throw InvalidArgument("make_flat_disc: radius must be positive");
  const Scalar z0 = -1.0 / params.c_o;

  ProfileCurve curve;
  curve.sigma = Eigen::ArrayXd::LinSpaced(n + 1, 0.0, radius);
  curve.r = curve.sigma;
  curve.z = Eigen::ArrayXd::Constant(n + 1, z0);
  curve.phi = Eigen::ArrayXd::Zero(n + 1);
  curve.event_kind = StopKind::SigmaMax;
  curve.params = params;
  curve.z_hat = z0;
  curve.apex_slope = 0.0;  // -(1/z0 + c_o) with z0 = -1/c_o
  curve.dense = std::make_shared<FlatDiscCurve>(z0, radius);
  return curve;
}

}  // namespace membrane
