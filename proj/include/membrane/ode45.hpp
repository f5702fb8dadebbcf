#ifndef MEMBRANE_ODE45_HPP
#define MEMBRANE_ODE45_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "membrane/types.hpp"

namespace membrane {

// Adaptive Dormand-Prince 5(4) with the classical quartic dense-output
// interpolant. State is a fixed-size Eigen vector. The working scalar S is
// a template parameter: profile integration runs in long double so that
// node data is machine-accurate after rounding to double (fourth-order
// compositions amplify dense-output noise by h^-3).
template <int N, typename S = Scalar>
class Dopri5 {
 public:
  using Vec = Eigen::Matrix<S, N, 1>;
  using Rhs = std::function<Vec(S, const Vec&)>;

  struct Segment {
    S t0 = 0.0, h = 0.0;
    Vec r1, r2, r3, r4, r5;  // rcont coefficients

    Vec eval(S t) const {
      const S th = (t - t0) / h;
      const S th1 = 1.0 - th;
      return r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
    }
  };

  struct Options {
    S rtol = 1e-10;
    S atol = 1e-12;
    S h_init = 1e-4;
    S h_max = 0.1;
    long max_steps = 2000000;
  };

  Dopri5(Rhs rhs, Options opt) : rhs_(std::move(rhs)), opt_(opt) {}

  // Advance one accepted step from (t, y). Returns the segment covering it.
  Segment step(S& t, Vec& y, S t_end) {
    Vec k1 = rhs_(t, y);
    for (long attempt = 0; attempt < opt_.max_steps; ++attempt) {
      S h = std::min({h_, opt_.h_max, t_end - t});
      if (h <= 0.0) throw NumericalError("Dopri5: nonpositive step");

      const Vec k2 = rhs_(t + c2 * h, y + h * (a21 * k1));
      const Vec k3 = rhs_(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
      const Vec k4 = rhs_(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      const Vec k5 = rhs_(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const Vec k6 = rhs_(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const Vec y1 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const Vec k7 = rhs_(t + h, y1);

      const Vec err_vec =
          h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      S err = 0.0;
      for (int i = 0; i < N; ++i) {
        const S sk =
            opt_.atol + opt_.rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
        const S q = err_vec[i] / sk;
        err += q * q;
      }
      err = std::sqrt(err / N);

      if (err <= 1.0 || h <= 16.0 * std::numeric_limits<S>::epsilon() * std::abs(t)) {
        Segment seg;
        seg.t0 = t;
        seg.h = h;
        const Vec ydiff = y1 - y;
        const Vec bspl = h * k1 - ydiff;
        seg.r1 = y;
        seg.r2 = ydiff;
        seg.r3 = bspl;
        seg.r4 = ydiff - h * k7 - bspl;
        seg.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        t += h;
        y = y1;
        h_ = h * std::clamp(S(0.9) * std::pow(std::max(err, S(1e-32)), S(-0.2)), S(0.2), S(5.0));
        return seg;
      }
      h_ = h * std::clamp(S(0.9) * std::pow(err, S(-0.2)), S(0.2), S(1.0));
    }
    throw ConvergenceFailure("Dopri5: step-size control failed to converge");
  }

  void reset_step(S h) { h_ = h; }

 private:
  Rhs rhs_;
  Options opt_;
  S h_ = 1e-4;

  static constexpr S c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
  static constexpr S a21 = 1.0 / 5.0;
  static constexpr S a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr S a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr S a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                          a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  static constexpr S a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                          a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                          a65 = -5103.0 / 18656.0;
  static constexpr S b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                          b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  static constexpr S e1 = b1 - 5179.0 / 57600.0, e3 = b3 - 7571.0 / 16695.0,
                          e4 = b4 - 393.0 / 640.0, e5 = b5 + 92097.0 / 339200.0,
                          e6 = b6 - 187.0 / 2100.0, e7 = -1.0 / 40.0;
  static constexpr S d1 = -12715105075.0 / 11282082432.0,
                          d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0,
                          d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0,
                          d7 = 69997945.0 / 29380423.0;
};

}  // namespace membrane

#endif  // MEMBRANE_ODE45_HPP
