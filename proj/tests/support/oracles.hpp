#ifndef DLRWAVE_TESTS_ORACLES_HPP
#define DLRWAVE_TESTS_ORACLES_HPP

// Independent reference computations for the test suites. Everything here is
// deliberately written as plain dense formulas (or classical textbook
// algorithms) so it shares no code path with the factored production
// implementations it checks.

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include "dlrwave/flows.hpp"
#include "dlrwave/linalg.hpp"
#include "dlrwave/low_rank.hpp"
#include "dlrwave/model.hpp"

namespace oracles {

using dlrwave::Index;
using dlrwave::LowRankFactor;
using dlrwave::LowRankPair;
using dlrwave::Matrix;

// ---- randomized inputs (fixed seeds; frozen values never come from RNG) ----

inline Matrix random_matrix(Index m, Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix a(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = dist(rng);
  return a;
}

inline Matrix random_orthonormal(Index m, Index r, std::mt19937_64& rng) {
  return dlrwave::thin_qr(random_matrix(m, r, rng)).Q;
}

inline Matrix random_rank_r(Index m, Index n, Index r, std::mt19937_64& rng) {
  return random_matrix(m, r, rng) * random_matrix(r, n, rng);
}

inline LowRankFactor random_factor(Index m, Index n, Index r, std::mt19937_64& rng) {
  LowRankFactor f;
  f.U = random_orthonormal(m, r, rng);
  f.V = random_orthonormal(n, r, rng);
  f.S = random_matrix(r, r, rng) + 2.0 * Matrix::Identity(r, r);  // well away from singular
  return f;
}

// ---- scalar ODE reference: adaptive Dormand-Prince(4,5) -------------------

// High-accuracy solve of y' = f(t, y); used as the oracle for the nonlinear
// half-flows, which act entrywise.
inline double solve_scalar_ode(const std::function<double(double, double)>& f, double y0,
                               double t_end, double tol = 1e-12) {
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                      a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                      a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  double t = 0.0, y = y0;
  double h = t_end / 16.0;
  if (h == 0.0) return y;
  int guard = 0;
  while (t < t_end) {
    if (++guard > 2000000) throw std::runtime_error("oracle ODE: step limit");
    if (t + h > t_end) h = t_end - t;
    const double k1 = f(t, y);
    const double k2 = f(t + h / 5, y + h * a21 * k1);
    const double k3 = f(t + 3 * h / 10, y + h * (a31 * k1 + a32 * k2));
    const double k4 = f(t + 4 * h / 5, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const double k5 = f(t + 8 * h / 9, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const double k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const double y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const double k7 = f(t + h, y5);
    const double err =
        std::abs(h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7));
    const double scale = tol * std::max(1.0, std::max(std::abs(y), std::abs(y5)));
    if (err <= scale) {
      t += h;
      y = y5;
    }
    const double factor = err > 0 ? 0.9 * std::pow(scale / err, 0.2) : 4.0;
    h *= std::min(4.0, std::max(0.1, factor));
  }
  return y;
}

// ---- damped single-mode closed form ----------------------------------------

// c'' + b c' + a c = 0, c(0) = c0, c'(0) = v0; a, b >= 0.
inline double damped_mode_solution(double a, double b, double c0, double v0, double t) {
  const double disc = b * b - 4.0 * a;
  if (disc < 0) {
    const double w = 0.5 * std::sqrt(-disc);
    const double decay = std::exp(-0.5 * b * t);
    return decay * (c0 * std::cos(w * t) + (v0 + 0.5 * b * c0) / w * std::sin(w * t));
  }
  if (disc > 0) {
    const double s = 0.5 * std::sqrt(disc);
    const double l1 = -0.5 * b + s, l2 = -0.5 * b - s;
    const double c2 = (v0 - l1 * c0) / (l2 - l1);
    const double c1 = c0 - c2;
    return c1 * std::exp(l1 * t) + c2 * std::exp(l2 * t);
  }
  const double l = -0.5 * b;
  return (c0 + (v0 - l * c0) * t) * std::exp(l * t);
}

// Discrete Laplacian eigenvalue for mode k on n = N - 1 interior points.
inline double mode_eigenvalue(int k, int n, double h) {
  const double angle = 0.5 * k * M_PI / (n + 1);
  return 4.0 / (h * h) * std::sin(angle) * std::sin(angle);
}

// ---- dense re-implementations of the projector-splitting updates ----------

// Identical formulas to the production code, but fed a dense Delta and using
// plain dense products throughout.
inline LowRankFactor dense_retruncate(const Matrix& V0, const Matrix& delta) {
  const auto k_qr = dlrwave::thin_qr(delta * V0);
  const auto l_qr = dlrwave::thin_qr(delta.transpose() * k_qr.Q);
  return {k_qr.Q, l_qr.R.transpose(), l_qr.Q, false};
}

inline LowRankPair dense_lowrank_flow_x(const LowRankPair& pair, const dlrwave::FlowOperator& B) {
  const Matrix P = pair.P.dense();
  const Matrix Q = pair.Q.dense();
  const Matrix d1 = B.B11() * P + B.B12() * Q;
  const Matrix d2 = B.B21() * P + B.B22() * Q;
  return {dense_retruncate(pair.P.V, d1), dense_retruncate(pair.Q.V, d2)};
}

inline LowRankPair dense_lowrank_flow_y(const LowRankPair& pair, const dlrwave::FlowOperator& B) {
  const Matrix P = pair.P.dense();
  const Matrix Q = pair.Q.dense();
  const Matrix d1 = P * B.B11() + Q * B.B21();
  const Matrix d2 = P * B.B12() + Q * B.B22();
  return {dense_retruncate(pair.P.V, d1), dense_retruncate(pair.Q.V, d2)};
}

inline LowRankFactor dense_dlr_fl(const LowRankPair& pair, double tau, double omega) {
  const Matrix delta_p = tau * omega * pair.Q.dense();
  const Matrix delta_k = delta_p * pair.P.V;
  const auto k_qr = dlrwave::thin_qr(pair.P.U * pair.P.S + delta_k);
  const Matrix s_hat = k_qr.R - k_qr.Q.transpose() * delta_k;
  const auto l_qr = dlrwave::thin_qr(pair.P.V * s_hat.transpose() + delta_p.transpose() * k_qr.Q);
  return {k_qr.Q, l_qr.R.transpose(), l_qr.Q, false};
}

inline LowRankFactor dense_dlr_fn_gzero(const LowRankPair& pair,
                                        const dlrwave::NonlinearPair& F, double tau) {
  const Matrix delta_q = tau * pair.P.dense().unaryExpr(F.f);
  const Matrix delta_k = delta_q * pair.Q.V;
  const auto k_qr = dlrwave::thin_qr(pair.Q.U * pair.Q.S + delta_k);
  const Matrix sigma_hat = k_qr.R - k_qr.Q.transpose() * delta_k;
  const auto l_qr =
      dlrwave::thin_qr(pair.Q.V * sigma_hat.transpose() + delta_q.transpose() * k_qr.Q);
  return {k_qr.Q, l_qr.R.transpose(), l_qr.Q, false};
}

inline double rel_diff(const Matrix& a, const Matrix& b) {
  const double denom = std::max(a.norm(), b.norm());
  return denom > 0 ? (a - b).norm() / denom : 0.0;
}

}  // namespace oracles

#endif
