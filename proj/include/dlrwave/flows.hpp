#ifndef DLRWAVE_FLOWS_HPP
#define DLRWAVE_FLOWS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

#include "dlrwave/grid.hpp"
#include "dlrwave/linalg.hpp"
#include "dlrwave/model.hpp"

namespace dlrwave {

// Thrown when a trajectory leaves the representable range (f = u^2, u^3 can
// genuinely blow up for large data).
struct BlowUpError : std::runtime_error {
  long step;
  double time;
  BlowUpError(long step_, double time_)
      : std::runtime_error("solution blew up at step " + std::to_string(step_) +
                           " (t = " + std::to_string(time_) + ")"),
        step(step_),
        time(time_) {}
};

enum class Axis { X, Y };

// Exact solution operator of one linear subflow over a fixed step:
//   x direction, left action on the stacked state   [P1; Q1] = B [P; Q]
//   y direction, right action on the wide state     [P1  Q1] = [P  Q] B
// B is the exponential of the 2n x 2n block generator, times the step:
//   x:  [ 0                      w1 I                ]
//       [ -alpha A - delta/2 I   -beta A - gamma/2 I ]
//   y:  [ 0     -alpha A - delta/2 I  ]
//       [ w2 I  -beta A - gamma/2 I   ]
struct FlowOperator {
  Axis direction;
  double step;
  Index n;   // block size, interior count of the matching direction
  Matrix B;  // 2n x 2n

  auto B11() const { return B.topLeftCorner(n, n); }
  auto B12() const { return B.topRightCorner(n, n); }
  auto B21() const { return B.bottomLeftCorner(n, n); }
  auto B22() const { return B.bottomRightCorner(n, n); }
};

namespace detail {

// Generator blocks per direction. The x generator acts from the left on
// [P; Q], the y generator from the right on [P Q]; both reduce to the same
// 2x2 template per eigenvalue of A, transposed for y.
inline Matrix flow_generator(Axis direction, const ModelParams& params, const Matrix& A) {
  const Index n = A.rows();
  const double omega = direction == Axis::X ? params.w1 : params.w2;
  Matrix G = Matrix::Zero(2 * n, 2 * n);
  const Matrix damped =
      -params.alpha * A - 0.5 * params.delta * Matrix::Identity(n, n);
  const Matrix visco =
      -params.beta * A - 0.5 * params.gamma * Matrix::Identity(n, n);
  if (direction == Axis::X) {
    G.topRightCorner(n, n) = omega * Matrix::Identity(n, n);
    G.bottomLeftCorner(n, n) = damped;
  } else {
    G.topRightCorner(n, n) = damped;
    G.bottomLeftCorner(n, n) = omega * Matrix::Identity(n, n);
  }
  G.bottomRightCorner(n, n) = visco;
  return G;
}

// True when A is the uniform Dirichlet Laplacian (1/h^2) tridiag(-1,2,-1),
// whose eigenpairs are known in closed form.
inline bool is_uniform_laplacian(const Matrix& A) {
  const Index n = A.rows();
  if (A.cols() != n || n < 1) return false;
  const double d = A(0, 0);
  if (!(d > 0)) return false;
  if (n == 1) return true;
  const double off = A(0, 1);
  const double tol = 1e-13 * d;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      double want = 0.0;
      if (i == j) want = d;
      else if (i + 1 == j || j + 1 == i) want = off;
      if (std::abs(A(i, j) - want) > tol) return false;
    }
  }
  return std::abs(d + 2.0 * off) <= tol;
}

}  // namespace detail

// Precompute the exponential flow operator for one direction and step.
//
// Fast path: for the uniform Laplacian, A = V diag(mu) V with the sine
// eigenbasis V[i][k] = sqrt(2/N) sin((i+1)(k+1) pi / N), so the generator
// decouples into one 2x2 block per mode, exponentiated in closed form. Any
// other A falls back to the general Pade exponential of the full generator.
inline FlowOperator build_flow(Axis direction, double tau, const ModelParams& params,
                               const Matrix& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("build_flow: A must be square");
  if (!std::isfinite(tau)) throw std::invalid_argument("build_flow: step must be finite");
  // negative steps are allowed: the exponential group gives the inverse flow
  const Index n = A.rows();
  const double omega = direction == Axis::X ? params.w1 : params.w2;

  FlowOperator flow;
  flow.direction = direction;
  flow.step = tau;
  flow.n = n;

  if (!detail::is_uniform_laplacian(A)) {
    flow.B = expm(tau * detail::flow_generator(direction, params, A));
    return flow;
  }

  const Index N = n + 1;
  Matrix V(n, n);
  Eigen::VectorXd mu(n);
  const double scale = std::sqrt(2.0 / N);
  const double c = n == 1 ? 0.5 * A(0, 0) : -A(0, 1);
  for (Index k = 0; k < n; ++k) {
    const double angle = 0.5 * (k + 1) * M_PI / N;
    mu(k) = 4.0 * c * std::sin(angle) * std::sin(angle);
    for (Index i = 0; i < n; ++i)
      V(i, k) = scale * std::sin((i + 1) * (k + 1) * M_PI / N);
  }

  Eigen::VectorXd e11(n), e12(n), e21(n), e22(n);
  for (Index k = 0; k < n; ++k) {
    Eigen::Matrix2d g;
    const double damped = -params.alpha * mu(k) - 0.5 * params.delta;
    const double visco = -params.beta * mu(k) - 0.5 * params.gamma;
    if (direction == Axis::X)
      g << 0.0, omega, damped, visco;
    else
      g << 0.0, damped, omega, visco;
    const Eigen::Matrix2d e = expm_2x2(Eigen::Matrix2d(tau * g));
    e11(k) = e(0, 0);
    e12(k) = e(0, 1);
    e21(k) = e(1, 0);
    e22(k) = e(1, 1);
  }

  flow.B.resize(2 * n, 2 * n);
  const Matrix Vt = V.transpose();
  flow.B.topLeftCorner(n, n) = V * e11.asDiagonal() * Vt;
  flow.B.topRightCorner(n, n) = V * e12.asDiagonal() * Vt;
  flow.B.bottomLeftCorner(n, n) = V * e21.asDiagonal() * Vt;
  flow.B.bottomRightCorner(n, n) = V * e22.asDiagonal() * Vt;
  return flow;
}

inline PairState flow_x(const PairState& state, const FlowOperator& B) {
  if (B.direction != Axis::X) throw std::invalid_argument("flow_x: wrong direction");
  if (state.P.rows() != B.n) throw std::invalid_argument("flow_x: shape mismatch");
  PairState out;
  out.P = B.B11() * state.P + B.B12() * state.Q;
  out.Q = B.B21() * state.P + B.B22() * state.Q;
  return out;
}

inline PairState flow_y(const PairState& state, const FlowOperator& B) {
  if (B.direction != Axis::Y) throw std::invalid_argument("flow_y: wrong direction");
  if (state.P.cols() != B.n) throw std::invalid_argument("flow_y: shape mismatch");
  PairState out;
  out.P = state.P * B.B11() + state.Q * B.B21();
  out.Q = state.P * B.B12() + state.Q * B.B22();
  return out;
}

namespace detail {

// One classical 4th-order step per substep for the frozen-P half flow
// Q' = f(P) + g(Q). With g = 0 the flow is an exact linear drift instead.
inline Matrix fn_half_flow(const Matrix& P, const Matrix& Q, double tau,
                           const NonlinearPair& F, int substeps) {
  const Matrix fP = P.unaryExpr(F.f);
  if (F.g_is_zero) return Q + tau * fP;

  auto rhs = [&](const Matrix& q) -> Matrix { return fP + q.unaryExpr(F.g); };
  Matrix q = Q;
  const double h = tau / substeps;
  for (int s = 0; s < substeps; ++s) {
    const Matrix k1 = rhs(q);
    const Matrix k2 = rhs(q + 0.5 * h * k1);
    const Matrix k3 = rhs(q + 0.5 * h * k2);
    const Matrix k4 = rhs(q + h * k3);
    q += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return q;
}

}  // namespace detail

// Strang composition for the nonlinear subflow P' = w3 Q, Q' = F(P, Q):
// half a frozen-P velocity update, the exact drift P += tau w3 Q, and the
// second half of the velocity update against the drifted P.
inline PairState flow_F(const PairState& state, double tau, double omega3,
                        const NonlinearPair& F, int fn_substeps = 1) {
  if (tau < 0) throw std::invalid_argument("flow_F: step must be nonnegative");
  if (fn_substeps < 1) throw std::invalid_argument("flow_F: substeps must be positive");
  PairState out;
  const Matrix q_half = detail::fn_half_flow(state.P, state.Q, 0.5 * tau, F, fn_substeps);
  out.P = state.P + tau * omega3 * q_half;
  out.Q = detail::fn_half_flow(out.P, q_half, 0.5 * tau, F, fn_substeps);
  return out;
}

// One step of the palindromic splitting
//   x(tau/2) -> y(tau/2) -> F(tau) -> y(tau/2) -> x(tau/2).
inline PairState strang_step(const PairState& state, const FlowOperator& Bx_half,
                             const FlowOperator& By_half, double tau,
                             const ModelParams& params, const NonlinearPair& F,
                             int fn_substeps = 1) {
  if (std::abs(Bx_half.step - 0.5 * tau) > 1e-12 * std::max(1.0, tau) ||
      std::abs(By_half.step - 0.5 * tau) > 1e-12 * std::max(1.0, tau))
    throw std::invalid_argument("strang_step: flows must be built with step tau/2");
  PairState s = flow_x(state, Bx_half);
  s = flow_y(s, By_half);
  s = flow_F(s, tau, params.w3, F, fn_substeps);
  s = flow_y(s, By_half);
  return flow_x(s, Bx_half);
}

using FullRankObserver = std::function<void(long k, double t, const PairState&)>;

// March the full-rank scheme over the whole time grid. The observer, when
// given, sees the initial state as step 0 and then every completed step.
inline PairState integrate_fullrank(const PairState& state0, const GridSpec& grid,
                                    const TimeGrid& time, const ModelParams& params,
                                    const NonlinearPair& F, int fn_substeps = 1,
                                    const FullRankObserver& observer = nullptr) {
  grid.validate();
  params.validate();
  if (time.M < 0) throw std::invalid_argument("integrate: M must be nonnegative");
  if (state0.P.rows() != grid.interior_x() || state0.P.cols() != grid.interior_y())
    throw std::invalid_argument("integrate: state does not match grid");

  PairState state = state0;
  if (observer) observer(0, 0.0, state);
  if (time.M == 0) return state;

  const double tau = time.tau();
  const Matrix Ax = build_laplacian_1d(grid.interior_x(), grid.hx());
  const Matrix Ay = build_laplacian_1d(grid.interior_y(), grid.hy());
  const FlowOperator Bx = build_flow(Axis::X, 0.5 * tau, params, Ax);
  const FlowOperator By = build_flow(Axis::Y, 0.5 * tau, params, Ay);

  for (long k = 1; k <= time.M; ++k) {
    state = strang_step(state, Bx, By, tau, params, F, fn_substeps);
    if (!is_finite(state.P) || !is_finite(state.Q)) throw BlowUpError(k, time.t(k));
    if (observer) observer(k, time.t(k), state);
  }
  return state;
}

}  // namespace dlrwave

#endif
