#ifndef DLRWAVE_LOW_RANK_HPP
#define DLRWAVE_LOW_RANK_HPP

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "dlrwave/flows.hpp"
#include "dlrwave/grid.hpp"
#include "dlrwave/linalg.hpp"
#include "dlrwave/model.hpp"

namespace dlrwave {

// Fixed-rank state: displacement P = U S V^T at rank r_P and velocity
// Q = R Sigma W^T at rank r_Q. Every public operation returns factors with
// orthonormal outer matrices and unchanged ranks.
struct LowRankPair {
  LowRankFactor P;
  LowRankFactor Q;
};

inline LowRankPair truncate_state(const PairState& state, Index rank_p, Index rank_q) {
  return {truncated_svd(state.P, rank_p), truncated_svd(state.Q, rank_q)};
}

inline PairState densify(const LowRankPair& pair) {
  return {pair.P.dense(), pair.Q.dense()};
}

// Sum of low-rank products  sum_i  L_i C_i R_i^T, kept factored so the m x n
// matrix it represents is never formed. Only its actions on thin matrices are
// needed by the retruncation step.
struct FactoredSum {
  struct Term {
    Matrix left;   // m x r_i
    Matrix core;   // r_i x r_i
    Matrix right;  // n x r_i
  };
  Index rows = 0, cols = 0;
  std::vector<Term> terms;

  void add(Matrix left, Matrix core, Matrix right) {
    if (terms.empty()) {
      rows = left.rows();
      cols = right.rows();
    } else if (left.rows() != rows || right.rows() != cols) {
      throw std::invalid_argument("FactoredSum: outer dimensions differ between terms");
    }
    terms.push_back({std::move(left), std::move(core), std::move(right)});
  }

  // (sum_i L_i C_i R_i^T) X
  Matrix apply(const Matrix& x) const {
    if (x.rows() != cols) throw std::invalid_argument("FactoredSum: apply shape mismatch");
    Matrix out = Matrix::Zero(rows, x.cols());
    for (const auto& t : terms) out.noalias() += t.left * (t.core * (t.right.transpose() * x));
    return out;
  }

  // (sum_i L_i C_i R_i^T)^T X
  Matrix apply_transpose(const Matrix& x) const {
    if (x.rows() != rows)
      throw std::invalid_argument("FactoredSum: apply_transpose shape mismatch");
    Matrix out = Matrix::Zero(cols, x.cols());
    for (const auto& t : terms)
      out.noalias() += t.right * (t.core.transpose() * (t.left.transpose() * x));
    return out;
  }

  // debug/oracle path only
  Matrix dense() const {
    Matrix out = Matrix::Zero(rows, cols);
    for (const auto& t : terms) out.noalias() += t.left * t.core * t.right.transpose();
    return out;
  }
};

// Retruncate the exact-flow image Delta back onto the rank-r manifold:
//   K = Delta V0,        QR ->  U1 (first core discarded)
//   L = Delta^T U1,      QR ->  V1, S1^T
// so the result is U1 U1^T Delta, the projection onto the updated range.
inline LowRankFactor dlr_retruncate(const Matrix& V0, const FactoredSum& delta) {
  const Index r = V0.cols();
  if (V0.rows() != delta.cols)
    throw std::invalid_argument("dlr_retruncate: basis/delta shape mismatch");
  if (r > std::min(delta.rows, delta.cols))
    throw std::invalid_argument("dlr_retruncate: rank exceeds matrix dimensions");

  const QRPair first = thin_qr(delta.apply(V0));
  const QRPair second = thin_qr(delta.apply_transpose(first.Q));
  LowRankFactor out;
  out.U = first.Q;
  out.S = second.R.transpose();
  out.V = second.Q;
  return out;
}

// Low-rank x subflow: push both factors through the stacked left action
//   [Delta1; Delta2] = B [P; Q]
// without densifying, then retruncate each Delta at its own rank.
inline LowRankPair lowrank_flow_x(const LowRankPair& pair, const FlowOperator& B) {
  if (B.direction != Axis::X) throw std::invalid_argument("lowrank_flow_x: wrong direction");
  if (pair.P.U.rows() != B.n) throw std::invalid_argument("lowrank_flow_x: shape mismatch");

  FactoredSum delta1, delta2;
  delta1.add(B.B11() * pair.P.U, pair.P.S, pair.P.V);
  delta1.add(B.B12() * pair.Q.U, pair.Q.S, pair.Q.V);
  delta2.add(B.B21() * pair.P.U, pair.P.S, pair.P.V);
  delta2.add(B.B22() * pair.Q.U, pair.Q.S, pair.Q.V);

  return {dlr_retruncate(pair.P.V, delta1), dlr_retruncate(pair.Q.V, delta2)};
}

// Mirror image for the right action [Delta1 Delta2] = [P Q] B.
inline LowRankPair lowrank_flow_y(const LowRankPair& pair, const FlowOperator& B) {
  if (B.direction != Axis::Y) throw std::invalid_argument("lowrank_flow_y: wrong direction");
  if (pair.P.V.rows() != B.n) throw std::invalid_argument("lowrank_flow_y: shape mismatch");

  FactoredSum delta1, delta2;
  delta1.add(pair.P.U, pair.P.S, B.B11().transpose() * pair.P.V);
  delta1.add(pair.Q.U, pair.Q.S, B.B21().transpose() * pair.Q.V);
  delta2.add(pair.P.U, pair.P.S, B.B12().transpose() * pair.P.V);
  delta2.add(pair.Q.U, pair.Q.S, B.B22().transpose() * pair.Q.V);

  return {dlr_retruncate(pair.P.V, delta1), dlr_retruncate(pair.Q.V, delta2)};
}

// Projector-splitting K/S/L update of the displacement factors for the exact
// drift increment DeltaP = tau w R0 Sigma0 W0^T, which never leaves factored
// form. The core correction subtracts the projected increment, so the step
// reproduces P0 + DeltaP exactly whenever that sum stays on the manifold.
inline LowRankFactor dlr_fl(const LowRankPair& pair, double tau, double omega) {
  const LowRankFactor& p = pair.P;
  const LowRankFactor& q = pair.Q;
  if (p.U.rows() != q.U.rows() || p.V.rows() != q.V.rows())
    throw std::invalid_argument("dlr_fl: factor shape mismatch");

  const double scale = tau * omega;
  const Matrix delta_k = scale * (q.U * (q.S * (q.V.transpose() * p.V)));
  const QRPair k_qr = thin_qr(p.U * p.S + delta_k);
  const Matrix& U1 = k_qr.Q;
  const Matrix s_hat = k_qr.R - U1.transpose() * delta_k;
  const Matrix L1 = p.V * s_hat.transpose() + scale * (q.V * (q.S.transpose() * (q.U.transpose() * U1)));
  const QRPair l_qr = thin_qr(L1);

  LowRankFactor out;
  out.U = U1;
  out.S = l_qr.R.transpose();
  out.V = l_qr.Q;
  return out;
}

namespace detail {

// Classical 4th-order solve of a matrix ODE with a frozen right-hand-side
// structure; shared by the K/S/L stages below.
template <class Rhs>
Matrix rk4_solve(Matrix y, double tau, int substeps, const Rhs& rhs) {
  const double h = tau / substeps;
  for (int s = 0; s < substeps; ++s) {
    const Matrix k1 = rhs(y);
    const Matrix k2 = rhs(y + 0.5 * h * k1);
    const Matrix k3 = rhs(y + 0.5 * h * k2);
    const Matrix k4 = rhs(y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

}  // namespace detail

// Projector-splitting update of the velocity factors under the frozen-P
// vector field Q' = F(P0, Q) = f(P0) + g(Q).
//
// f acts entrywise, so f(U S V^T) has no factored shortcut: the dense f(P0)
// is formed once and immediately contracted against the thin bases.
//
// With g = 0 the field is constant in Q and all three stages close in exact
// arithmetic (K adds the increment, S subtracts its projection, L adds the
// co-range part). Otherwise each stage is a 4th-order ODE solve; the core
// stage integrates the sign-reversed projected field
//   Sigma' = -R1^T F(P0, R1 Sigma W0^T) W0,
// which reduces to the constant-field formula when g vanishes.
inline LowRankFactor dlr_fn(const LowRankPair& pair, const NonlinearPair& F, double tau,
                            int substeps = 1) {
  const LowRankFactor& q = pair.Q;
  const Matrix fP = pair.P.dense().unaryExpr(F.f);
  if (fP.rows() != q.U.rows() || fP.cols() != q.V.rows())
    throw std::invalid_argument("dlr_fn: factor shape mismatch");

  Matrix R1, sigma_hat;

  if (F.g_is_zero) {
    const Matrix delta_k = tau * (fP * q.V);
    const QRPair k_qr = thin_qr(q.U * q.S + delta_k);
    R1 = k_qr.Q;
    sigma_hat = k_qr.R - R1.transpose() * delta_k;
    const QRPair l_qr = thin_qr(q.V * sigma_hat.transpose() + tau * (fP.transpose() * R1));
    return {R1, l_qr.R.transpose(), l_qr.Q, false};
  }

  const Matrix fPW = fP * q.V;  // constant part of the K field
  const Matrix K1 = detail::rk4_solve(
      Matrix(q.U * q.S), tau, substeps,
      [&](const Matrix& k) -> Matrix { return fPW + (k * q.V.transpose()).unaryExpr(F.g) * q.V; });
  const QRPair k_qr = thin_qr(K1);
  R1 = k_qr.Q;

  const Matrix proj_f = R1.transpose() * fPW;  // r x r, constant part of the core field
  sigma_hat = detail::rk4_solve(
      k_qr.R, tau, substeps, [&](const Matrix& s) -> Matrix {
        return -(proj_f + R1.transpose() * ((R1 * s * q.V.transpose()).unaryExpr(F.g) * q.V));
      });

  const Matrix fPtR = fP.transpose() * R1;  // constant part of the L field
  const Matrix L1 = detail::rk4_solve(
      Matrix(q.V * sigma_hat.transpose()), tau, substeps, [&](const Matrix& l) -> Matrix {
        return fPtR + (R1 * l.transpose()).unaryExpr(F.g).transpose() * R1;
      });
  const QRPair l_qr = thin_qr(L1);
  return {R1, l_qr.R.transpose(), l_qr.Q, false};
}

// Strang composition of the nonlinear subflow on the manifold: half a
// velocity update, the full drift of the displacement against the half-time
// velocity, then the second velocity half against the new displacement.
inline LowRankPair lowrank_flow_F(const LowRankPair& pair, double tau, double omega3,
                                  const NonlinearPair& F, int fn_substeps = 1) {
  if (tau < 0) throw std::invalid_argument("lowrank_flow_F: step must be nonnegative");
  const LowRankFactor q_half = dlr_fn(pair, F, 0.5 * tau, fn_substeps);
  const LowRankFactor p_new = dlr_fl({pair.P, q_half}, tau, omega3);
  const LowRankFactor q_new = dlr_fn({p_new, q_half}, F, 0.5 * tau, fn_substeps);
  return {p_new, q_new};
}

// One step of the fixed-rank splitting
//   x(tau/2) -> y(tau/2) -> F(tau) -> y(tau/2) -> x(tau/2).
inline LowRankPair lowrank_strang_step(const LowRankPair& pair, const FlowOperator& Bx_half,
                                       const FlowOperator& By_half, double tau,
                                       const ModelParams& params, const NonlinearPair& F,
                                       int fn_substeps = 1) {
  if (std::abs(Bx_half.step - 0.5 * tau) > 1e-12 * std::max(1.0, tau) ||
      std::abs(By_half.step - 0.5 * tau) > 1e-12 * std::max(1.0, tau))
    throw std::invalid_argument("lowrank_strang_step: flows must be built with step tau/2");
  LowRankPair s = lowrank_flow_x(pair, Bx_half);
  s = lowrank_flow_y(s, By_half);
  s = lowrank_flow_F(s, tau, params.w3, F, fn_substeps);
  s = lowrank_flow_y(s, By_half);
  return lowrank_flow_x(s, Bx_half);
}

using LowRankObserver = std::function<void(long k, double t, const LowRankPair&)>;

namespace detail {

inline bool factors_finite(const LowRankPair& pair) {
  return is_finite(pair.P.U) && is_finite(pair.P.S) && is_finite(pair.P.V) &&
         is_finite(pair.Q.U) && is_finite(pair.Q.S) && is_finite(pair.Q.V);
}

}  // namespace detail

// March the fixed-rank scheme over the whole time grid. pair0 is expected to
// come from truncate_state on the sampled initial data.
inline LowRankPair lowrank_integrate(const LowRankPair& pair0, const GridSpec& grid,
                                     const TimeGrid& time, const ModelParams& params,
                                     const NonlinearPair& F, int fn_substeps = 1,
                                     const LowRankObserver& observer = nullptr) {
  grid.validate();
  params.validate();
  if (time.M < 0) throw std::invalid_argument("integrate: M must be nonnegative");
  if (pair0.P.U.rows() != grid.interior_x() || pair0.P.V.rows() != grid.interior_y())
    throw std::invalid_argument("integrate: factors do not match grid");

  LowRankPair pair = pair0;
  if (observer) observer(0, 0.0, pair);
  if (time.M == 0) return pair;

  const double tau = time.tau();
  const Matrix Ax = build_laplacian_1d(grid.interior_x(), grid.hx());
  const Matrix Ay = build_laplacian_1d(grid.interior_y(), grid.hy());
  const FlowOperator Bx = build_flow(Axis::X, 0.5 * tau, params, Ax);
  const FlowOperator By = build_flow(Axis::Y, 0.5 * tau, params, Ay);

  for (long k = 1; k <= time.M; ++k) {
    pair = lowrank_strang_step(pair, Bx, By, tau, params, F, fn_substeps);
    if (!detail::factors_finite(pair)) throw BlowUpError(k, time.t(k));
    if (observer) observer(k, time.t(k), pair);
  }
  return pair;
}

}  // namespace dlrwave

#endif
