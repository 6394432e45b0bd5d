#ifndef DLRWAVE_MODEL_HPP
#define DLRWAVE_MODEL_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "dlrwave/grid.hpp"
#include "dlrwave/linalg.hpp"

namespace dlrwave {

// Coefficients of  u_tt + gamma u_t + delta u = Lap(alpha u + beta u_t)
//                  + f(u) + g(u_t)
// plus the positive splitting weights w1 + w2 + w3 = 1 that distribute the
// drift term u_t between the three subflows.
struct ModelParams {
  double alpha = 1.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  double w1 = 1.0 / 3.0, w2 = 1.0 / 3.0, w3 = 1.0 / 3.0;
  std::string f_kind = "zero";
  std::string g_kind = "zero";

  void validate() const {
    if (!(alpha > 0)) throw std::invalid_argument("params: alpha must be positive");
    if (beta < 0 || gamma < 0 || delta < 0)
      throw std::invalid_argument("params: beta, gamma, delta must be nonnegative");
    if (!(w1 > 0 && w2 > 0 && w3 > 0))
      throw std::invalid_argument("params: weights must be positive");
    if (std::abs(w1 + w2 + w3 - 1.0) > 1e-12)
      throw std::invalid_argument("params: weights must sum to 1");
  }
};

using ScalarMap = std::function<double(double)>;

// Entrywise nonlinearity F(P, Q) = f(P) + g(Q). The registry below is closed;
// arbitrary maps enter only through the custom hook.
struct NonlinearPair {
  ScalarMap f;
  ScalarMap g;
  bool g_is_zero = true;
};

inline ScalarMap nonlinear_map(const std::string& kind) {
  if (kind == "zero") return [](double) { return 0.0; };
  if (kind == "square") return [](double u) { return u * u; };
  if (kind == "cube") return [](double u) { return u * u * u; };
  if (kind == "sin") return [](double u) { return std::sin(u); };
  if (kind == "logistic") return [](double u) { return u * (1.0 - u); };
  if (kind == "abs_sin") return [](double u) { return std::abs(std::sin(u)); };
  throw std::invalid_argument("unknown nonlinearity: " + kind);
}

inline NonlinearPair make_nonlinear(const std::string& f_kind, const std::string& g_kind) {
  NonlinearPair out;
  out.f = nonlinear_map(f_kind);
  out.g = nonlinear_map(g_kind);
  out.g_is_zero = (g_kind == "zero");
  return out;
}

inline NonlinearPair make_nonlinear(const ModelParams& params) {
  return make_nonlinear(params.f_kind, params.g_kind);
}

// Interior samples of displacement and velocity.
struct PairState {
  Matrix P;
  Matrix Q;
};

// 1D Dirichlet Laplacian (1/h^2) tridiag(-1, 2, -1), symmetric positive
// definite.
inline Matrix build_laplacian_1d(int n, double h) {
  if (n < 1) throw std::invalid_argument("laplacian: n must be at least 1");
  if (!(h > 0)) throw std::invalid_argument("laplacian: h must be positive");
  const double c = 1.0 / (h * h);
  Matrix a = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = 2.0 * c;
    if (i + 1 < n) {
      a(i, i + 1) = -c;
      a(i + 1, i) = -c;
    }
  }
  return a;
}

inline Matrix apply_nonlinear(const NonlinearPair& F, const Matrix& P, const Matrix& Q) {
  Matrix out = P.unaryExpr(F.f);
  if (!F.g_is_zero) {
    if (Q.rows() != P.rows() || Q.cols() != P.cols())
      throw std::invalid_argument("apply_nonlinear: P and Q shapes differ");
    out += Q.unaryExpr(F.g);
  }
  return out;
}

// Right-hand side of the semi-discrete first-order system
//   P' = Q
//   Q' = -alpha (Ax P + P Ay) - beta (Ax Q + Q Ay) - delta P - gamma Q + F(P, Q).
// Used by diagnostics and test oracles only; the time steppers advance by the
// split flows instead.
inline PairState semidiscrete_rhs(const PairState& state, const ModelParams& params,
                                  const Matrix& Ax, const Matrix& Ay,
                                  const NonlinearPair& F) {
  const Matrix& P = state.P;
  const Matrix& Q = state.Q;
  if (Ax.rows() != P.rows() || Ay.rows() != P.cols() || Q.rows() != P.rows() ||
      Q.cols() != P.cols())
    throw std::invalid_argument("semidiscrete_rhs: operator/state shape mismatch");

  PairState out;
  out.P = Q;
  out.Q = -params.alpha * (Ax * P + P * Ay) - params.beta * (Ax * Q + Q * Ay) -
          params.delta * P - params.gamma * Q + apply_nonlinear(F, P, Q);
  return out;
}

}  // namespace dlrwave

#endif
