#ifndef DLRWAVE_LINALG_HPP
#define DLRWAVE_LINALG_HPP

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dlrwave {

using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline bool is_finite(const Matrix& a) { return a.allFinite(); }

inline double frobenius(const Matrix& a) { return a.norm(); }

// Thin QR of a tall matrix, Q m-by-r orthonormal, R r-by-r upper triangular.
// The diagonal of R is made nonnegative so the factorization is unique for
// full-column-rank input and bit-reproducible across calls.
struct QRPair {
  Matrix Q;
  Matrix R;
  bool degenerate = false;  // some |R(i,i)| fell below 1e-14 * ||A||_F
};

inline QRPair thin_qr(const Matrix& a) {
  const Index m = a.rows();
  const Index r = a.cols();
  if (m < r) throw std::invalid_argument("thin_qr: need rows >= cols");

  Eigen::HouseholderQR<Matrix> qr(a);
  QRPair out;
  out.Q = qr.householderQ() * Matrix::Identity(m, r);
  out.R = Matrix(qr.matrixQR().topRows(r).triangularView<Eigen::Upper>());

  const double tol = 1e-14 * a.norm();
  for (Index i = 0; i < r; ++i) {
    if (out.R(i, i) < 0.0) {
      out.R.row(i) = -out.R.row(i);
      out.Q.col(i) = -out.Q.col(i);
    }
    if (std::abs(out.R(i, i)) <= tol) out.degenerate = true;
  }
  return out;
}

// Rank-r factorization Y = U S V^T with orthonormal U, V. S is square and
// invertible in exact arithmetic but is not required to be diagonal; the DLR
// steps below fill it with general small matrices.
struct LowRankFactor {
  Matrix U;  // m x r
  Matrix S;  // r x r
  Matrix V;  // n x r
  bool core_singular = false;  // smallest singular value of S below 1e-14 * largest

  Index rank() const { return S.rows(); }
  Matrix dense() const { return U * S * V.transpose(); }
};

// Best rank-r approximation in Frobenius norm; S comes back diagonal with the
// r largest singular values in nonincreasing order.
inline LowRankFactor truncated_svd(const Matrix& a, Index r) {
  if (r < 1 || r > std::min(a.rows(), a.cols()))
    throw std::invalid_argument("truncated_svd: rank out of range");

  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  LowRankFactor out;
  out.U = svd.matrixU().leftCols(r);
  out.V = svd.matrixV().leftCols(r);
  out.S = Matrix(svd.singularValues().head(r).asDiagonal());
  out.core_singular = out.S(r - 1, r - 1) <= 1e-14 * out.S(0, 0);
  return out;
}

// Matrix exponential e^A, scaling-and-squaring with Pade approximants.
inline Matrix expm(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("expm: matrix must be square");
  if (!is_finite(a)) throw std::invalid_argument("expm: non-finite entries");
  return a.exp();
}

// Closed-form exponential of a real 2x2 matrix via
//   exp(M) = e^s (phi0 I + phi1 (M - s I)),  s = tr(M)/2,
// where phi0/phi1 are cosh/sinhc of q, q^2 = ((m11-m22)/2)^2 + m12 m21.
// Works for real, complex-conjugate and defective eigenvalue pairs alike.
inline Eigen::Matrix2d expm_2x2(const Eigen::Matrix2d& m) {
  const double s = 0.5 * (m(0, 0) + m(1, 1));
  const double d = 0.5 * (m(0, 0) - m(1, 1));
  const double q2 = d * d + m(0, 1) * m(1, 0);

  double phi0, phi1;
  if (std::abs(q2) < 1e-8) {
    // series in q^2, next term is q^6/720 -- far below double roundoff here
    phi0 = 1.0 + q2 / 2.0 + q2 * q2 / 24.0;
    phi1 = 1.0 + q2 / 6.0 + q2 * q2 / 120.0;
  } else if (q2 > 0.0) {
    const double q = std::sqrt(q2);
    phi0 = std::cosh(q);
    phi1 = std::sinh(q) / q;
  } else {
    const double w = std::sqrt(-q2);
    phi0 = std::cos(w);
    phi1 = std::sin(w) / w;
  }

  Eigen::Matrix2d out = phi1 * m;
  out(0, 0) += phi0 - phi1 * s;
  out(1, 1) += phi0 - phi1 * s;
  return std::exp(s) * out;
}

}  // namespace dlrwave

#endif
