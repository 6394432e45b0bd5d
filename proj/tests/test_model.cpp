#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dlrwave/model.hpp"
#include "dlrwave/presets.hpp"
#include "support/oracles.hpp"

using dlrwave::GridSpec;
using dlrwave::Matrix;
using dlrwave::build_laplacian_1d;

TEST_CASE("laplacian stencil scaling") {
  const Matrix a = build_laplacian_1d(3, 0.25);
  Matrix want(3, 3);
  want << 2, -1, 0, -1, 2, -1, 0, -1, 2;
  want *= 16.0;
  CHECK((a - want).norm() == 0.0);

  CHECK(build_laplacian_1d(1, 1.0)(0, 0) == 2.0);
  CHECK_THROWS_AS(build_laplacian_1d(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_laplacian_1d(3, 0.0), std::invalid_argument);
}

TEST_CASE("laplacian eigenvalues, closed form") {
  const Matrix a = build_laplacian_1d(3, 1.0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  const double s2 = std::sqrt(2.0);
  CHECK(es.eigenvalues()(0) == Catch::Approx(2.0 - s2).margin(1e-12));
  CHECK(es.eigenvalues()(1) == Catch::Approx(2.0).margin(1e-12));
  CHECK(es.eigenvalues()(2) == Catch::Approx(2.0 + s2).margin(1e-12));
}

TEST_CASE("laplacian symmetry, definiteness and sine eigenvectors") {
  for (int n : {1, 2, 5, 16, 64}) {
    const double h = 1.0 / (n + 1);
    const Matrix a = build_laplacian_1d(n, h);
    CHECK((a - a.transpose()).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    CHECK(es.eigenvalues()(0) > 0.0);

    for (int k = 1; k <= n; ++k) {
      Eigen::VectorXd v(n);
      for (int i = 1; i <= n; ++i) v(i - 1) = std::sin(i * k * M_PI / (n + 1));
      const double mu = oracles::mode_eigenvalue(k, n, h);
      CHECK((a * v - mu * v).norm() <= 1e-10 * std::max(1.0, mu * v.norm()));
    }
  }
}

TEST_CASE("nonlinearity registry") {
  using dlrwave::make_nonlinear;
  const auto fs = make_nonlinear("square", "sin");
  Matrix P(1, 1), Q(1, 1);
  P << 2.0;
  Q << 0.0;
  CHECK(dlrwave::apply_nonlinear(fs, P, Q)(0, 0) == 4.0);

  const auto fc = make_nonlinear("cube", "zero");
  P << -2.0;
  CHECK(dlrwave::apply_nonlinear(fc, P, Q)(0, 0) == -8.0);
  CHECK(fc.g_is_zero);

  const auto fl = make_nonlinear("logistic", "zero");
  P << 0.5;
  CHECK(dlrwave::apply_nonlinear(fl, P, Q)(0, 0) == 0.25);

  const auto fa = make_nonlinear("abs_sin", "zero");
  P << -1.0;
  CHECK(dlrwave::apply_nonlinear(fa, P, Q)(0, 0) == Catch::Approx(std::sin(1.0)));

  CHECK_THROWS_AS(make_nonlinear("tanh", "zero"), std::invalid_argument);

  // locality: one input entry feeds exactly one output entry
  Matrix p2 = Matrix::Zero(3, 3);
  const auto sq = make_nonlinear("square", "zero");
  Matrix base = dlrwave::apply_nonlinear(sq, p2, p2);
  p2(1, 2) = 3.0;
  Matrix bumped = dlrwave::apply_nonlinear(sq, p2, p2);
  CHECK((bumped - base).cwiseAbs().sum() == 9.0);
  CHECK(bumped(1, 2) == 9.0);

  // shape check only bites when g is live
  Matrix qbad(2, 2);
  CHECK_THROWS_AS(dlrwave::apply_nonlinear(fs, P, qbad), std::invalid_argument);
  CHECK_NOTHROW(dlrwave::apply_nonlinear(fc, P, qbad));
}

TEST_CASE("params validation") {
  dlrwave::ModelParams p;
  CHECK_NOTHROW(p.validate());
  p.w3 = 0.5;  // sum now exceeds 1
  CHECK_THROWS_WITH(p.validate(), Catch::Matchers::ContainsSubstring("sum to 1"));
  p = {};
  p.alpha = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.beta = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("sample_initial example1 values") {
  const GridSpec grid{0.0, 1.0, 0.0, 1.0, 6, 6};
  const auto state = dlrwave::sample_initial(grid, "example1");
  // node (1,1) sits at (1/6, 1/6) where 3 pi x = pi/2
  CHECK(state.P(0, 0) == Catch::Approx(2.0).margin(1e-13));
  CHECK(state.Q(0, 0) == Catch::Approx(-1.0).margin(1e-13));
  CHECK(state.P.rows() == 5);
  CHECK(state.P.cols() == 5);
}

TEST_CASE("sample_initial flower indicator at origin") {
  // place a node exactly on the origin: [-3,3] with even N
  const GridSpec grid{-3.0, 3.0, -3.0, 3.0, 6, 6};
  const auto& preset = dlrwave::find_preset("flower");
  CHECK(preset.p(0.0, 0.0) == Catch::Approx(0.1).margin(1e-15));
  CHECK(preset.q(0.0, 0.0) == Catch::Approx(0.05).margin(1e-15));
  const auto state = dlrwave::sample_initial(grid, preset);
  CHECK(state.P(2, 2) == Catch::Approx(0.1).margin(1e-15));
}

TEST_CASE("preset catalog covers the named problems") {
  for (const char* name : {"example1", "example2", "flower", "cardioid", "astroid"})
    CHECK_NOTHROW(dlrwave::find_preset(name));
  CHECK_THROWS_AS(dlrwave::find_preset("example3"), std::invalid_argument);

  // astroid even-power convention: region symmetric in all quadrants
  // (|0.2|^(2/3) * 2 = 0.684 <= 0.7^(2/3) = 0.788, so (0.2, 0.2) is inside)
  const auto& astroid = dlrwave::find_preset("astroid");
  CHECK(astroid.p(0.2, 0.2) == astroid.p(-0.2, 0.2));
  CHECK(astroid.p(0.2, 0.2) == astroid.p(0.2, -0.2));
  CHECK(astroid.p(0.2, 0.2) < 0.0);
  CHECK(astroid.p(0.9, 0.9) == 0.0);

  // cardioid region includes a left-of-origin lobe and excludes the far field
  const auto& cardioid = dlrwave::find_preset("cardioid");
  CHECK(cardioid.p(-1.0, 0.0) > 0.0);
  CHECK(cardioid.p(0.4, 1.2) == 0.0);
}

TEST_CASE("sample_initial custom zero datum") {
  const GridSpec grid{0.0, 1.0, 0.0, 1.0, 4, 4};
  auto zero = [](double, double) { return 0.0; };
  const auto state = dlrwave::sample_initial(grid, zero, zero);
  CHECK(state.P.norm() == 0.0);
  CHECK(state.Q.norm() == 0.0);
}

TEST_CASE("separable datum samples to a numerically rank-1 matrix") {
  const GridSpec grid{0.0, 1.0, 0.0, 1.0, 32, 32};
  auto p = [](double x, double y) { return std::sin(2.0 * x + 0.3) * std::exp(-y); };
  auto q = [](double, double) { return 0.0; };
  const auto state = dlrwave::sample_initial(grid, p, q);
  Eigen::BDCSVD<Matrix> svd(state.P);
  CHECK(svd.singularValues()(1) < 1e-12 * svd.singularValues()(0));
}

TEST_CASE("semidiscrete_rhs hand stencil") {
  dlrwave::ModelParams params;
  params.alpha = 1.0;
  const auto F = dlrwave::make_nonlinear("zero", "zero");
  const Matrix Ax = build_laplacian_1d(1, 0.5);
  const Matrix Ay = build_laplacian_1d(1, 0.5);
  dlrwave::PairState s;
  s.P = Matrix::Constant(1, 1, 1.0);
  s.Q = Matrix::Zero(1, 1);
  const auto rhs = dlrwave::semidiscrete_rhs(s, params, Ax, Ay, F);
  CHECK(rhs.P(0, 0) == 0.0);
  CHECK(rhs.Q(0, 0) == -16.0);

  dlrwave::PairState zero;
  zero.P = Matrix::Zero(1, 1);
  zero.Q = Matrix::Zero(1, 1);
  const auto rhs0 = dlrwave::semidiscrete_rhs(zero, params, Ax, Ay, F);
  CHECK(rhs0.P.norm() == 0.0);
  CHECK(rhs0.Q.norm() == 0.0);
}

TEST_CASE("semidiscrete_rhs single Fourier mode") {
  const int N = 8, n = N - 1;
  const double h = 1.0 / N;
  dlrwave::ModelParams params;
  params.alpha = 1.3;
  params.delta = 0.7;
  const auto F = dlrwave::make_nonlinear("zero", "zero");
  const Matrix Ax = build_laplacian_1d(n, h);
  const Matrix Ay = build_laplacian_1d(n, h);

  const int k = 2;
  Eigen::VectorXd v(n);
  for (int i = 1; i <= n; ++i) v(i - 1) = std::sin(i * k * M_PI / N);
  dlrwave::PairState s;
  s.P = v * v.transpose();
  s.Q = Matrix::Zero(n, n);
  const double mu = 2.0 * oracles::mode_eigenvalue(k, n, h);  // x and y parts
  const auto rhs = dlrwave::semidiscrete_rhs(s, params, Ax, Ay, F);
  CHECK((rhs.Q + (params.alpha * mu + params.delta) * s.P).norm() <= 1e-10 * s.P.norm());
}
