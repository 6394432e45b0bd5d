#ifndef DLRWAVE_PRESETS_HPP
#define DLRWAVE_PRESETS_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dlrwave/grid.hpp"
#include "dlrwave/model.hpp"

namespace dlrwave {

using DatumFn = std::function<double(double, double)>;

// A named experiment setup: domain, coefficients, nonlinearities, final time
// and the initial data u(.,.,0) = p, u_t(.,.,0) = q.
struct ProblemPreset {
  std::string name;
  double x_lo, x_hi, y_lo, y_hi;
  double T;
  ModelParams params;
  DatumFn p;
  DatumFn q;
};

namespace detail {

inline double sine_mode(double x, double y) {
  return std::sin(3.0 * M_PI * x) * std::sin(3.0 * M_PI * y);
}

inline double flower_p(double x, double y) {
  // 5-petal rose r = sin(5 theta) + 1.5; atan2 keeps the angle defined on the
  // whole plane, including the x = 0 axis.
  const double rb = std::sin(5.0 * std::atan2(y, x)) + 1.5;
  return (x * x + y * y <= rb * rb) ? 0.1 * (x * x + y * y + 1.0) : 0.0;
}

inline double cardioid_p(double x, double y) {
  const double s = x * x + y * y;
  return (s + x <= std::sqrt(s)) ? 0.15 * std::exp(-(s + x) * (s + x) + s) : 0.0;
}

inline double astroid_p(double x, double y) {
  // x^(2/3) read as |x|^(2/3) so the region covers all four quadrants
  const double c = std::cbrt(x * x) + std::cbrt(y * y);
  return (c <= std::cbrt(0.7 * 0.7)) ? -(c + 0.1) : 0.0;
}

}  // namespace detail

inline const std::vector<ProblemPreset>& problem_presets() {
  static const std::vector<ProblemPreset> presets = [] {
    std::vector<ProblemPreset> v;

    ProblemPreset e1;
    e1.name = "example1";
    e1.x_lo = 0.0; e1.x_hi = 1.0; e1.y_lo = 0.0; e1.y_hi = 1.0;
    e1.T = 0.1;
    e1.params = {1.0, 0.1, 0.001, 1.0, 0.98, 0.01, 0.01, "square", "sin"};
    e1.p = [](double x, double y) { return 2.0 * detail::sine_mode(x, y); };
    e1.q = [](double x, double y) { return -detail::sine_mode(x, y); };
    v.push_back(e1);

    ProblemPreset e2;
    e2.name = "example2";
    e2.x_lo = 0.0; e2.x_hi = 1.0; e2.y_lo = 0.0; e2.y_hi = 1.0;
    e2.T = 1.0;
    e2.params = {1.0, 0.001, 1e-6, 1.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, "cube", "zero"};
    e2.p = [](double x, double y) { return 10.0 * detail::sine_mode(x, y); };
    e2.q = [](double x, double y) {
      return -10.0 * std::cos(3.0 * M_PI * x) * std::cos(3.0 * M_PI * y);
    };
    v.push_back(e2);

    ProblemPreset flower;
    flower.name = "flower";
    flower.x_lo = -3.0; flower.x_hi = 3.0; flower.y_lo = -3.0; flower.y_hi = 3.0;
    flower.T = 3.0;
    flower.params = {0.6, 0.3, 0.05, 0.0, 0.98, 0.01, 0.01, "square", "zero"};
    flower.p = detail::flower_p;
    flower.q = [](double x, double y) { return 0.5 * detail::flower_p(x, y); };
    v.push_back(flower);

    ProblemPreset cardioid;
    cardioid.name = "cardioid";
    cardioid.x_lo = -2.5; cardioid.x_hi = 0.5; cardioid.y_lo = -1.5; cardioid.y_hi = 1.5;
    cardioid.T = 3.0;
    cardioid.params = {0.6, 0.3, 0.05, 0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0,
                       "logistic", "zero"};
    cardioid.p = detail::cardioid_p;
    cardioid.q = [](double x, double y) { return -0.25 * detail::cardioid_p(x, y); };
    v.push_back(cardioid);

    ProblemPreset astroid;
    astroid.name = "astroid";
    astroid.x_lo = -1.0; astroid.x_hi = 1.0; astroid.y_lo = -1.0; astroid.y_hi = 1.0;
    astroid.T = 3.0;
    astroid.params = {0.6, 0.3, 0.05, 0.0, 0.98, 0.01, 0.01, "abs_sin", "zero"};
    astroid.p = detail::astroid_p;
    astroid.q = [](double x, double y) { return 10.0 * detail::astroid_p(x, y); };
    v.push_back(astroid);

    return v;
  }();
  return presets;
}

inline const ProblemPreset& find_preset(const std::string& name) {
  for (const auto& p : problem_presets())
    if (p.name == name) return p;
  throw std::invalid_argument("unknown preset: " + name);
}

// Sample the initial datum on the interior nodes; boundary values are zero by
// the Dirichlet condition and are never stored.
inline PairState sample_initial(const GridSpec& grid, const DatumFn& p, const DatumFn& q) {
  grid.validate();
  const int m = grid.interior_x();
  const int n = grid.interior_y();
  PairState out;
  out.P.resize(m, n);
  out.Q.resize(m, n);
  for (int i = 1; i <= m; ++i) {
    for (int j = 1; j <= n; ++j) {
      out.P(i - 1, j - 1) = p(grid.x(i), grid.y(j));
      out.Q(i - 1, j - 1) = q(grid.x(i), grid.y(j));
    }
  }
  if (!is_finite(out.P) || !is_finite(out.Q))
    throw std::invalid_argument("sample_initial: datum produced non-finite values");
  return out;
}

inline PairState sample_initial(const GridSpec& grid, const ProblemPreset& preset) {
  return sample_initial(grid, preset.p, preset.q);
}

inline PairState sample_initial(const GridSpec& grid, const std::string& preset_name) {
  return sample_initial(grid, find_preset(preset_name));
}

}  // namespace dlrwave

#endif
