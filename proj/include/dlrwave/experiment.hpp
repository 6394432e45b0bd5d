#ifndef DLRWAVE_EXPERIMENT_HPP
#define DLRWAVE_EXPERIMENT_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dlrwave/flows.hpp"
#include "dlrwave/grid.hpp"
#include "dlrwave/io.hpp"
#include "dlrwave/low_rank.hpp"
#include "dlrwave/model.hpp"
#include "dlrwave/presets.hpp"

namespace dlrwave {

// Full description of one experiment: problem preset, mesh, tested step
// counts and ranks, and the reference-solution policy.
struct ExperimentConfig {
  std::string preset;
  GridSpec grid;
  double T;
  std::vector<long> M_list;
  std::vector<int> ranks;
  ModelParams params;
  int reference_multiplier = 16;
  int fn_substeps = 1;
  std::filesystem::path cache_dir = ".dlrwave-cache";

  void validate() const {
    grid.validate();
    params.validate();
    find_preset(preset);
    if (!(T > 0)) throw std::invalid_argument("config: T must be positive");
    if (M_list.empty()) throw std::invalid_argument("config: M_list must be nonempty");
    for (std::size_t i = 0; i < M_list.size(); ++i) {
      if (M_list[i] < 1) throw std::invalid_argument("config: M values must be positive");
      if (i && M_list[i] <= M_list[i - 1])
        throw std::invalid_argument("config: M values must be strictly increasing");
    }
    if (ranks.empty()) throw std::invalid_argument("config: ranks must be nonempty");
    for (int r : ranks) {
      if (r < 1) throw std::invalid_argument("config: ranks must be positive");
      if (r > std::min(grid.interior_x(), grid.interior_y()))
        throw std::invalid_argument("config: rank exceeds interior grid size");
    }
    if (reference_multiplier < 1)
      throw std::invalid_argument("config: reference multiplier must be positive");
    if (fn_substeps < 1)
      throw std::invalid_argument("config: fn_substeps must be positive");
  }

  long reference_steps() const {
    return reference_multiplier * *std::max_element(M_list.begin(), M_list.end());
  }
};

// Relative Frobenius error against a nonzero reference field.
inline double relerr(const Matrix& approx, const Matrix& reference) {
  if (approx.rows() != reference.rows() || approx.cols() != reference.cols())
    throw std::invalid_argument("relerr: shape mismatch");
  const double denom = reference.norm();
  if (!(denom > 0)) throw std::invalid_argument("relerr: reference has zero norm");
  return (approx - reference).norm() / denom;
}

// Observed order between two resolutions: log_{tau1/tau2}(e1/e2).
inline double observed_rate(double e1, double e2, double tau1, double tau2) {
  if (!(e1 > 0) || !(e2 > 0) || !(tau1 > 0) || !(tau2 > 0))
    throw std::invalid_argument("observed_rate: inputs must be positive");
  if (tau1 == tau2) throw std::invalid_argument("observed_rate: steps must differ");
  return std::log(e1 / e2) / std::log(tau1 / tau2);
}

namespace detail {

inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Every input that influences the reference trajectory goes into the key.
inline std::string reference_cache_key(const ExperimentConfig& c) {
  std::ostringstream s;
  char buf[48];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    s << buf << '|';
  };
  s << "ref1|" << c.preset << '|' << c.grid.nx << '|' << c.grid.ny << '|';
  num(c.grid.x_lo); num(c.grid.x_hi); num(c.grid.y_lo); num(c.grid.y_hi);
  num(c.T);
  num(c.params.alpha); num(c.params.beta); num(c.params.gamma); num(c.params.delta);
  num(c.params.w1); num(c.params.w2); num(c.params.w3);
  s << c.params.f_kind << '|' << c.params.g_kind << '|';
  s << c.fn_substeps << '|' << c.reference_multiplier << '|' << c.reference_steps();
  return s.str();
}

inline std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace detail

inline std::filesystem::path reference_cache_path(const ExperimentConfig& config) {
  return config.cache_dir /
         ("ref_" + detail::hex64(detail::fnv1a(detail::reference_cache_key(config))) + ".bin");
}

// Displacement field of the fine full-rank run used as the error reference,
// cached on disk under a content hash of everything that shapes it.
inline Matrix reference_solution(const ExperimentConfig& config) {
  config.validate();
  const std::filesystem::path path = reference_cache_path(config);
  if (auto cached = read_matrix_binary(path)) {
    if (cached->rows() == config.grid.interior_x() && cached->cols() == config.grid.interior_y())
      return *cached;
  }

  const ProblemPreset& preset = find_preset(config.preset);
  const PairState state0 = sample_initial(config.grid, preset);
  const TimeGrid time{config.T, config.reference_steps()};
  const NonlinearPair F = make_nonlinear(config.params);
  const PairState final_state =
      integrate_fullrank(state0, config.grid, time, config.params, F, config.fn_substeps);

  std::filesystem::create_directories(config.cache_dir);
  write_matrix_binary(final_state.P, path);
  return final_state.P;
}

using CellLog = std::function<void(const ConvergenceCell&, double seconds)>;

// Run the whole (rank, M) sweep against one shared reference. A cell that
// blows up is reported with NaN error instead of aborting the table; the rate
// chain restarts after it.
inline std::vector<ConvergenceCell> convergence_table(const ExperimentConfig& config,
                                                      const CellLog& log = nullptr) {
  config.validate();
  const Matrix reference = reference_solution(config);
  const ProblemPreset& preset = find_preset(config.preset);
  const PairState state0 = sample_initial(config.grid, preset);
  const NonlinearPair F = make_nonlinear(config.params);

  std::vector<int> ranks = config.ranks;
  std::sort(ranks.begin(), ranks.end());
  ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());

  std::vector<ConvergenceCell> table;
  for (int r : ranks) {
    std::optional<double> prev_err;
    double prev_tau = 0.0;
    for (long M : config.M_list) {
      const TimeGrid time{config.T, M};
      ConvergenceCell cell;
      cell.rank = r;
      cell.M = M;
      cell.tau = time.tau();
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const LowRankPair pair0 = truncate_state(state0, r, r);
        const LowRankPair final_pair =
            lowrank_integrate(pair0, config.grid, time, config.params, F, config.fn_substeps);
        cell.relerr = relerr(final_pair.P.dense(), reference);
        if (prev_err) cell.rate = observed_rate(*prev_err, cell.relerr, prev_tau, cell.tau);
        prev_err = cell.relerr;
        prev_tau = cell.tau;
      } catch (const BlowUpError&) {
        cell.relerr = std::nan("");
        cell.status = "blowup";
        prev_err.reset();
      }
      const double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (log) log(cell, seconds);
      table.push_back(cell);
    }
  }
  return table;
}

// Densified displacement snapshots of both schemes at the requested times,
// for side-by-side export.
struct SnapshotSeries {
  std::vector<double> times;
  std::vector<Matrix> fullrank;
  std::vector<Matrix> lowrank;
};

inline SnapshotSeries snapshot_series(const ExperimentConfig& config,
                                      const std::vector<double>& times) {
  config.validate();
  const long M = *std::max_element(config.M_list.begin(), config.M_list.end());
  const TimeGrid time{config.T, M};
  const double tau = time.tau();

  std::vector<long> steps;
  for (double t : times) {
    const double k = t / tau;
    const long kk = std::lround(k);
    if (kk < 0 || kk > M || std::abs(k - kk) > 1e-9 * std::max(1.0, std::abs(k)))
      throw std::invalid_argument("snapshot: time " + std::to_string(t) +
                                  " is not on the step grid");
    steps.push_back(kk);
  }

  const ProblemPreset& preset = find_preset(config.preset);
  const PairState state0 = sample_initial(config.grid, preset);
  const NonlinearPair F = make_nonlinear(config.params);
  const int r = config.ranks.front();

  SnapshotSeries out;
  out.times = times;
  out.fullrank.resize(times.size());
  out.lowrank.resize(times.size());

  auto want = [&](long k) {
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < steps.size(); ++i)
      if (steps[i] == k) hits.push_back(i);
    return hits;
  };

  integrate_fullrank(state0, config.grid, time, config.params, F, config.fn_substeps,
                     [&](long k, double, const PairState& s) {
                       for (std::size_t i : want(k)) out.fullrank[i] = s.P;
                     });
  const LowRankPair pair0 = truncate_state(state0, r, r);
  lowrank_integrate(pair0, config.grid, time, config.params, F, config.fn_substeps,
                    [&](long k, double, const LowRankPair& s) {
                      for (std::size_t i : want(k)) out.lowrank[i] = s.P.dense();
                    });
  return out;
}

}  // namespace dlrwave

#endif
