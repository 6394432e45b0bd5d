#ifndef DLRWAVE_CLI_HPP
#define DLRWAVE_CLI_HPP

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "dlrwave/config.hpp"
#include "dlrwave/experiment.hpp"
#include "dlrwave/io.hpp"

namespace dlrwave {

struct CliInvocation {
  std::string command;  // converge | simulate | snapshot
  std::filesystem::path config_path;
  std::vector<std::string> overrides;
  std::filesystem::path out_dir = ".";
  bool verbose = false;
};

namespace detail {

inline void emit_error(const std::string& category, const std::string& message) {
  nlohmann::json line;
  line["error"] = category;
  line["message"] = message;
  std::cerr << line.dump() << '\n';
}

inline std::string format_time_tag(double t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", t);
  return buf;
}

inline void run_converge(const ExperimentConfig& config, const CliInvocation& inv) {
  const auto table = convergence_table(config, [](const ConvergenceCell& cell, double seconds) {
    std::cerr << "cell rank=" << cell.rank << " M=" << cell.M << " status=" << cell.status
              << " relerr=" << sci6(cell.relerr) << " seconds=" << seconds << '\n';
  });
  const auto path = inv.out_dir / "convergence.csv";
  write_csv(table, path);
  std::cout << "wrote " << path.string() << " (" << table.size() << " cells)\n";
}

inline void run_simulate(const ExperimentConfig& config, const CliInvocation& inv) {
  const ProblemPreset& preset = find_preset(config.preset);
  const PairState state0 = sample_initial(config.grid, preset);
  const NonlinearPair F = make_nonlinear(config.params);
  const long M = *std::max_element(config.M_list.begin(), config.M_list.end());
  const int r = config.ranks.front();
  const TimeGrid time{config.T, M};

  const LowRankPair final_pair = lowrank_integrate(truncate_state(state0, r, r), config.grid,
                                                   time, config.params, F, config.fn_substeps);
  const Matrix P = final_pair.P.dense();
  const auto path = inv.out_dir / "final_P.csv";
  write_matrix_csv(P, path);
  std::cout << "simulate preset=" << config.preset << " N=" << config.grid.nx << " M=" << M
            << " r=" << r << " T=" << config.T << " frobenius=" << sci6(P.norm())
            << " max_abs=" << sci6(P.cwiseAbs().maxCoeff()) << '\n';
}

inline void run_snapshot(const ExperimentConfig& config, const CliInvocation& inv) {
  // Four evenly spaced frames; for the shape presets (T = 3) these are the
  // integer times 0, 1, 2, 3.
  const std::vector<double> times{0.0, config.T / 3.0, 2.0 * config.T / 3.0, config.T};
  const SnapshotSeries series = snapshot_series(config, times);

  // one shared grayscale range per method so frames are comparable in time
  auto series_range = [](const std::vector<Matrix>& frames) {
    double lo = frames.front().minCoeff(), hi = frames.front().maxCoeff();
    for (const auto& f : frames) {
      lo = std::min(lo, f.minCoeff());
      hi = std::max(hi, f.maxCoeff());
    }
    return std::pair<double, double>(lo, hi);
  };
  const auto [flo, fhi] = series_range(series.fullrank);
  const auto [llo, lhi] = series_range(series.lowrank);

  for (std::size_t i = 0; i < series.times.size(); ++i) {
    const std::string tag = format_time_tag(series.times[i]);
    write_pgm(series.fullrank[i], inv.out_dir / (config.preset + "_fullrank_" + tag + ".pgm"),
              flo, fhi);
    write_pgm(series.lowrank[i], inv.out_dir / (config.preset + "_lowrank_" + tag + ".pgm"),
              llo, lhi);
  }
  std::cout << "wrote " << 2 * series.times.size() << " snapshots to " << inv.out_dir.string()
            << '\n';
}

}  // namespace detail

// Exit codes: 0 success, 1 configuration or validation problem, 2 numerical
// blow-up. Errors go to stderr as a single JSON line.
inline int run(const CliInvocation& inv) {
  try {
    if (inv.command != "converge" && inv.command != "simulate" && inv.command != "snapshot")
      throw ConfigError("unknown command: " + inv.command);
    const ExperimentConfig config = parse_config(inv.config_path, inv.overrides);
    if (inv.verbose) {
      std::cerr << "config preset=" << config.preset << " N=" << config.grid.nx
                << " T=" << config.T << " ranks=" << config.ranks.size()
                << " M_list=" << config.M_list.size() << '\n';
    }
    std::filesystem::create_directories(inv.out_dir);
    if (inv.command == "converge") detail::run_converge(config, inv);
    else if (inv.command == "simulate") detail::run_simulate(config, inv);
    else detail::run_snapshot(config, inv);
    return 0;
  } catch (const BlowUpError& e) {
    detail::emit_error("blowup", e.what());
    return 2;
  } catch (const ConfigError& e) {
    detail::emit_error("validation", e.what());
    return 1;
  } catch (const IoError& e) {
    detail::emit_error("io", e.what());
    return 1;
  } catch (const std::exception& e) {
    detail::emit_error("validation", e.what());
    return 1;
  }
}

}  // namespace dlrwave

#endif
