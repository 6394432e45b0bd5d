#ifndef DLRWAVE_DLRWAVE_HPP
#define DLRWAVE_DLRWAVE_HPP

// Low-rank splitting solver for the strongly damped semilinear wave equation
//   u_tt + gamma u_t + delta u = Lap(alpha u + beta u_t) + f(u) + g(u_t)
// on a rectangle with homogeneous Dirichlet boundary: finite differences in
// space, a three-way Strang splitting in time, and fixed-rank
// projector-splitting updates of the factored state.

#include "dlrwave/cli.hpp"
#include "dlrwave/config.hpp"
#include "dlrwave/experiment.hpp"
#include "dlrwave/flows.hpp"
#include "dlrwave/grid.hpp"
#include "dlrwave/io.hpp"
#include "dlrwave/linalg.hpp"
#include "dlrwave/low_rank.hpp"
#include "dlrwave/model.hpp"
#include "dlrwave/presets.hpp"

#endif
