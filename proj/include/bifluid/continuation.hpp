#pragma once

// Descending eps sweep: each level runs the lam homotopy warm-started from the
// previous level and emits one monitor row.

#include <functional>
#include <string>
#include <vector>

#include "bifluid/diagnostics.hpp"
#include "bifluid/fixed_point.hpp"

namespace bifluid {

struct EpsilonStage {
  double eps = 0.0;
  std::vector<LambdaStage> lambda_stages;
  int iterations = 0;  ///< summed over lam stages
  bool converged = false;
  std::string failure;
};

struct ContinuationResult {
  std::vector<MixtureState> states;  ///< one per attempted eps, last finite iterate on failure
  std::vector<MonitorRow> rows;
  std::vector<EpsilonStage> stages;
  bool converged = false;  ///< every scheduled eps converged
};

/// Called after each eps level with its index, state and row.
using StageCallback = std::function<void(std::size_t, const MixtureState&, const MonitorRow&)>;

/// Throws std::invalid_argument on an invalid config or c0 <= 0. Stage
/// failures are recorded; with halt_on_failure the sweep stops at the first.
ContinuationResult run_epsilon_continuation(const ContinuationConfig& cfg, const Problem& pb,
                                            const StageCallback& on_stage = {});

ContinuationResult run_epsilon_continuation(const ContinuationConfig& cfg, const MixtureParams& params,
                                            const ViscosityMatrices& visc, const Grid& grid,
                                            const StageCallback& on_stage = {});

}  // namespace bifluid
