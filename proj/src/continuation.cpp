#include "bifluid/continuation.hpp"

#include <stdexcept>

namespace bifluid {

ContinuationResult run_epsilon_continuation(const ContinuationConfig& cfg, const Problem& pb,
                                            const StageCallback& on_stage) {
  const auto bad = cfg.violations();
  if (!bad.empty()) throw std::invalid_argument("invalid continuation config: " + bad.front());
  if (!(pb.visc().c0() > 0.0)) throw std::invalid_argument("viscosity matrices are not coercive (c0 <= 0)");

  ContinuationResult out;
  out.converged = true;
  MixtureState current = equilibrium_state(pb.grid(), pb.params(), cfg.eps_schedule.front());
  for (std::size_t k = 0; k < cfg.eps_schedule.size(); ++k) {
    const double eps = cfg.eps_schedule[k];
    HomotopyResult h = solve_lambda_homotopy(pb, current, cfg, eps);
    EpsilonStage stage;
    stage.eps = eps;
    stage.converged = h.converged;
    for (const auto& ls : h.stages) {
      stage.iterations += ls.iterations;
      if (stage.failure.empty() && !ls.failure.empty()) stage.failure = ls.failure;
    }
    if (!h.converged && stage.failure.empty()) stage.failure = "fixed-point iteration limit reached";
    stage.lambda_stages = std::move(h.stages);

    current = std::move(h.state);
    current.eps = eps;
    current.lam = 1.0;
    MonitorRow row = full_monitor(current, pb, stage.iterations, stage.converged);
    if (on_stage) on_stage(k, current, row);
    out.states.push_back(current);
    out.rows.push_back(row);
    out.converged = out.converged && stage.converged;
    out.stages.push_back(std::move(stage));
    if (!out.stages.back().converged && cfg.halt_on_failure) {
      out.converged = false;
      break;
    }
  }
  if (out.stages.size() < cfg.eps_schedule.size()) out.converged = false;
  return out;
}

ContinuationResult run_epsilon_continuation(const ContinuationConfig& cfg, const MixtureParams& params,
                                            const ViscosityMatrices& visc, const Grid& grid,
                                            const StageCallback& on_stage) {
  const Problem pb(grid, params, visc);
  return run_epsilon_continuation(cfg, pb, on_stage);
}

}  // namespace bifluid
