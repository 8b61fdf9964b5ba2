#pragma once

// Right-hand sides of the composed map, the map itself, and the damped
// iteration for one regularization level.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bifluid/elliptic.hpp"
#include "bifluid/grid.hpp"
#include "bifluid/model.hpp"

namespace bifluid {

struct MixtureState {
  std::array<Field, 2> rho;
  std::array<VectorField, 2> u;
  Field s;  ///< theta = exp(s)
  double eps = 1.0;
  double lam = 1.0;
};

/// u = 0, s = 0, rho_i = M_i / |Omega|.
MixtureState equilibrium_state(const Grid& g, const MixtureParams& params, double eps, double lam = 1.0);

/// Signals exp overflow or non-finite values in an iterate.
class DivergenceError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Extra right-hand sides used by manufactured-solution runs: continuity is
/// added to the R equation, the others to G, D and T before scaling by lam.
struct ExtraSources {
  std::optional<std::array<Field, 2>> continuity;
  std::optional<std::array<VectorField, 2>> momentum;
  std::optional<Field> energy;
  std::optional<BoundaryField> boundary;
};

/// Grid, parameters and sampled data shared by every evaluation of the map.
class Problem {
 public:
  Problem(const Grid& g, MixtureParams params, ViscosityMatrices visc);

  const Grid& grid() const { return grid_; }
  const MixtureParams& params() const { return params_; }
  const ViscosityMatrices& visc() const { return visc_; }
  const std::vector<BoundaryFace>& faces() const { return faces_; }
  const VectorField& forcing(int i) const { return forcing_[i - 1]; }
  const BoundaryField& theta_hat() const { return theta_hat_; }

  ExtraSources sources;
  LinearSolveSpec linear;

 private:
  Grid grid_;
  MixtureParams params_;
  ViscosityMatrices visc_;
  std::vector<BoundaryFace> faces_;
  std::array<VectorField, 2> forcing_;
  BoundaryField theta_hat_;
};

// ---------------------------------------------------------------------------
// Right-hand sides. `state.rho` must already hold R_i(u^(i)).

VectorField assemble_G(int i, const Problem& pb, const MixtureState& state);
Field assemble_D(const Problem& pb, const MixtureState& state);
Field assemble_B(const Field& y, double eps, double m);
/// -(1 + e^{(m-1) y}) (e^y - theta_hat) at boundary faces.
BoundaryField assemble_T(const BoundaryField& y_trace, const BoundaryField& theta_hat, double m);
double boundary_T(double y, double theta_hat, double m);
double boundary_T_derivative(double y, double theta_hat, double m);

/// Face values of s consistent with the Robin closure of the lam-problem:
/// kappa (y_f - y_c) + eps y_f = lam T(y_f) + g_f, kappa = 2 B(y_c) / h.
/// Solved per face by safeguarded Newton.
BoundaryField entropy_trace(const Problem& pb, const Field& s, double eps, double lam);

/// Densities R_i(u^(i)) for both components.
std::array<Field, 2> solve_densities(const Problem& pb, const std::array<VectorField, 2>& u, double eps,
                                     const std::array<Field, 2>* initial = nullptr);

struct PsiResult {
  std::array<VectorField, 2> h;
  Field z;
  std::array<Field, 2> rho;  ///< R_i(u^(i)) used for the right-hand sides
  std::array<SolveStats, 4> stats;  ///< R1, R2, U, S
};

/// Psi(u, s) = (U(G1, G2), S(D, B, T)). The boundary trace of s entering T is
/// the one of the state's lam-problem.
PsiResult apply_Psi(const Problem& pb, const MixtureState& state);

struct ContinuationConfig {
  std::vector<double> lambda_schedule{0.1, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> eps_schedule{1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
  double damping = 0.5;
  double fp_tol = 1e-6;
  int fp_max_iters = 500;
  /// Iterate the stabilized map (same fixed points as lam Psi); see README.
  bool stabilize = true;
  bool halt_on_failure = false;

  /// Empty when valid, otherwise one message per violation.
  std::vector<std::string> violations() const;
};

/// Fixed-point norm: W^1_2 of both velocities plus H^1 of s.
double fixed_point_norm(const std::array<VectorField, 2>& u, const Field& s);

struct LambdaStage {
  double lam = 0.0;
  int iterations = 0;
  double last_update = 0.0;
  bool converged = false;
  std::string failure;  ///< empty unless the stage diverged or a solve failed
};

struct HomotopyResult {
  MixtureState state;  ///< lam = 1 iterate (or the last finite one)
  std::vector<LambdaStage> stages;
  bool converged = false;
};

/// One damped iteration x <- (1 - omega) x + omega T(x), where T is lam Psi or
/// its stabilized variant. Returns the relative update.
double fixed_point_step(const Problem& pb, MixtureState& x, const ContinuationConfig& cfg);

HomotopyResult solve_lambda_homotopy(const Problem& pb, const MixtureState& init, const ContinuationConfig& cfg,
                                     double eps);

}  // namespace bifluid
