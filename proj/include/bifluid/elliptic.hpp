#pragma once

// The three linear sub-solvers of the fixed-point map:
//   R: -eps lap r + div(r w) + eps r = eps M / |Omega| (+ src), grad r . n = 0
//   U: sum_j L_ij h_j = g_i, h_i = 0 on the boundary
//   S: -div(b grad z) = d, b grad z . n + alpha z = t

#include <array>
#include <vector>

#include "bifluid/grid.hpp"
#include "bifluid/linsolve.hpp"
#include "bifluid/model.hpp"

namespace bifluid {

struct ContinuitySolution {
  Field r;
  SolveStats stats;
};

/// Finite-volume upwind discretization. Face velocities are cell averages and
/// boundary faces carry no flux, so column sums of the matrix equal eps:
/// mass is conserved exactly and the matrix is an M-matrix (r >= 0).
/// `source` (optional) is added to the right-hand side; `initial` seeds the
/// iteration (default: the constant M / |Omega|).
ContinuitySolution solve_continuity_R(const VectorField& w, double eps, double mass, const LinearSolveSpec& spec = {},
                                      const Field* source = nullptr, const Field* initial = nullptr);

/// Upwind transport matrix times r plus diffusion and reaction, for tests.
CsrMatrix continuity_matrix(const VectorField& w, double eps);

struct LameSolution {
  VectorField h1, h2;
  SolveStats stats;
};

/// Solves sum_j L_ij h_j - kappa_i grad div h_i = g_i as one block system.
/// kappa = 0 gives the plain Lame system. Symmetric Lambda and M select CG.
/// Throws std::invalid_argument when c0 <= 0.
LameSolution solve_lame_U(const VectorField& g1, const VectorField& g2, const ViscosityMatrices& visc,
                          const LinearSolveSpec& spec = {}, std::array<double, 2> kappa = {0.0, 0.0},
                          const LameSolution* initial = nullptr);

struct RobinSolution {
  Field z;
  SolveStats stats;
  /// Face values of z recovered from the eliminated Robin closure.
  BoundaryField trace;
  /// max b / min b; values above kConditioningWarning are reported, not fixed.
  double coefficient_ratio = 1.0;
};

inline constexpr double kConditioningWarning = 1e12;

/// Face coefficients are cell averages of b. The boundary value is eliminated
/// through b_c (z_f - z_c) / (h / 2) + alpha_f z_f = t_f.
RobinSolution solve_robin_S(const Field& d, const Field& b, const BoundaryField& t, double eps,
                            const LinearSolveSpec& spec = {}, const Field* initial = nullptr);
/// Same with a face-wise Robin coefficient alpha_f > 0.
RobinSolution solve_robin_S(const Field& d, const Field& b, const BoundaryField& t, const BoundaryField& alpha,
                            const LinearSolveSpec& spec = {}, const Field* initial = nullptr);

/// Assembled Robin matrix, rows scaled per unit volume.
CsrMatrix robin_matrix(const Field& b, const BoundaryField& alpha);

}  // namespace bifluid
