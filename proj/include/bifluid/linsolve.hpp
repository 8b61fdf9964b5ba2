#pragma once

// Krylov solvers behind one interface. Operators are matrix-free callbacks;
// preconditioning is diagonal (Jacobi) only.

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bifluid/kernels.hpp"

namespace bifluid {

enum class MethodHint { SymmetricPositive, General };

struct LinearSolveSpec {
  double rel_tol = 1e-10;
  int max_iters = 5000;
  MethodHint method = MethodHint::General;
};

struct SolveStats {
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
  std::string method;
};

/// Thrown when a linear solve misses its tolerance within max_iters.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, SolveStats stats) : std::runtime_error(what), stats_(std::move(stats)) {}
  const SolveStats& stats() const { return stats_; }

 private:
  SolveStats stats_;
};

using LinearOperator = std::function<void(std::span<const double> x, std::span<double> y)>;

/// Solves A x = b starting from the contents of x. Stops on
/// ||b - A x|| <= rel_tol ||b||; a zero right-hand side returns x = 0.
/// `inv_diag` may be empty (no preconditioning).
SolveStats solve_linear(const LinearOperator& a, std::span<const double> b, std::span<double> x,
                        std::span<const double> inv_diag, const LinearSolveSpec& spec);

/// Same, throwing SolverError on nonconvergence. `what` names the system.
SolveStats solve_linear_or_throw(const LinearOperator& a, std::span<const double> b, std::span<double> x,
                                 std::span<const double> inv_diag, const LinearSolveSpec& spec,
                                 const std::string& what);

LinearOperator csr_operator(const CsrMatrix& m);

}  // namespace bifluid
