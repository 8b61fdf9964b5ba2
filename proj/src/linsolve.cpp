#include "bifluid/linsolve.hpp"

#include <algorithm>
#include <cmath>

namespace bifluid {

namespace {

void precondition(std::span<const double> inv_diag, std::span<const double> r, std::span<double> z) {
  if (inv_diag.empty()) {
    std::copy(r.begin(), r.end(), z.begin());
    return;
  }
  kernels::hadamard(inv_diag, r, z);
}

SolveStats conjugate_gradient(const LinearOperator& a, std::span<const double> b, std::span<double> x,
                              std::span<const double> inv_diag, const LinearSolveSpec& spec, double bnorm) {
  const std::size_t n = b.size();
  std::vector<double> r(n), z(n), p(n), q(n);
  SolveStats st;
  st.method = "cg";
  a(x, q);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
  double rnorm = std::sqrt(kernels::dot(r, r));
  precondition(inv_diag, r, z);
  std::copy(z.begin(), z.end(), p.begin());
  double rz = kernels::dot(r, z);
  while (rnorm > spec.rel_tol * bnorm && st.iterations < spec.max_iters) {
    a(p, q);
    const double pq = kernels::dot(p, q);
    if (!(pq > 0.0)) break;  // lost definiteness
    const double alpha = rz / pq;
    kernels::axpy(alpha, p, x);
    kernels::axpy(-alpha, q, r);
    rnorm = std::sqrt(kernels::dot(r, r));
    ++st.iterations;
    precondition(inv_diag, r, z);
    const double rz_new = kernels::dot(r, z);
    kernels::xpby(z, rz_new / rz, p);
    rz = rz_new;
  }
  st.rel_residual = rnorm / bnorm;
  st.converged = rnorm <= spec.rel_tol * bnorm;
  return st;
}

SolveStats bicgstab(const LinearOperator& a, std::span<const double> b, std::span<double> x,
                    std::span<const double> inv_diag, const LinearSolveSpec& spec, double bnorm) {
  const std::size_t n = b.size();
  std::vector<double> r(n), r0(n), p(n, 0.0), v(n, 0.0), s(n), t(n), ph(n), sh(n);
  SolveStats st;
  st.method = "bicgstab";
  a(x, t);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - t[i];
  r0 = r;
  double rnorm = std::sqrt(kernels::dot(r, r));
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  int restarts = 0;
  while (rnorm > spec.rel_tol * bnorm && st.iterations < spec.max_iters) {
    const double rho_new = kernels::dot(r0, r);
    if (std::abs(rho_new) < 1e-300 || std::abs(omega) < 1e-300) {
      // Breakdown: restart with the current residual as shadow vector.
      if (++restarts > 20) break;
      r0 = r;
      std::fill(p.begin(), p.end(), 0.0);
      std::fill(v.begin(), v.end(), 0.0);
      rho = alpha = omega = 1.0;
      continue;
    }
    const double beta = (rho_new / rho) * (alpha / omega);
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    precondition(inv_diag, p, ph);
    a(ph, v);
    alpha = rho_new / kernels::dot(r0, v);
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    ++st.iterations;
    const double snorm = std::sqrt(kernels::dot(s, s));
    if (snorm <= spec.rel_tol * bnorm) {
      kernels::axpy(alpha, ph, x);
      rnorm = snorm;
      r = s;
      break;
    }
    precondition(inv_diag, s, sh);
    a(sh, t);
    const double tt = kernels::dot(t, t);
    omega = tt > 0.0 ? kernels::dot(t, s) / tt : 0.0;
    kernels::axpy(alpha, ph, x);
    kernels::axpy(omega, sh, x);
    for (std::size_t i = 0; i < n; ++i) r[i] = s[i] - omega * t[i];
    rnorm = std::sqrt(kernels::dot(r, r));
    rho = rho_new;
  }
  // Guard against drift between the recursive and true residual.
  a(x, t);
  double true_r = 0.0;
  for (std::size_t i = 0; i < n; ++i) true_r += (b[i] - t[i]) * (b[i] - t[i]);
  st.rel_residual = std::sqrt(true_r) / bnorm;
  st.converged = st.rel_residual <= 10.0 * spec.rel_tol;
  return st;
}

}  // namespace

SolveStats solve_linear(const LinearOperator& a, std::span<const double> b, std::span<double> x,
                        std::span<const double> inv_diag, const LinearSolveSpec& spec) {
  const double bnorm = std::sqrt(kernels::dot(b, b));
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    SolveStats st;
    st.converged = true;
    st.method = "trivial";
    return st;
  }
  if (spec.method == MethodHint::SymmetricPositive) {
    SolveStats st = conjugate_gradient(a, b, x, inv_diag, spec, bnorm);
    if (st.converged) return st;
    // CG stalls on operators that are only nearly symmetric; fall back.
    SolveStats fb = bicgstab(a, b, x, inv_diag, spec, bnorm);
    fb.iterations += st.iterations;
    fb.method = "cg+bicgstab";
    return fb;
  }
  return bicgstab(a, b, x, inv_diag, spec, bnorm);
}

SolveStats solve_linear_or_throw(const LinearOperator& a, std::span<const double> b, std::span<double> x,
                                 std::span<const double> inv_diag, const LinearSolveSpec& spec,
                                 const std::string& what) {
  SolveStats st = solve_linear(a, b, x, inv_diag, spec);
  if (!st.converged)
    throw SolverError(what + ": " + st.method + " stopped after " + std::to_string(st.iterations) +
                          " iterations at relative residual " + std::to_string(st.rel_residual),
                      st);
  return st;
}

LinearOperator csr_operator(const CsrMatrix& m) {
  return [&m](std::span<const double> x, std::span<double> y) { kernels::spmv(m, x, y); };
}

}  // namespace bifluid
