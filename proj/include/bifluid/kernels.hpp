#pragma once

// Hot loops of the solver. Every kernel has two implementations:
//   kernels::ref  - plain serial loops, the reference for tests,
//   kernels::omp  - OpenMP work-sharing over cells / rows.
// Reductions are blocked with a fixed block size so both variants add the
// same partial sums in the same order: results are bitwise identical and
// independent of the thread count.

#include <cstddef>
#include <span>
#include <vector>

#include "bifluid/grid.hpp"

namespace bifluid {

/// Compressed sparse row matrix.
struct CsrMatrix {
  std::size_t rows = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<std::size_t> col;
  std::vector<double> val;
  std::vector<double> diagonal() const;
};

namespace kernels {

inline constexpr std::size_t kReductionBlock = 1024;

namespace ref {
double dot(std::span<const double> x, std::span<const double> y);
// y += a x
void axpy(double a, std::span<const double> x, std::span<double> y);
// y = x + b y
void xpby(std::span<const double> x, double b, std::span<double> y);
// z = x * y elementwise
void hadamard(std::span<const double> x, std::span<const double> y, std::span<double> z);
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
// out (+)= scale * (in[c+s] - in[c-s]) / (2 h_axis)
void central_diff(const Grid& g, int axis, Ghost ghost, std::span<const double> in,
                  std::span<double> out, double scale, bool accumulate);
// out (+)= scale * compact Laplacian(in)
void laplacian(const Grid& g, Ghost ghost, std::span<const double> in, std::span<double> out,
               double scale, bool accumulate);
}  // namespace ref

namespace omp {
double dot(std::span<const double> x, std::span<const double> y);
// y += a x
void axpy(double a, std::span<const double> x, std::span<double> y);
// y = x + b y
void xpby(std::span<const double> x, double b, std::span<double> y);
// z = x * y elementwise
void hadamard(std::span<const double> x, std::span<const double> y, std::span<double> z);
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
// out (+)= scale * (in[c+s] - in[c-s]) / (2 h_axis)
void central_diff(const Grid& g, int axis, Ghost ghost, std::span<const double> in,
                  std::span<double> out, double scale, bool accumulate);
// out (+)= scale * compact Laplacian(in)
void laplacian(const Grid& g, Ghost ghost, std::span<const double> in, std::span<double> out,
               double scale, bool accumulate);
}  // namespace omp

using omp::axpy;
using omp::central_diff;
using omp::dot;
using omp::hadamard;
using omp::laplacian;
using omp::spmv;
using omp::xpby;

/// Number of threads the OpenMP variants use (1 without OpenMP).
int max_threads();

}  // namespace kernels
}  // namespace bifluid
