#include "bifluid/kernels.hpp"

#include <algorithm>

#ifdef BIFLUID_HAVE_OPENMP
#include <omp.h>
#endif

namespace bifluid {

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
      if (col[k] == r) d[r] += val[k];
  return d;
}

namespace kernels {

int max_threads() {
#ifdef BIFLUID_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

inline double ghost_value(Ghost ghost, double interior) {
  return ghost == Ghost::DirichletZero ? -interior : interior;
}

std::size_t block_count(std::size_t n) { return (n + kReductionBlock - 1) / kReductionBlock; }

}  // namespace

// ---------------------------------------------------------------------------
namespace ref {

double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double total = 0.0;
  for (std::size_t b = 0; b < block_count(n); ++b) {
    double partial = 0.0;
    const std::size_t end = std::min(n, (b + 1) * kReductionBlock);
    for (std::size_t i = b * kReductionBlock; i < end; ++i) partial += x[i] * y[i];
    total += partial;
  }
  return total;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void xpby(std::span<const double> x, double b, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + b * y[i];
}

void hadamard(std::span<const double> x, std::span<const double> y, std::span<double> z) {
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] * y[i];
}

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  for (std::size_t r = 0; r < a.rows; ++r) {
    double s = 0.0;
    for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) s += a.val[k] * x[a.col[k]];
    y[r] = s;
  }
}

void central_diff(const Grid& g, int axis, Ghost ghost, std::span<const double> in,
                  std::span<double> out, double scale, bool accumulate) {
  const double f = scale / (2.0 * g.h[axis]);
  for (int k = 0; k < g.cells[2]; ++k)
    for (int j = 0; j < g.cells[1]; ++j)
      for (int i = 0; i < g.cells[0]; ++i) {
        std::array<int, 3> p{i, j, k};
        const std::size_t c = g.index(i, j, k);
        std::array<int, 3> lo = p, hi = p;
        --lo[axis];
        ++hi[axis];
        const double vm = lo[axis] >= 0 ? in[g.index(lo[0], lo[1], lo[2])] : ghost_value(ghost, in[c]);
        const double vp =
            hi[axis] < g.cells[axis] ? in[g.index(hi[0], hi[1], hi[2])] : ghost_value(ghost, in[c]);
        const double d = f * (vp - vm);
        out[c] = accumulate ? out[c] + d : d;
      }
}

void laplacian(const Grid& g, Ghost ghost, std::span<const double> in, std::span<double> out,
               double scale, bool accumulate) {
  for (int k = 0; k < g.cells[2]; ++k)
    for (int j = 0; j < g.cells[1]; ++j)
      for (int i = 0; i < g.cells[0]; ++i) {
        std::array<int, 3> p{i, j, k};
        const std::size_t c = g.index(i, j, k);
        double s = 0.0;
        for (int a = 0; a < g.dim; ++a) {
          std::array<int, 3> lo = p, hi = p;
          --lo[a];
          ++hi[a];
          const double vm = lo[a] >= 0 ? in[g.index(lo[0], lo[1], lo[2])] : ghost_value(ghost, in[c]);
          const double vp = hi[a] < g.cells[a] ? in[g.index(hi[0], hi[1], hi[2])] : ghost_value(ghost, in[c]);
          s += (vp - 2.0 * in[c] + vm) / (g.h[a] * g.h[a]);
        }
        out[c] = accumulate ? out[c] + scale * s : scale * s;
      }
}

}  // namespace ref

// ---------------------------------------------------------------------------
namespace omp {

double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  const std::size_t nb = block_count(n);
  std::vector<double> partial(nb, 0.0);
  const long long nbl = static_cast<long long>(nb);
#pragma omp parallel for schedule(static)
  for (long long b = 0; b < nbl; ++b) {
    double s = 0.0;
    const std::size_t begin = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t end = std::min(n, begin + kReductionBlock);
    for (std::size_t i = begin; i < end; ++i) s += x[i] * y[i];
    partial[static_cast<std::size_t>(b)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  const long long n = static_cast<long long>(x.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) y[i] += a * x[i];
}

void xpby(std::span<const double> x, double b, std::span<double> y) {
  const long long n = static_cast<long long>(x.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) y[i] = x[i] + b * y[i];
}

void hadamard(std::span<const double> x, std::span<const double> y, std::span<double> z) {
  const long long n = static_cast<long long>(x.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) z[i] = x[i] * y[i];
}

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  const long long rows = static_cast<long long>(a.rows);
#pragma omp parallel for schedule(static)
  for (long long r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) s += a.val[k] * x[a.col[k]];
    y[r] = s;
  }
}

void central_diff(const Grid& g, int axis, Ghost ghost, std::span<const double> in,
                  std::span<double> out, double scale, bool accumulate) {
  const double f = scale / (2.0 * g.h[axis]);
  const std::size_t s = g.stride(axis);
  const int n = g.cells[axis];
  const double gsign = ghost == Ghost::DirichletZero ? -1.0 : 1.0;
  const long long total = static_cast<long long>(g.size());
#pragma omp parallel for schedule(static)
  for (long long cl = 0; cl < total; ++cl) {
    const std::size_t c = static_cast<std::size_t>(cl);
    const int i = static_cast<int>((c / s) % n);
    const double vm = i > 0 ? in[c - s] : gsign * in[c];
    const double vp = i + 1 < n ? in[c + s] : gsign * in[c];
    const double d = f * (vp - vm);
    out[c] = accumulate ? out[c] + d : d;
  }
}

void laplacian(const Grid& g, Ghost ghost, std::span<const double> in, std::span<double> out,
               double scale, bool accumulate) {
  const double gsign = ghost == Ghost::DirichletZero ? -1.0 : 1.0;
  std::array<double, 3> h2{};
  std::array<std::size_t, 3> st{};
  for (int a = 0; a < 3; ++a) {
    // Divide like the reference so both variants agree bitwise.
    h2[a] = g.h[a] * g.h[a];
    st[a] = g.stride(a);
  }
  const int dim = g.dim, nx = g.cells[0], ny = g.cells[1];
  const long long lines = static_cast<long long>(ny) * g.cells[2];
#pragma omp parallel for schedule(static)
  for (long long line = 0; line < lines; ++line) {
    const int j = static_cast<int>(line % ny), k = static_cast<int>(line / ny);
    const std::array<int, 3> pos{0, j, k};
    const std::size_t base = g.index(0, j, k);
    for (int i = 0; i < nx; ++i) {
      const std::size_t c = base + static_cast<std::size_t>(i);
      const double uc = in[c];
      const double xm = i > 0 ? in[c - 1] : gsign * uc;
      const double xp = i + 1 < nx ? in[c + 1] : gsign * uc;
      double sum = (xp - 2.0 * uc + xm) / h2[0];
      for (int a = 1; a < dim; ++a) {
        const double vm = pos[a] > 0 ? in[c - st[a]] : gsign * uc;
        const double vp = pos[a] + 1 < g.cells[a] ? in[c + st[a]] : gsign * uc;
        sum += (vp - 2.0 * uc + vm) / h2[a];
      }
      out[c] = accumulate ? out[c] + scale * sum : scale * sum;
    }
  }
}

}  // namespace omp
}  // namespace kernels
}  // namespace bifluid
