#include "bifluid/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "bifluid/lame.hpp"

namespace bifluid {

namespace {

/// Row-by-row CSR builder; duplicate columns within a row are merged.
class CsrBuilder {
 public:
  explicit CsrBuilder(std::size_t rows) { m_.rows = rows; m_.row_ptr.push_back(0); }
  void add(std::size_t col, double v) { row_[col] += v; }
  void finish_row() {
    for (const auto& [c, v] : row_) {
      m_.col.push_back(c);
      m_.val.push_back(v);
    }
    m_.row_ptr.push_back(m_.col.size());
    row_.clear();
  }
  CsrMatrix take() { return std::move(m_); }

 private:
  CsrMatrix m_;
  std::map<std::size_t, double> row_;
};

std::vector<double> inverse(std::vector<double> d) {
  for (double& x : d) x = 1.0 / x;
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------

CsrMatrix continuity_matrix(const VectorField& w, double eps) {
  const Grid& g = w.grid();
  CsrBuilder b(g.size());
  for (std::size_t c = 0; c < g.size(); ++c) {
    const auto p = g.ijk(c);
    b.add(c, eps);
    for (int a = 0; a < g.dim; ++a) {
      const double h = g.h[a];
      const std::size_t s = g.stride(a);
      const auto& wa = w.comp(a);
      if (p[a] + 1 < g.cells[a]) {
        const double wf = 0.5 * (wa[c] + wa[c + s]);
        b.add(c, eps / (h * h) + std::max(wf, 0.0) / h);
        b.add(c + s, -eps / (h * h) + std::min(wf, 0.0) / h);
      }
      if (p[a] > 0) {
        const double wf = 0.5 * (wa[c - s] + wa[c]);
        b.add(c, eps / (h * h) - std::min(wf, 0.0) / h);
        b.add(c - s, -eps / (h * h) - std::max(wf, 0.0) / h);
      }
    }
    b.finish_row();
  }
  return b.take();
}

ContinuitySolution solve_continuity_R(const VectorField& w, double eps, double mass, const LinearSolveSpec& spec,
                                      const Field* source, const Field* initial) {
  if (!(eps > 0.0)) throw std::invalid_argument("continuity solve needs eps > 0");
  const Grid& g = w.grid();
  const double mean = mass / g.volume();
  const CsrMatrix m = continuity_matrix(w, eps);
  std::vector<double> rhs(g.size(), eps * mean);
  if (source) {
    require_same_grid(source->grid(), g);
    for (std::size_t c = 0; c < g.size(); ++c) rhs[c] += (*source)[c];
  }
  ContinuitySolution out{initial ? *initial : Field(g, mean), {}};
  const auto inv_diag = inverse(m.diagonal());
  LinearSolveSpec s = spec;
  s.method = MethodHint::General;
  out.stats = solve_linear_or_throw(csr_operator(m), rhs, out.r.values(), inv_diag, s, "continuity solve");
  return out;
}

// ---------------------------------------------------------------------------

LameSolution solve_lame_U(const VectorField& g1, const VectorField& g2, const ViscosityMatrices& visc,
                          const LinearSolveSpec& spec, std::array<double, 2> kappa, const LameSolution* initial) {
  require_same_grid(g1.grid(), g2.grid());
  if (!(visc.c0() > 0.0)) throw std::invalid_argument("Lame system is singular: c0 <= 0");
  const Grid& g = g1.grid();
  const std::size_t n = g.size();
  const int dim = g.dim;
  const std::size_t block = n * dim;

  auto unpack = [&](std::span<const double> x, VectorField& a, VectorField& b) {
    for (int k = 0; k < dim; ++k) {
      std::copy_n(x.begin() + k * n, n, a.comp(k).begin());
      std::copy_n(x.begin() + block + k * n, n, b.comp(k).begin());
    }
  };
  auto pack = [&](const VectorField& a, const VectorField& b, std::span<double> x) {
    for (int k = 0; k < dim; ++k) {
      std::copy(a.comp(k).begin(), a.comp(k).end(), x.begin() + k * n);
      std::copy(b.comp(k).begin(), b.comp(k).end(), x.begin() + block + k * n);
    }
  };

  VectorField w1(g), w2(g);
  LinearOperator op = [&](std::span<const double> x, std::span<double> y) {
    unpack(x, w1, w2);
    VectorField y1 = apply_lame(w1, w2, visc, 1);
    VectorField y2 = apply_lame(w1, w2, visc, 2);
    if (kappa[0] != 0.0) {
      const VectorField k1 = apply_grad_div(w1);
      for (int a = 0; a < dim; ++a) kernels::axpy(kappa[0], k1.comp(a), y1.comp(a));
    }
    if (kappa[1] != 0.0) {
      const VectorField k2 = apply_grad_div(w2);
      for (int a = 0; a < dim; ++a) kernels::axpy(kappa[1], k2.comp(a), y2.comp(a));
    }
    pack(y1, y2, y);
  };

  std::vector<double> inv_diag(2 * block);
  double lap = 0.0;
  for (int a = 0; a < dim; ++a) lap += 2.0 / (g.h[a] * g.h[a]);
  for (int i = 0; i < 2; ++i)
    for (int a = 0; a < dim; ++a) {
      const double shear = visc.mu[i][i] * lap;
      const double bulk = (visc.lambda[i][i] + visc.mu[i][i] + kappa[i]) / (2.0 * g.h[a] * g.h[a]);
      const double d = std::max(shear + bulk, shear);
      std::fill_n(inv_diag.begin() + i * block + a * n, n, 1.0 / d);
    }

  std::vector<double> rhs(2 * block), x(2 * block, 0.0);
  pack(g1, g2, rhs);
  if (initial) pack(initial->h1, initial->h2, x);
  LinearSolveSpec s = spec;
  s.method = visc.symmetric() ? MethodHint::SymmetricPositive : MethodHint::General;
  LameSolution out{VectorField(g), VectorField(g), {}};
  out.stats = solve_linear_or_throw(op, rhs, x, inv_diag, s, "Lame solve");
  unpack(x, out.h1, out.h2);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void check_robin_inputs(const Field& b, const BoundaryField& alpha, std::size_t faces) {
  if (alpha.size() != faces) throw std::invalid_argument("Robin coefficient has the wrong length");
  for (double x : b.values())
    if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("Robin solve needs a positive finite coefficient b");
  for (double x : alpha)
    if (!(x > 0.0)) throw std::invalid_argument("Robin solve needs a positive boundary coefficient");
}

}  // namespace

CsrMatrix robin_matrix(const Field& b, const BoundaryField& alpha) {
  const Grid& g = b.grid();
  const auto faces = boundary_faces(g);
  check_robin_inputs(b, alpha, faces.size());
  // Boundary contributions grouped by cell.
  std::vector<double> bdiag(g.size(), 0.0);
  for (std::size_t k = 0; k < faces.size(); ++k) {
    const auto& f = faces[k];
    const double h = g.h[f.axis];
    const double kap = 2.0 * b[f.cell] / h;
    bdiag[f.cell] += kap * alpha[k] / ((kap + alpha[k]) * h);
  }
  CsrBuilder m(g.size());
  for (std::size_t c = 0; c < g.size(); ++c) {
    const auto p = g.ijk(c);
    m.add(c, bdiag[c]);
    for (int a = 0; a < g.dim; ++a) {
      const double ih2 = 1.0 / (g.h[a] * g.h[a]);
      const std::size_t s = g.stride(a);
      if (p[a] + 1 < g.cells[a]) {
        const double bf = 0.5 * (b[c] + b[c + s]);
        m.add(c, bf * ih2);
        m.add(c + s, -bf * ih2);
      }
      if (p[a] > 0) {
        const double bf = 0.5 * (b[c - s] + b[c]);
        m.add(c, bf * ih2);
        m.add(c - s, -bf * ih2);
      }
    }
    m.finish_row();
  }
  return m.take();
}

RobinSolution solve_robin_S(const Field& d, const Field& b, const BoundaryField& t, const BoundaryField& alpha,
                            const LinearSolveSpec& spec, const Field* initial) {
  require_same_grid(d.grid(), b.grid());
  const Grid& g = d.grid();
  const auto faces = boundary_faces(g);
  if (t.size() != faces.size()) throw std::invalid_argument("Robin data has the wrong length");
  const CsrMatrix m = robin_matrix(b, alpha);

  std::vector<double> rhs(d.values().begin(), d.values().end());
  for (std::size_t k = 0; k < faces.size(); ++k) {
    const auto& f = faces[k];
    const double h = g.h[f.axis];
    const double kap = 2.0 * b[f.cell] / h;
    rhs[f.cell] += kap * t[k] / ((kap + alpha[k]) * h);
  }

  RobinSolution out{initial ? *initial : Field(g), {}, {}, 1.0};
  const auto [lo, hi] = std::minmax_element(b.values().begin(), b.values().end());
  out.coefficient_ratio = *hi / *lo;
  LinearSolveSpec s = spec;
  s.method = MethodHint::SymmetricPositive;
  out.stats = solve_linear_or_throw(csr_operator(m), rhs, out.z.values(), inverse(m.diagonal()), s, "Robin solve");

  out.trace.resize(faces.size());
  for (std::size_t k = 0; k < faces.size(); ++k) {
    const auto& f = faces[k];
    const double kap = 2.0 * b[f.cell] / g.h[f.axis];
    out.trace[k] = (t[k] + kap * out.z[f.cell]) / (kap + alpha[k]);
  }
  return out;
}

RobinSolution solve_robin_S(const Field& d, const Field& b, const BoundaryField& t, double eps,
                            const LinearSolveSpec& spec, const Field* initial) {
  if (!(eps > 0.0)) throw std::invalid_argument("Robin solve needs eps > 0");
  return solve_robin_S(d, b, t, BoundaryField(t.size(), eps), spec, initial);
}

}  // namespace bifluid
