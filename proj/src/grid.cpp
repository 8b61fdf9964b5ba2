#include "bifluid/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bifluid/kernels.hpp"

namespace bifluid {

Vec3 Grid::center(std::size_t c) const {
  const auto p = ijk(c);
  Vec3 x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) x[a] = (p[a] + 0.5) * h[a];
  return x;
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= h[a];
  return v;
}

double Grid::volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= extents[a];
  return v;
}

double Grid::boundary_area() const {
  if (dim == 2) return 2.0 * (extents[0] + extents[1]);
  return 2.0 * (extents[0] * extents[1] + extents[1] * extents[2] + extents[0] * extents[2]);
}

Grid build_grid(int dim, std::span<const double> extents, std::span<const int> cells) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("grid dimension must be 2 or 3");
  if (extents.size() < static_cast<std::size_t>(dim) || cells.size() < static_cast<std::size_t>(dim))
    throw std::invalid_argument("grid needs one extent and one cell count per axis");
  Grid g;
  g.dim = dim;
  for (int a = 0; a < dim; ++a) {
    if (!(extents[a] > 0.0) || !std::isfinite(extents[a]))
      throw std::invalid_argument("grid extent along axis " + std::to_string(a) + " must be positive");
    if (cells[a] < 4)
      throw std::invalid_argument("grid needs at least 4 cells along axis " + std::to_string(a));
    g.extents[a] = extents[a];
    g.cells[a] = cells[a];
    g.h[a] = extents[a] / cells[a];
  }
  return g;
}

std::vector<BoundaryFace> boundary_faces(const Grid& g) {
  std::vector<BoundaryFace> faces;
  for (int axis = 0; axis < g.dim; ++axis) {
    double area = 1.0;
    for (int b = 0; b < g.dim; ++b)
      if (b != axis) area *= g.h[b];
    for (int side : {-1, 1}) {
      const int layer = side < 0 ? 0 : g.cells[axis] - 1;
      for (std::size_t c = 0; c < g.size(); ++c) {
        if (g.ijk(c)[axis] != layer) continue;
        BoundaryFace f{c, axis, side, area, g.center(c)};
        f.center[axis] = side < 0 ? 0.0 : g.extents[axis];
        faces.push_back(f);
      }
    }
  }
  return faces;
}

// ---------------------------------------------------------------------------

VectorField gradient(const Field& f, Ghost ghost) {
  const Grid& g = f.grid();
  VectorField out(g);
  for (int a = 0; a < g.dim; ++a) kernels::central_diff(g, a, ghost, f.values(), out.comp(a), 1.0, false);
  return out;
}

VectorField gradient_with_trace(const Field& f, const BoundaryField& trace) {
  const Grid& g = f.grid();
  const auto faces = boundary_faces(g);
  if (trace.size() != faces.size()) throw std::invalid_argument("boundary trace has the wrong length");
  VectorField out = gradient(f, Ghost::NeumannZero);
  for (std::size_t k = 0; k < faces.size(); ++k) {
    const auto& fc = faces[k];
    // Neumann ghost used u_c; the trace ghost is 2 t - u_c.
    out.comp(fc.axis)[fc.cell] += fc.side * (trace[k] - f[fc.cell]) / g.h[fc.axis];
  }
  return out;
}

Field divergence(const VectorField& v, Ghost ghost) {
  const Grid& g = v.grid();
  Field out(g);
  for (int a = 0; a < g.dim; ++a) kernels::central_diff(g, a, ghost, v.comp(a), out.values(), 1.0, a > 0);
  return out;
}

Field laplacian(const Field& f, Ghost ghost) {
  Field out(f.grid());
  kernels::laplacian(f.grid(), ghost, f.values(), out.values(), 1.0, false);
  return out;
}

TensorField grad_vector(const VectorField& u, Ghost ghost) {
  const Grid& g = u.grid();
  TensorField t(g);
  for (int a = 0; a < g.dim; ++a)
    for (int b = 0; b < g.dim; ++b) kernels::central_diff(g, a, ghost, u.comp(b), t.comp(a, b), 1.0, false);
  return t;
}

VectorField tensor_divergence(const TensorField& t, Ghost ghost) {
  const Grid& g = t.grid();
  VectorField out(g);
  for (int a = 0; a < g.dim; ++a)
    for (int b = 0; b < g.dim; ++b) kernels::central_diff(g, b, ghost, t.comp(a, b), out.comp(a), 1.0, b > 0);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

double ordered_sum(std::span<const double> v) {
  double total = 0.0;
  for (double x : v) total += x;
  return total;
}

}  // namespace

double integral(std::span<const double> values, const Grid& g) { return ordered_sum(values) * g.cell_volume(); }

double integral(const Field& f) { return integral(f.values(), f.grid()); }

double lp_norm(const Field& f, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : f.values()) m = std::max(m, std::abs(x));
    return m;
  }
  double s = 0.0;
  for (double x : f.values()) s += std::pow(std::abs(x), p);
  return std::pow(s * f.grid().cell_volume(), 1.0 / p);
}

double lp_norm(const VectorField& v, double p) {
  Field mag(v.grid());
  for (std::size_t c = 0; c < v.size(); ++c) {
    double s = 0.0;
    for (int a = 0; a < v.dim(); ++a) s += v.comp(a)[c] * v.comp(a)[c];
    mag[c] = std::sqrt(s);
  }
  return lp_norm(mag, p);
}

namespace {

double face_seminorm_squared(const Grid& g, std::span<const double> u, Ghost ghost) {
  double s = 0.0;
  for (int a = 0; a < g.dim; ++a) {
    const std::size_t st = g.stride(a);
    const double ih2 = 1.0 / (g.h[a] * g.h[a]);
    for (std::size_t c = 0; c < g.size(); ++c) {
      const int i = g.ijk(c)[a];
      if (i + 1 < g.cells[a]) {
        const double d = u[c + st] - u[c];
        s += d * d * ih2;
      }
      // Half-cell faces: the Dirichlet trace is zero at distance h/2.
      if (ghost == Ghost::DirichletZero && (i == 0 || i + 1 == g.cells[a])) s += 2.0 * u[c] * u[c] * ih2;
    }
  }
  return s * g.cell_volume();
}

}  // namespace

double h1_seminorm(const Field& f, Ghost ghost) {
  return std::sqrt(face_seminorm_squared(f.grid(), f.values(), ghost));
}

double h1_seminorm(const VectorField& v, Ghost ghost) {
  double s = 0.0;
  for (int a = 0; a < v.dim(); ++a) s += face_seminorm_squared(v.grid(), v.comp(a), ghost);
  return std::sqrt(s);
}

double w12_norm(const VectorField& v) {
  const double l2 = lp_norm(v, 2.0);
  const double h1 = h1_seminorm(v, Ghost::DirichletZero);
  return std::sqrt(l2 * l2 + h1 * h1);
}

double boundary_integral(const BoundaryField& values, const Grid& g) {
  const auto faces = boundary_faces(g);
  if (values.size() != faces.size()) throw std::invalid_argument("boundary field has the wrong length");
  double s = 0.0;
  for (std::size_t k = 0; k < faces.size(); ++k) s += values[k] * faces[k].area;
  return s;
}

BoundaryField cell_trace(const Field& f) {
  const auto faces = boundary_faces(f.grid());
  BoundaryField t(faces.size());
  for (std::size_t k = 0; k < faces.size(); ++k) t[k] = f[faces[k].cell];
  return t;
}

double boundary_lp_norm(const BoundaryField& values, const Grid& g, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : values) m = std::max(m, std::abs(x));
    return m;
  }
  BoundaryField w(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) w[k] = std::pow(std::abs(values[k]), p);
  return std::pow(boundary_integral(w, g), 1.0 / p);
}

double dot(const Field& a, const Field& b) {
  require_same_grid(a.grid(), b.grid());
  return kernels::dot(a.values(), b.values()) * a.grid().cell_volume();
}

double dot(const VectorField& a, const VectorField& b) {
  require_same_grid(a.grid(), b.grid());
  double s = 0.0;
  for (int c = 0; c < a.dim(); ++c) s += kernels::dot(a.comp(c), b.comp(c));
  return s * a.grid().cell_volume();
}

}  // namespace bifluid
