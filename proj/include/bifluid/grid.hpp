#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace bifluid {

using Vec3 = std::array<double, 3>;

/// Ghost-cell policy used by the finite-difference stencils at the box faces.
///  - DirichletZero: ghost = -interior, the face value is zero.
///  - NeumannZero:   ghost = interior, the face-normal difference is zero.
enum class Ghost { DirichletZero, NeumannZero };

/// Axis-aligned box [0, L0] x [0, L1] (x [0, L2]) split into equal cells.
/// Unused axes in 2D carry one cell of unit length.
struct Grid {
  int dim = 3;
  Vec3 extents{1.0, 1.0, 1.0};
  std::array<int, 3> cells{1, 1, 1};
  Vec3 h{1.0, 1.0, 1.0};

  std::size_t size() const {
    return static_cast<std::size_t>(cells[0]) * cells[1] * cells[2];
  }
  std::size_t stride(int axis) const {
    return axis == 0 ? 1 : axis == 1 ? static_cast<std::size_t>(cells[0])
                                     : static_cast<std::size_t>(cells[0]) * cells[1];
  }
  std::size_t index(int i, int j, int k = 0) const {
    return static_cast<std::size_t>(i) + cells[0] * (static_cast<std::size_t>(j) + cells[1] * static_cast<std::size_t>(k));
  }
  std::array<int, 3> ijk(std::size_t c) const {
    return {static_cast<int>(c % cells[0]), static_cast<int>((c / cells[0]) % cells[1]),
            static_cast<int>(c / (static_cast<std::size_t>(cells[0]) * cells[1]))};
  }
  Vec3 center(std::size_t c) const;
  double cell_volume() const;
  double volume() const;
  /// Total measure of the boundary.
  double boundary_area() const;

  bool operator==(const Grid& o) const {
    return dim == o.dim && extents == o.extents && cells == o.cells;
  }
};

/// Builds a grid; throws std::invalid_argument on dim outside {2,3},
/// nonpositive extents or fewer than 4 cells per axis.
Grid build_grid(int dim, std::span<const double> extents, std::span<const int> cells);

/// One cell face lying on the box boundary.
struct BoundaryFace {
  std::size_t cell;  ///< adjacent interior cell
  int axis;          ///< normal axis
  int side;          ///< -1 (x_axis = 0) or +1 (x_axis = L)
  double area;
  Vec3 center;
  Vec3 normal() const {
    Vec3 n{0.0, 0.0, 0.0};
    n[axis] = side;
    return n;
  }
};

/// Boundary faces ordered by axis, then side (-1 first), then cell index.
/// Boundary fields are indexed in this order.
std::vector<BoundaryFace> boundary_faces(const Grid& g);

using BoundaryField = std::vector<double>;

class Field {
 public:
  Field() = default;
  explicit Field(const Grid& g, double value = 0.0) : grid_(g), v_(g.size(), value) {}

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return v_.size(); }
  double& operator[](std::size_t c) { return v_[c]; }
  double operator[](std::size_t c) const { return v_[c]; }
  std::span<double> values() { return v_; }
  std::span<const double> values() const { return v_; }
  std::vector<double>& data() { return v_; }
  const std::vector<double>& data() const { return v_; }

 private:
  Grid grid_;
  std::vector<double> v_;
};

class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(const Grid& g) : grid_(g) {
    for (int a = 0; a < 3; ++a) c_[a].assign(a < g.dim ? g.size() : 0, 0.0);
  }

  const Grid& grid() const { return grid_; }
  int dim() const { return grid_.dim; }
  std::size_t size() const { return grid_.size(); }
  std::vector<double>& comp(int a) { return c_[a]; }
  const std::vector<double>& comp(int a) const { return c_[a]; }
  Vec3 at(std::size_t c) const {
    Vec3 v{0.0, 0.0, 0.0};
    for (int a = 0; a < grid_.dim; ++a) v[a] = c_[a][c];
    return v;
  }
  void set(std::size_t c, const Vec3& v) {
    for (int a = 0; a < grid_.dim; ++a) c_[a][c] = v[a];
  }

 private:
  Grid grid_;
  std::array<std::vector<double>, 3> c_;
};

/// Cellwise dim x dim tensor, component (a, b) stored in comp(a, b).
class TensorField {
 public:
  TensorField() = default;
  explicit TensorField(const Grid& g) : grid_(g) {
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) c_[a][b].assign(a < g.dim && b < g.dim ? g.size() : 0, 0.0);
  }
  const Grid& grid() const { return grid_; }
  std::vector<double>& comp(int a, int b) { return c_[a][b]; }
  const std::vector<double>& comp(int a, int b) const { return c_[a][b]; }

 private:
  Grid grid_;
  std::array<std::array<std::vector<double>, 3>, 3> c_;
};

struct GridMismatch : std::invalid_argument {
  GridMismatch() : std::invalid_argument("fields live on different grids") {}
};

inline void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw GridMismatch{};
}

// ---------------------------------------------------------------------------
// Discrete calculus. Second-order central differences on the cell-centered
// grid; boundary closure through the ghost policy. With v DirichletZero and
// phi NeumannZero, gradient and divergence are exact negative adjoints under
// the midpoint inner product: sum(phi * div v) = -sum(grad phi . v).

VectorField gradient(const Field& f, Ghost ghost = Ghost::NeumannZero);
/// Gradient using a prescribed boundary trace: ghost = 2 * trace - interior.
VectorField gradient_with_trace(const Field& f, const BoundaryField& trace);
Field divergence(const VectorField& v, Ghost ghost = Ghost::DirichletZero);
/// Compact three-point Laplacian per axis.
Field laplacian(const Field& f, Ghost ghost);
/// (grad u)_{ab} = d_a u_b.
TensorField grad_vector(const VectorField& u, Ghost ghost = Ghost::DirichletZero);
/// (div T)_a = sum_b d_b T_{ab}.
VectorField tensor_divergence(const TensorField& t, Ghost ghost = Ghost::DirichletZero);

enum class DiffKind { Gradient, Divergence, Laplacian, TensorDivergence, GradVector };

// ---------------------------------------------------------------------------
// Quadrature. Midpoint rule over cells, face-midpoint rule over the boundary.

double integral(const Field& f);
double integral(std::span<const double> values, const Grid& g);
/// (sum |v|^p h^dim)^(1/p); p = infinity gives the max norm.
double lp_norm(const Field& f, double p);
/// Lp norm of the pointwise Euclidean magnitude.
double lp_norm(const VectorField& v, double p);
/// Face-based H1 seminorm. For DirichletZero the boundary half-cells are
/// included, so that |u|^2 = -<u, laplacian(u)> exactly.
double h1_seminorm(const VectorField& v, Ghost ghost = Ghost::DirichletZero);
double h1_seminorm(const Field& f, Ghost ghost);
/// ||u||_{W^1_2} = sqrt(||u||_2^2 + |u|_1^2).
double w12_norm(const VectorField& v);
/// Face-midpoint sum of a boundary field weighted by face area.
double boundary_integral(const BoundaryField& values, const Grid& g);
/// Boundary field holding the adjacent cell values (first-order trace).
BoundaryField cell_trace(const Field& f);
/// (sum over faces |v|^p area)^(1/p).
double boundary_lp_norm(const BoundaryField& values, const Grid& g, double p);

/// Midpoint-rule inner products.
double dot(const Field& a, const Field& b);
double dot(const VectorField& a, const VectorField& b);

}  // namespace bifluid
