#include "bifluid/lame.hpp"

#include "bifluid/kernels.hpp"

namespace bifluid {

VectorField apply_grad_div(const VectorField& u) {
  const Field div = divergence(u, Ghost::DirichletZero);
  VectorField out(u.grid());
  for (int a = 0; a < u.dim(); ++a)
    kernels::central_diff(u.grid(), a, Ghost::NeumannZero, div.values(), out.comp(a), -1.0, false);
  return out;
}

VectorField apply_lame(const VectorField& u1, const VectorField& u2, const ViscosityMatrices& visc, int i) {
  require_same_grid(u1.grid(), u2.grid());
  const Grid& g = u1.grid();
  const int r = i - 1;
  VectorField out(g);
  const VectorField* us[2] = {&u1, &u2};
  for (int j = 0; j < 2; ++j) {
    const double bulk = visc.lambda[r][j] + visc.mu[r][j];
    const double shear = visc.mu[r][j];
    if (bulk != 0.0) {
      const Field div = divergence(*us[j], Ghost::DirichletZero);
      for (int a = 0; a < g.dim; ++a)
        kernels::central_diff(g, a, Ghost::NeumannZero, div.values(), out.comp(a), -bulk, true);
    }
    if (shear != 0.0)
      for (int a = 0; a < g.dim; ++a)
        kernels::laplacian(g, Ghost::DirichletZero, us[j]->comp(a), out.comp(a), -shear, true);
  }
  return out;
}

}  // namespace bifluid
