#pragma once

#include <array>

#include "bifluid/grid.hpp"
#include "bifluid/model.hpp"

namespace bifluid {

/// sum_j L_ij u^(j) with L_ij = -(lambda_ij + mu_ij) grad div - mu_ij laplacian.
/// Velocities carry the DirichletZero policy; grad div is the composition of
/// the Neumann gradient with the Dirichlet divergence, so its negative is
/// the Gram operator of the divergence and the form stays coercive.
VectorField apply_lame(const VectorField& u1, const VectorField& u2, const ViscosityMatrices& visc, int i);

/// -grad div u with the same closure as inside apply_lame.
VectorField apply_grad_div(const VectorField& u);

}  // namespace bifluid
