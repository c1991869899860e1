#pragma once

#include "plate/mesh.hpp"
#include "plate/system.hpp"

namespace plate::splitting {

inline constexpr int kMassDegree = 4;

struct P1Matrices {
  SymSparseMatrix stiffness;
  SymSparseMatrix mass;
};

/// P1 stiffness and mass matrices (one dof per vertex).
P1Matrices assemble_p1(const Triangulation& mesh, int mass_degree = kMassDegree);

/// (f, phi_i) for the P1 hat functions.
Eigen::VectorXd p1_load(const Triangulation& mesh, const ScalarField& f,
                        int degree = kMassDegree);

/// w_h with (grad w_h, grad phi) = (f, phi), then u_h with
/// (grad u_h, grad phi) = (w_h, phi); zero boundary values for both.
struct SplittingResult {
  Solution w;
  Solution u;
};

SplittingResult solve_splitting(const MeshPtr& mesh, const ScalarField& f, SolveOptions options = {});

/// ||v_h - I_h v||_{L2} through the mass matrix, I_h the nodal interpolant.
double l2_interpolation_error(const Triangulation& mesh, const Eigen::VectorXd& values,
                              const ScalarField& v);

}  // namespace plate::splitting
