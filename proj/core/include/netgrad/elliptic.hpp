#pragma once

// Variable-coefficient elliptic problems on structured grids.
//
// The operator -div(a grad u) is discretized from the quadratic form
//   q(u) = sum_x-edges c (du)^2 + sum_y-edges c (du)^2 + sum_cells 2 a_xy X Y vol
// where edge coefficients average the two end-node tensors and the cross term
// uses cell-centered differences X, Y of the four corners. The resulting
// 3-point (1D) or 9-point (2D) stencil K is symmetric, and (K u)_i / vol
// approximates -div(a grad u) at interior node i.
//
// Drift terms b . (D grad u) use centered node differences and make the
// system non-symmetric. All solves impose Dirichlet data on the boundary.

#include <optional>
#include <string>
#include <variant>

#include <Eigen/SparseCore>

#include "netgrad/grid.hpp"

namespace netgrad {

enum class FaceAveraging { arithmetic, harmonic };

struct SolverOptions {
  /// Relative algebraic residual ||A x - b|| <= tol ||b||.
  double tol = 1e-10;
  /// Unknown count up to which the sparse direct solver is used.
  std::size_t direct_limit = 10000;
  int max_iterations = 20000;
  FaceAveraging averaging = FaceAveraging::arithmetic;
};

struct EllipticProblem {
  SymTensorField coefficient;
  /// Positive scalar multiplying the coefficient, e.g. exp(-z phi).
  std::optional<ScalarField> weight;
  /// b in the term + b . (coefficient grad u); the weight does not apply here.
  std::optional<VectorField> drift;
  ScalarField rhs;
  std::variant<double, ScalarField> boundary = 0.0;
};

struct LinearSolveReport {
  int iterations = 0;
  double residual = 0.0;
  std::string method;
};

struct EllipticSolution {
  ScalarField solution;
  LinearSolveReport report;
};

struct BlockSolution {
  ScalarField sigma;
  ScalarField eta;
  LinearSolveReport report;
};

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Symmetric stiffness matrix over all nodes: u^T K v ~ integral grad u . a grad v.
SparseMatrix stiffness_matrix(const SymTensorField& a, FaceAveraging averaging = FaceAveraging::arithmetic);

/// -div(a grad u) at interior nodes (zero on boundary nodes).
ScalarField apply_diffusion_operator(const SymTensorField& a, const ScalarField& u,
                                     FaceAveraging averaging = FaceAveraging::arithmetic);

/// Discrete bilinear form f^T K g for coefficient a.
double dirichlet_form(const SymTensorField& a, const ScalarField& f, const ScalarField& g,
                      FaceAveraging averaging = FaceAveraging::arithmetic);

/// Throws NonSPDCoefficient if any node has min eigenvalue <= 0.
void require_spd(const SymTensorField& a, const char* what);

/// Interior-node system matrix of a problem (drift included), for inspection and tests.
SparseMatrix assemble_interior_operator(const EllipticProblem& p, FaceAveraging averaging = FaceAveraging::arithmetic);

EllipticSolution solve_elliptic(const EllipticProblem& p, const SolverOptions& opts = {});

/// Monolithic solve of
///   -div(D grad sigma) + z grad phi . D grad sigma - z^2 eta = rhs
///   -lap eta - div(u D grad sigma) = 0
/// with sigma = eta = 0 on the boundary.
BlockSolution solve_block_sigma_eta(const SymTensorField& D, const ScalarField& u, const ScalarField& phi,
                                    double z, const ScalarField& rhs, const SolverOptions& opts = {});

}  // namespace netgrad
