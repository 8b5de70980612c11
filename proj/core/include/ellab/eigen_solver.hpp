#pragma once

#include "ellab/grid.hpp"
#include "ellab/system_model.hpp"

namespace ellab {

struct Lambda1Result {
  double lambda1 = 0.0;     // fine mesh (spacing h)
  double coarse = 0.0;      // mesh spacing 2h
  double richardson = 0.0;  // (4 lambda_h - lambda_2h) / 3
  int iterations = 0;
  GridField eigenfield;     // u = v = eigenvector normalised to sup 1
};

/// Smallest eigenvalue of -Delta_h with Dirichlet data, by inverse
/// iteration to relative tolerance `tol`.
double smallest_dirichlet_eigenvalue(const Grid& grid, double tol, int* iterations = nullptr,
                                     std::vector<double>* eigenvector = nullptr);

/// Domain must be a ball (radial mesh in dimension n) or a two-dimensional box.
Lambda1Result compute_lambda1(const Domain& domain, int n, double h, double tol = 1e-10);

}  // namespace ellab
