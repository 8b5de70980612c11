#include "ellab/eigen_solver.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "ellab/errors.hpp"

namespace ellab {

double smallest_dirichlet_eigenvalue(const Grid& grid, double tol, int* iterations,
                                     std::vector<double>* eigenvector) {
  const std::size_t N = grid.size();
  std::vector<long> idx(N, -1);
  long m = 0;
  for (std::size_t k = 0; k < N; ++k)
    if (!grid.is_boundary(k)) idx[k] = m++;

  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t k = 0; k < N; ++k) {
    if (idx[k] < 0) continue;
    for (const auto& [col, w] : grid.stencil(k))
      if (idx[col] >= 0) trip.emplace_back(idx[k], idx[col], -w);
  }
  Eigen::SparseMatrix<double> A(m, m);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw PreconditionError("Laplacian factorisation failed");

  Eigen::VectorXd x = Eigen::VectorXd::Ones(m);
  x.normalize();
  double lambda = 0.0;
  int it = 0;
  for (; it < 1000; ++it) {
    const Eigen::VectorXd y = lu.solve(x);
    const double next = y.dot(x) / y.dot(y);
    x = y / y.norm();
    const bool done = it > 0 && std::abs(next - lambda) <= tol * std::abs(next);
    lambda = next;
    if (done) break;
  }
  if (iterations) *iterations = it + 1;
  if (eigenvector) {
    eigenvector->assign(N, 0.0);
    const double s = x.cwiseAbs().maxCoeff();
    const double sign = x.sum() < 0 ? -1.0 : 1.0;
    for (std::size_t k = 0; k < N; ++k)
      if (idx[k] >= 0) (*eigenvector)[k] = sign * x[idx[k]] / s;
  }
  return lambda;
}

Lambda1Result compute_lambda1(const Domain& domain, int n, double h, double tol) {
  if (!domain.bounded()) throw PreconditionError("lambda1 needs a ball or a box");
  const Grid fine = Grid::for_domain(domain, n, h);
  Lambda1Result res;
  std::vector<double> vec;
  res.lambda1 = smallest_dirichlet_eigenvalue(fine, tol, &res.iterations, &vec);
  res.eigenfield = {fine, vec, vec};

  res.coarse = std::numeric_limits<double>::quiet_NaN();
  res.richardson = std::numeric_limits<double>::quiet_NaN();
  const bool halvable = fine.kind() == GridKind::radial ? fine.nx() % 2 == 0 && fine.nx() >= 4
                                                        : fine.nx() % 2 == 0 && fine.ny() % 2 == 0 &&
                                                              fine.nx() >= 4 && fine.ny() >= 4;
  if (halvable) {
    const Grid coarse = Grid::for_domain(domain, n, 2.0 * h);
    res.coarse = smallest_dirichlet_eigenvalue(coarse, tol);
    res.richardson = (4.0 * res.lambda1 - res.coarse) / 3.0;
  }
  return res;
}

}  // namespace ellab
