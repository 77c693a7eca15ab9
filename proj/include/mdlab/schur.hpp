#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace mdlab {

struct SchurOptions {
  double tol = 1e-6;
  int max_iterations = 500;
  std::uint64_t seed = 0;
};

struct SchurProblem {
  Eigen::MatrixXcd matrix;
  SchurOptions options;
};

// Vectors x_i (rows of x) and y_j (rows of y) with A(i,j) ~ <x_i, y_j>,
// where <x, y> = sum_k x_k conj(y_k).
struct SchurWitness {
  Eigen::MatrixXcd x;
  Eigen::MatrixXcd y;
};

// Result of the Schur multiplier norm computation.
//
// `lower` is the trace norm ||D_sqrt(u) A D_sqrt(v)||_1 for the returned
// probability weights (u, v); it is a lower bound for every feasible
// weight pair. `upper` is max|x_i| max|y_j| of the untruncated witness plus
// a bound on the Schur norm of its residual. Both sides are recomputed from
// the certificates, independent of the iteration that produced them.
struct SchurSolution {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  SchurWitness witness;            // rank-truncated witness for reporting
  double witness_residual = 0.0;   // max |A - <x_i, y_j>| of `witness`
  Eigen::VectorXd row_weights;     // dual certificate u (sums to 1)
  Eigen::VectorXd col_weights;     // dual certificate v (sums to 1)
  int iterations = 0;
  bool converged = false;
};

SchurSolution schur_norm(const SchurProblem& problem);
inline SchurSolution schur_norm(const Eigen::MatrixXcd& a, SchurOptions options = {}) {
  return schur_norm(SchurProblem{a, options});
}

struct WitnessCheck {
  double residual = 0.0;  // max_{i,j} |A(i,j) - <x_i, y_j>|
  double bound = 0.0;     // max_i |x_i| * max_j |y_j|
};

WitnessCheck verify_witness(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& x,
                            const Eigen::MatrixXcd& y);

// ||D_sqrt(u) A D_sqrt(v)||_1 / sqrt(sum u * sum v): a lower bound for the
// Schur norm for any nonnegative weights.
double schur_dual_bound(const Eigen::MatrixXcd& a, const Eigen::VectorXd& u,
                        const Eigen::VectorXd& v);

// Upper bound for the Schur norm of an arbitrary matrix: min of the largest
// row norm and the largest column norm.
double schur_norm_crude_upper(const Eigen::MatrixXcd& a);

struct PsdCheck {
  bool psd = false;
  double min_eigenvalue = 0.0;
};

// Throws ValidationError if m is not Hermitian within tol.
PsdCheck psd_check(const Eigen::MatrixXcd& m, double tol);

}  // namespace mdlab
