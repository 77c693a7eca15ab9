#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "mdlab/exec.hpp"
#include "mdlab/group.hpp"
#include "mdlab/multiplier.hpp"

namespace mdlab {

// A linear map between finite-dimensional spaces, stored densely, as a
// diagonal, or sparse.
class Operator {
 public:
  using Sparse = Eigen::SparseMatrix<cd>;

  static Operator dense(Eigen::MatrixXcd m);
  static Operator diagonal(Eigen::VectorXcd d);
  static Operator sparse(Sparse m);

  Eigen::Index rows() const;
  Eigen::Index cols() const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
  Operator operator*(const Operator& other) const;
  Operator adjoint() const;
  Eigen::MatrixXcd to_dense() const;
  // Operator norm; dense SVD except for the diagonal case.
  double norm() const;
  bool is_diagonal() const { return std::holds_alternative<Eigen::VectorXcd>(rep_); }

 private:
  std::variant<Eigen::MatrixXcd, Eigen::VectorXcd, Sparse> rep_;
};

// Maps xi_1, ..., xi_d with phi(t_1 ... t_d) = xi_1(t_1) ... xi_d(t_d), where
// xi_i(t) is an n_{i-1} x n_i matrix and n_0 = n_d = 1.
struct FactorizationCertificate {
  std::string id;
  GroupPtr group;
  std::vector<Eigen::Index> dims;
  std::vector<std::function<Operator(const Element&)>> maps;
  std::vector<double> sup_norms;
  // Sup norms measured on a truncation rather than known exactly.
  bool empirical = false;
  // Where the finite matrices reproduce the maps exactly.
  std::string domain = "G";

  std::size_t degree() const { return maps.size(); }
};

// prod sigma_i; throws ValidationError on inconsistent dimensions.
double md_upper_from_certificate(const FactorizationCertificate& c);

struct VerifyOptions {
  std::size_t exhaustive_cap = 200'000;  // largest |B|^d checked exhaustively
  std::size_t samples = 20'000;
  std::uint64_t seed = 0;
  Exec exec = Exec::Parallel;
};

struct CertificateCheck {
  double residual = 0.0;
  std::size_t tuples = 0;
  bool exhaustive = true;
  double coverage = 1.0;  // tuples / |B|^d
};

// max |phi(t_1...t_d) - xi_1(t_1)...xi_d(t_d)| over tuples from the ball.
CertificateCheck verify_certificate(const FactorizationCertificate& c, const Multiplier& phi,
                                    const Ball& ball, const VerifyOptions& options = {});

// max over the ball of ||xi_i(t)|| - sigma_i, for each i.
std::vector<double> sup_norm_excess(const FactorizationCertificate& c, const Ball& ball);

// A unitary representation given by its matrices.
struct UnitaryRep {
  GroupPtr group;
  Eigen::Index dim = 0;
  std::function<Operator(const Element&)> matrix;
  std::string id;
};

struct RepCheck {
  double homomorphism_residual = 0.0;
  double unitarity_residual = 0.0;
};
RepCheck check_unitary_rep(const UnitaryRep& pi, const std::vector<Element>& sample);

// phi(t) = <pi(t) xi, eta> = eta^* pi(t) xi with bound ||xi|| ||eta||. The
// representation is checked on all pairs from `sample` first (1e-12).
FactorizationCertificate certificate_from_unitary_rep(const UnitaryRep& pi, const Eigen::VectorXcd& xi,
                                                      const Eigen::VectorXcd& eta, std::size_t d,
                                                      const std::vector<Element>& sample);

UnitaryRep trivial_rep(const GroupPtr& g);
// lambda (x) I_multiplicity on a finite group.
UnitaryRep regular_rep_finite(const GroupPtr& g, Eigen::Index multiplicity = 1);
// t -> diag(exp(i t.theta_q)) on the product grid of q nodes per axis.
UnitaryRep torus_rep(const GroupPtr& zn, std::size_t q);

// The constant c through the trivial representation; bound |c|.
FactorizationCertificate constant_certificate(const GroupPtr& g, cd c, std::size_t d);

// Exact B(G) factorization for a function on a finite group: bound equals
// the trace norm of (1/|G|) sum phi(s) lambda(s)^*.
FactorizationCertificate finite_group_certificate(const Multiplier& phi, std::size_t d);

// Fourier certificate on Z^n from the density p(theta) = sum phi(m) e^{-i m.theta}
// sampled on q nodes per axis. Exact on products t with |t_i| + support
// radius < q; bound (1/q^n) sum |p|.
FactorizationCertificate fourier_certificate(const Multiplier& phi, std::size_t d, std::size_t q);
// Same from an explicit density.
FactorizationCertificate density_certificate(const GroupPtr& zn,
                                             const std::function<cd(const std::vector<double>&)>& density,
                                             std::size_t d, std::size_t q, std::string id);

// t -> <lambda(t) xi, eta> in the regular representation, simulated on the
// window; bound ||xi||_2 ||eta||_2. Exact on d-fold products from B_R when
// the window contains B_{(d-1)R + radius(supp xi)}.
FactorizationCertificate regular_certificate(const FinitelySupportedVector& xi,
                                             const FinitelySupportedVector& eta, std::size_t d,
                                             const Ball& window, std::string id);
// xi = delta_e, eta = conj(phi): bound ||phi||_2.
FactorizationCertificate l2_certificate(const Multiplier& phi, std::size_t d, const Ball& window);

// Composes every map with the embedding; same bound.
FactorizationCertificate restrict_certificate(const FactorizationCertificate& c, const Embedding& e);

// Finite support of phi with values: explicit list, or a radial coefficient
// list enumerated over the ball of its radius.
std::vector<std::pair<Element, cd>> enumerate_support(const Multiplier& phi);

}  // namespace mdlab
