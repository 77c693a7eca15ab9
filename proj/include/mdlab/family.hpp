#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "mdlab/certificate.hpp"
#include "mdlab/exec.hpp"
#include "mdlab/group.hpp"
#include "mdlab/multiplier.hpp"

namespace mdlab {

// z^l(t), with 0^0 = 1.
cd psi(const Group& g, cd z, const Element& t);
cd complex_power(cd z, std::size_t n);
// t -> z^l(t) as a radial multiplier.
Multiplier radial_multiplier(const GroupPtr& g, cd z);

// max(0, 1 - |n|/(N+1))
double fejer_kernel_coeff(std::size_t N, std::int64_t n);
// F_N(e^{i theta})
double fejer_kernel(std::size_t N, double theta);

struct FejerParams {
  std::size_t N = 0;
  double r = 0.5;
  std::size_t Q = 0;  // 0 means 4(N+1)
  std::size_t nodes() const { return Q ? Q : 4 * (N + 1); }
  // Throws ValidationError outside r in (0,1), Q >= 4(N+1).
  void validate() const;
};

// Closed form (1 - l/(N+1)) r^l on l <= N.
Multiplier fejer_multiplier(const FejerParams& p, const GroupPtr& g);

struct QuadratureResult {
  Multiplier average;
  std::size_t dropped = 0;    // coefficients below the cutoff set to zero
  double dropped_mass = 0.0;  // sum of their moduli
};

// sum_q w_q phi_q. Radial samples are averaged coefficientwise on lengths
// <= max_length, finite samples on the union of their supports.
QuadratureResult quadrature_average(const std::vector<Multiplier>& samples, const std::vector<cd>& weights,
                                    std::size_t max_length, double cutoff = 1e-14,
                                    Exec exec = Exec::Parallel);

// (1/2pi) int F_N(e^{i theta}) psi_{r e^{i theta}} d theta by the trapezoid rule.
QuadratureResult fejer_quadrature(const FejerParams& p, const GroupPtr& g, Exec exec = Exec::Parallel);

// A truncation of the analytic family pi_z on the Cayley tree of F_k: pi_z(s)
// agrees with the left regular representation except on span{delta_e,
// delta_{s^-1}}, where delta_e -> z delta_e + c delta_s and
// delta_{s^-1} -> c delta_e - z delta_s, c = sqrt(1 - z^2). Matrices act on
// l2 of the radius-R ball; checks use the interior l <= R - 2.
struct FamilyPoint {
  GroupPtr group;
  cd z;
  std::size_t radius = 0;
  Ball ball;
  std::vector<Eigen::SparseMatrix<cd>> generators;  // pi_z(s), s in group->generators()
  std::size_t basepoint = 0;

  double coefficient_residual = 0.0;
  double unitarity_residual = 0.0;
  double homomorphism_residual = 0.0;
  std::optional<double> empirical;  // filled by empirical_bound

  std::size_t interior() const { return radius - 2; }
  bool real_point() const { return z.imag() == 0.0; }
  // pi_z(t) v through the reduced word of t.
  Eigen::VectorXcd apply(const Element& t, Eigen::VectorXcd v) const;
  Eigen::SparseMatrix<cd> matrix(const Element& t) const;
  // <pi_z(t) xi, xi> with xi = delta_e
  cd coefficient(const Element& t) const;
};

// Builds the point and runs the contract checks; throws ContractError if a
// residual exceeds tol (unitarity only at real z).
FamilyPoint tree_family_point(cd z, std::size_t radius, std::size_t rank, double tol = 1e-8);

// pi_z(t) delta_v computed from the closed form on the infinite tree.
std::vector<std::pair<Element, cd>> exact_column(const Group& free_group, cd z, const Element& t,
                                                 const Element& v);

// max over t in the interior ball of the norm of pi_z(t) on interior
// columns. Empirical: a truncation only samples the supremum.
double empirical_bound(FamilyPoint& fp, Exec exec = Exec::Parallel);

struct HolomorphyCheck {
  double residual = 0.0;  // |d f / d conj(z)| by central differences
  cd value;
};
// Wirtinger residual of z -> <pi_z(t) xi, xi> at z0 with step h.
HolomorphyCheck holomorphy_check(const Element& t, cd z0, double h, std::size_t radius, std::size_t rank);

// ||phi||_{M_d} <= b^d ||xi|| ||eta|| for phi(t) = <pi_z(t) xi, eta>; b is the
// empirical bound of the point, so the certificate is flagged empirical.
FactorizationCertificate certificate_from_ub_rep(const FamilyPoint& fp, const Eigen::VectorXcd& xi,
                                                 const Eigen::VectorXcd& eta, std::size_t d);

// (1/Q) sum_q F_N(theta_q) b(r e^{i theta_q})^d over the family on F_k.
struct FejerEmpiricalUpper {
  double value = 0.0;
  std::vector<double> thetas;
  std::vector<double> bounds;
};
FejerEmpiricalUpper fejer_empirical_upper(const FejerParams& p, std::size_t d, std::size_t radius,
                                          std::size_t rank, Exec exec = Exec::Parallel);

}  // namespace mdlab
