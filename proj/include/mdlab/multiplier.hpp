#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mdlab/exec.hpp"
#include "mdlab/group.hpp"
#include "mdlab/schur.hpp"

namespace mdlab {

using cd = std::complex<double>;

enum class SupportKind : std::uint8_t { Finite, Radial, Lazy };

// A complex function on a group. Immutable; copies share the rule.
//
//   Finite  explicit support list, zero elsewhere
//   Radial  t -> c(l(t)), from a coefficient list (zero beyond it) or a rule
//   Lazy    arbitrary rule, support not enumerated
class Multiplier {
 public:
  using Rule = std::function<cd(const Element&)>;
  using LengthRule = std::function<cd(std::size_t)>;

  static Multiplier finite(GroupPtr g, std::vector<std::pair<Element, cd>> values,
                           std::string id = "finite");
  static Multiplier radial(GroupPtr g, std::vector<cd> coeffs_by_length, std::string id = "radial");
  static Multiplier radial_rule(GroupPtr g, LengthRule rule, bool hermitian, std::string id);
  static Multiplier lazy(GroupPtr g, Rule rule, bool hermitian, std::string id);
  static Multiplier constant(GroupPtr g, cd c, std::string id = "constant");

  cd operator()(const Element& t) const;

  const GroupPtr& group() const;
  SupportKind support_kind() const;
  // phi(t^{-1}) = conj(phi(t)) is known to hold.
  bool hermitian() const;
  const std::string& id() const;
  Multiplier with_id(std::string id) const;

  std::optional<cd> constant_value() const;
  // Finite kind only: support in canonical order.
  const std::vector<std::pair<Element, cd>>& support() const;
  // Radial kind only: coefficient at length l.
  cd radial_value(std::size_t l) const;
  // Radial coefficient list, when the multiplier was built from one.
  const std::vector<cd>* radial_coefficients() const;
  // Largest word length on the support, when the support is known to be finite.
  std::optional<std::size_t> support_radius() const;

  struct Impl;

 private:
  explicit Multiplier(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

// An element g of the group algebra C[G].
class FinitelySupportedVector {
 public:
  explicit FinitelySupportedVector(GroupPtr g) : group_(std::move(g)) {}
  // Throws ValidationError on repeated support elements.
  FinitelySupportedVector(GroupPtr g, const std::vector<std::pair<Element, cd>>& terms);

  // Accumulates c onto the coefficient of t.
  void add(const Element& t, cd c);
  cd operator[](const Element& t) const;

  const GroupPtr& group() const { return group_; }
  const std::map<Element, cd>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  double l1_norm() const;
  double l2_norm() const;

 private:
  GroupPtr group_;
  std::map<Element, cd> terms_;
};

// M(i, j) = phi(s_i^{-1} s_j).
Eigen::MatrixXcd gram_matrix(const Multiplier& phi, const std::vector<Element>& f,
                             Exec exec = Exec::Parallel);

// sum_t phi(t) g(t)
cd pairing(const Multiplier& phi, const FinitelySupportedVector& g);

// || sum g(t) lambda(t) || in the regular representation of a finite group.
double cstar_norm_finite(const FinitelySupportedVector& g);

// phi o embed on the subgroup.
Multiplier restrict(const Multiplier& phi, const Embedding& embedding);

// psi o q on the extension; `g` must carry a quotient structure whose quotient
// realization is psi's group.
Multiplier inflate(const Multiplier& psi, const GroupPtr& g);

// T(f)(x) = sum of f over the coset q^{-1}(x).
FinitelySupportedVector coset_average(const FinitelySupportedVector& f);

// Schur norm of a Gram truncation, a certified lower bound for ||phi||_{M_2}
// and hence for ||phi||_{M_d}, d >= 2.
struct LowerBound {
  double value = 0.0;  // certified lower side of the Schur solve
  SchurSolution solution;
};
LowerBound m2_lower_bound(const Multiplier& phi, const std::vector<Element>& f,
                          SchurOptions options = {}, Exec exec = Exec::Parallel);

}  // namespace mdlab
