#include "mdlab/family.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <unordered_map>

#include <Eigen/Eigenvalues>

#include "mdlab/errors.hpp"
#include "parallel.hpp"

namespace mdlab {

using Eigen::Index;
using Eigen::VectorXcd;
using SpMat = Eigen::SparseMatrix<cd>;

cd complex_power(cd z, std::size_t n) {
  cd r{1.0, 0.0};
  cd b = z;
  while (n) {
    if (n & 1U) r *= b;
    b *= b;
    n >>= 1U;
  }
  return r;
}

cd psi(const Group& g, cd z, const Element& t) { return complex_power(z, g.word_length(t)); }

Multiplier radial_multiplier(const GroupPtr& g, cd z) {
  return Multiplier::radial_rule(
      g, [z](std::size_t l) { return complex_power(z, l); }, z.imag() == 0.0, "psi");
}

double fejer_kernel_coeff(std::size_t N, std::int64_t n) {
  const double a = static_cast<double>(n < 0 ? -n : n);
  return std::max(0.0, 1.0 - a / static_cast<double>(N + 1));
}

double fejer_kernel(std::size_t N, double theta) {
  double s = 1.0;
  for (std::size_t n = 1; n <= N; ++n) {
    s += 2.0 * fejer_kernel_coeff(N, static_cast<std::int64_t>(n)) * std::cos(static_cast<double>(n) * theta);
  }
  return s;
}

void FejerParams::validate() const {
  if (!(r > 0.0 && r < 1.0)) throw ValidationError("Fejer radius r must lie in (0, 1)");
  if (Q != 0 && Q < 4 * (N + 1)) throw ValidationError("quadrature needs Q >= 4(N+1) nodes");
}

Multiplier fejer_multiplier(const FejerParams& p, const GroupPtr& g) {
  p.validate();
  std::vector<cd> coeffs(p.N + 1);
  for (std::size_t l = 0; l <= p.N; ++l) {
    coeffs[l] = fejer_kernel_coeff(p.N, static_cast<std::int64_t>(l)) * std::pow(p.r, static_cast<double>(l));
  }
  return Multiplier::radial(g, std::move(coeffs),
                            "fejer(N=" + std::to_string(p.N) + ",r=" + std::to_string(p.r) + ")");
}

QuadratureResult quadrature_average(const std::vector<Multiplier>& samples, const std::vector<cd>& weights,
                                    std::size_t max_length, double cutoff, Exec exec) {
  if (samples.size() != weights.size()) throw ValidationError("quadrature grid and weights differ in length");
  if (samples.empty()) throw ValidationError("quadrature needs at least one node");
  const GroupPtr g = samples.front().group();
  const bool radial = std::all_of(samples.begin(), samples.end(),
                                  [](const Multiplier& m) { return m.support_kind() == SupportKind::Radial; });
  const bool finite = std::all_of(samples.begin(), samples.end(),
                                  [](const Multiplier& m) { return m.support_kind() == SupportKind::Finite; });
  QuadratureResult out{Multiplier::constant(g, 0.0), 0, 0.0};
  auto sweep = [&](std::vector<cd>& v) {
    for (auto& c : v) {
      if (c != cd{} && std::abs(c) < cutoff) {
        ++out.dropped;
        out.dropped_mass += std::abs(c);
        c = cd{};
      }
    }
  };
  if (radial) {
    std::vector<cd> coeffs(max_length + 1);
    detail::parallel_for(max_length + 1, exec, [&](std::size_t l) {
      cd s{};
      for (std::size_t q = 0; q < samples.size(); ++q) s += weights[q] * samples[q].radial_value(l);
      coeffs[l] = s;
    });
    sweep(coeffs);
    out.average = Multiplier::radial(g, std::move(coeffs), "quadrature");
    return out;
  }
  if (finite) {
    std::map<Element, cd> uni;
    for (const auto& m : samples) {
      for (const auto& [t, v] : m.support()) uni.emplace(t, cd{});
    }
    std::vector<Element> keys;
    keys.reserve(uni.size());
    for (const auto& [t, v] : uni) keys.push_back(t);
    std::vector<cd> vals(keys.size());
    detail::parallel_for(keys.size(), exec, [&](std::size_t i) {
      cd s{};
      for (std::size_t q = 0; q < samples.size(); ++q) s += weights[q] * samples[q](keys[i]);
      vals[i] = s;
    });
    sweep(vals);
    std::vector<std::pair<Element, cd>> support;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (vals[i] != cd{}) support.emplace_back(keys[i], vals[i]);
    }
    out.average = Multiplier::finite(g, std::move(support), "quadrature");
    return out;
  }
  throw ValidationError("quadrature averages either radial or finitely supported samples");
}

QuadratureResult fejer_quadrature(const FejerParams& p, const GroupPtr& g, Exec exec) {
  p.validate();
  const std::size_t q = p.nodes();
  std::vector<Multiplier> samples;
  std::vector<cd> weights;
  samples.reserve(q);
  for (std::size_t j = 0; j < q; ++j) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(q);
    samples.push_back(radial_multiplier(g, std::polar(p.r, theta)));
    weights.emplace_back(fejer_kernel(p.N, theta) / static_cast<double>(q));
  }
  // The rule is exact up to degree q - 1, which covers lengths <= 2N + 1.
  return quadrature_average(samples, weights, 2 * p.N + 1, 1e-14, exec);
}

// ------------------------------------------------------------ tree family

namespace {

std::size_t letter_index(std::int64_t x) {
  return x > 0 ? 2 * static_cast<std::size_t>(x - 1) : 2 * static_cast<std::size_t>(-x - 1) + 1;
}

cd tree_c(cd z) { return std::sqrt(1.0 - z * z); }

std::vector<SpMat> build_generators(const Group& g, const Ball& ball, cd z) {
  const cd c = tree_c(z);
  const auto n = static_cast<Index>(ball.size());
  std::vector<SpMat> gens;
  for (const auto& s : g.generators()) {
    const std::int64_t x = s.data[0];
    const Index is = static_cast<Index>(*ball.find(s));
    std::vector<Eigen::Triplet<cd>> trip;
    trip.reserve(ball.size() + 2);
    for (Index j = 0; j < n; ++j) {
      const Element& v = ball.elements[static_cast<std::size_t>(j)];
      if (v.data.empty()) {
        trip.emplace_back(0, j, z);
        trip.emplace_back(is, j, c);
      } else if (v.data.size() == 1 && v.data[0] == -x) {
        trip.emplace_back(0, j, c);
        trip.emplace_back(is, j, -z);
      } else if (auto pos = ball.find(g.multiply(s, v))) {
        trip.emplace_back(static_cast<Index>(*pos), j, 1.0);
      }
    }
    SpMat m(n, n);
    m.setFromTriplets(trip.begin(), trip.end());
    m.makeCompressed();
    gens.push_back(std::move(m));
  }
  return gens;
}

VectorXcd apply_word(const std::vector<SpMat>& gens, const Element& t, VectorXcd v) {
  for (auto it = t.data.rbegin(); it != t.data.rend(); ++it) v = gens[letter_index(*it)] * v;
  return v;
}

// max |A(i,j) - delta_ij| over the leading n x n block of a sparse matrix.
double block_identity_residual(const SpMat& a, Index n) {
  Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(n, n);
  for (Index k = 0; k < n; ++k) {
    for (SpMat::InnerIterator it(a, k); it; ++it) {
      if (it.row() < n) block(it.row(), k) = it.value();
    }
  }
  return (block - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

// zeta_w = sum over the geodesic [e, w] of z^{d(w,u)} c(u) delta_u, c(e) = 1.
void add_zeta(std::map<Element, cd>& out, const Element& w, cd z, cd c, cd scale) {
  const std::size_t n = w.data.size();
  Element u{GroupKind::Free, {}};
  for (std::size_t j = 0; j <= n; ++j) {
    if (j > 0) u.data.push_back(w.data[j - 1]);
    out[u] += scale * complex_power(z, n - j) * (j == 0 ? cd{1.0} : c);
  }
}

}  // namespace

std::vector<std::pair<Element, cd>> exact_column(const Group& g, cd z, const Element& t, const Element& v) {
  if (g.kind() != GroupKind::Free) throw ValidationError("the tree family lives on a free group");
  const cd c = tree_c(z);
  std::map<Element, cd> acc;
  if (v.data.empty()) {
    add_zeta(acc, t, z, c, 1.0);
  } else {
    // pi(t) delta_v = (zeta_{tv} - z zeta_{t p(v)}) / c, p(v) = v without its last letter
    Element parent = v;
    parent.data.pop_back();
    add_zeta(acc, g.multiply(t, v), z, c, 1.0 / c);
    add_zeta(acc, g.multiply(t, parent), z, c, -z / c);
  }
  std::vector<std::pair<Element, cd>> out;
  for (auto& [e, x] : acc) {
    if (x != cd{}) out.emplace_back(e, x);
  }
  return out;
}

VectorXcd FamilyPoint::apply(const Element& t, VectorXcd v) const { return apply_word(generators, t, std::move(v)); }

SpMat FamilyPoint::matrix(const Element& t) const {
  const auto n = static_cast<Index>(ball.size());
  SpMat m(n, n);
  m.setIdentity();
  for (auto it = t.data.begin(); it != t.data.end(); ++it) m = SpMat(m * generators[letter_index(*it)]);
  return m;
}

cd FamilyPoint::coefficient(const Element& t) const {
  VectorXcd e = VectorXcd::Zero(static_cast<Index>(ball.size()));
  e(static_cast<Index>(basepoint)) = 1.0;
  return apply(t, std::move(e))(static_cast<Index>(basepoint));
}

FamilyPoint tree_family_point(cd z, std::size_t radius, std::size_t rank, double tol) {
  if (!(std::abs(z) < 1.0)) throw ValidationError("family parameter must lie in the open unit disk");
  if (radius < 3) throw ValidationError("family ball radius must be at least 3");
  if (rank < 1) throw ValidationError("free group rank must be at least 1");
  FamilyPoint fp;
  fp.group = make_free_group(rank);
  fp.z = z;
  fp.radius = radius;
  fp.ball = fp.group->ball(radius);
  fp.generators = build_generators(*fp.group, fp.ball, z);
  const Group& g = *fp.group;

  const auto inner = static_cast<Index>(fp.ball.prefix_size(fp.interior()));
  const auto n = static_cast<Index>(fp.ball.size());
  const auto& gens = g.generators();
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const SpMat& m = fp.generators[i];
    fp.unitarity_residual = std::max(fp.unitarity_residual, block_identity_residual(SpMat(m.adjoint() * m), inner));
    const SpMat& minv = fp.generators[letter_index(g.inverse(gens[i]).data[0])];
    fp.homomorphism_residual = std::max(fp.homomorphism_residual, block_identity_residual(SpMat(m * minv), inner));
  }
  for (Index k = 0; k < inner; ++k) {
    const Element& t = fp.ball.elements[static_cast<std::size_t>(k)];
    VectorXcd e = VectorXcd::Zero(n);
    e(0) = 1.0;
    const VectorXcd col = fp.apply(t, std::move(e));
    fp.coefficient_residual =
        std::max(fp.coefficient_residual, std::abs(col(0) - complex_power(z, fp.ball.lengths[static_cast<std::size_t>(k)])));
    // Word products against the closed form on the infinite tree.
    VectorXcd exact = VectorXcd::Zero(n);
    for (const auto& [u, x] : exact_column(g, z, t, g.identity())) exact(static_cast<Index>(*fp.ball.find(u))) = x;
    fp.homomorphism_residual = std::max(fp.homomorphism_residual, (col - exact).cwiseAbs().maxCoeff());
  }

  auto fail = [&](const char* what, double r) {
    throw ContractError(std::string("tree family ") + what + " residual " + std::to_string(r) +
                        " exceeds tolerance at z = (" + std::to_string(z.real()) + ", " +
                        std::to_string(z.imag()) + ")");
  };
  if (fp.coefficient_residual > tol) fail("coefficient", fp.coefficient_residual);
  if (fp.homomorphism_residual > tol) fail("homomorphism", fp.homomorphism_residual);
  if (fp.real_point() && fp.unitarity_residual > tol) fail("unitarity", fp.unitarity_residual);
  return fp;
}

double empirical_bound(FamilyPoint& fp, Exec exec) {
  const Group& g = *fp.group;
  const std::size_t inner = fp.ball.prefix_size(fp.interior());
  std::vector<double> norms(inner, 0.0);
  detail::parallel_for(inner, exec, [&](std::size_t k) {
    const Element& t = fp.ball.elements[k];
    std::unordered_map<Element, Index, ElementHash> rows;
    std::vector<Eigen::Triplet<cd>> trip;
    for (std::size_t j = 0; j < inner; ++j) {
      for (const auto& [u, x] : exact_column(g, fp.z, t, fp.ball.elements[j])) {
        auto [it, fresh] = rows.emplace(u, static_cast<Index>(rows.size()));
        trip.emplace_back(it->second, static_cast<Index>(j), x);
      }
    }
    SpMat c(static_cast<Index>(rows.size()), static_cast<Index>(inner));
    c.setFromTriplets(trip.begin(), trip.end());
    const Eigen::MatrixXcd gram = Eigen::MatrixXcd(SpMat(c.adjoint() * c));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
    norms[k] = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  });
  const double b = *std::max_element(norms.begin(), norms.end());
  fp.empirical = b;
  return b;
}

HolomorphyCheck holomorphy_check(const Element& t, cd z0, double h, std::size_t radius, std::size_t rank) {
  if (!(h > 0.0)) throw ValidationError("holomorphy step must be positive");
  const cd steps[4] = {z0 + h, z0 - h, z0 + cd(0.0, h), z0 - cd(0.0, h)};
  for (const cd& z : steps) {
    if (!(std::abs(z) < 1.0)) throw ValidationError("holomorphy step leaves the unit disk");
  }
  if (radius < 3) throw ValidationError("family ball radius must be at least 3");
  const GroupPtr g = make_free_group(rank);
  g->validate(t);
  if (g->word_length(t) > radius - 2) throw ValidationError("element lies outside the family interior");
  const Ball ball = g->ball(radius);
  auto f = [&](cd z) {
    VectorXcd e = VectorXcd::Zero(static_cast<Index>(ball.size()));
    e(0) = 1.0;
    return apply_word(build_generators(*g, ball, z), t, std::move(e))(0);
  };
  const cd fx = (f(steps[0]) - f(steps[1])) / (2.0 * h);
  const cd fy = (f(steps[2]) - f(steps[3])) / (2.0 * h);
  return {std::abs(fx + cd(0.0, 1.0) * fy) / 2.0, f(z0)};
}

FactorizationCertificate certificate_from_ub_rep(const FamilyPoint& fp, const VectorXcd& xi,
                                                 const VectorXcd& eta, std::size_t d) {
  if (d < 1) throw ValidationError("certificate degree must be at least 1");
  const double tol = 1e-8;
  if (fp.coefficient_residual > tol || fp.homomorphism_residual > tol ||
      (fp.real_point() && fp.unitarity_residual > tol)) {
    throw ContractError("family point fails its contract checks");
  }
  if (!fp.empirical) throw ContractError("family point has no empirical bound yet");
  const auto n = static_cast<Index>(fp.ball.size());
  if (xi.size() != n || eta.size() != n) throw ValidationError("vector size differs from the family space");
  const double b = *fp.empirical;
  auto point = std::make_shared<const FamilyPoint>(fp);

  FactorizationCertificate c;
  c.id = "ub_rep(z=" + std::to_string(fp.z.real()) + (fp.z.imag() < 0 ? "" : "+") +
         std::to_string(fp.z.imag()) + "i)";
  c.group = fp.group;
  c.empirical = true;
  c.domain = "products with partial words inside radius " + std::to_string(fp.interior());
  if (d == 1) {
    c.dims = {1, 1};
    c.maps.push_back([point, xi, eta](const Element& t) {
      Eigen::MatrixXcd m(1, 1);
      m(0, 0) = eta.dot(point->apply(t, xi));
      return Operator::dense(std::move(m));
    });
    c.sup_norms = {b * xi.norm() * eta.norm()};
    return c;
  }
  c.dims.assign(d + 1, n);
  c.dims.front() = 1;
  c.dims.back() = 1;
  c.maps.push_back([point, eta](const Element& t) {
    const SpMat m = point->matrix(t);
    return Operator::dense(VectorXcd(m.adjoint() * eta).adjoint());
  });
  for (std::size_t i = 1; i + 1 < d; ++i) {
    c.maps.push_back([point](const Element& t) { return Operator::sparse(point->matrix(t)); });
  }
  c.maps.push_back([point, xi](const Element& t) { return Operator::dense(point->apply(t, xi)); });
  c.sup_norms.assign(d, b);
  c.sup_norms.front() = b * eta.norm();
  c.sup_norms.back() = b * xi.norm();
  return c;
}

FejerEmpiricalUpper fejer_empirical_upper(const FejerParams& p, std::size_t d, std::size_t radius,
                                          std::size_t rank, Exec exec) {
  p.validate();
  const std::size_t q = p.nodes();
  FejerEmpiricalUpper out;
  out.thetas.resize(q);
  out.bounds.assign(q, 0.0);
  // b(conj z) = b(z): nodes j and q - j share a bound.
  for (std::size_t j = 0; j <= q / 2; ++j) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(q);
    FamilyPoint fp = tree_family_point(std::polar(p.r, theta), radius, rank);
    const double b = empirical_bound(fp, exec);
    out.bounds[j] = b;
    if (j > 0) out.bounds[q - j] = b;
  }
  for (std::size_t j = 0; j < q; ++j) {
    out.thetas[j] = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(q);
    out.value += fejer_kernel(p.N, out.thetas[j]) * std::pow(out.bounds[j], static_cast<double>(d)) /
                 static_cast<double>(q);
  }
  return out;
}

}  // namespace mdlab
