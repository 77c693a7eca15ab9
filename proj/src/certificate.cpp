#include "mdlab/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/SVD>

#include "mdlab/errors.hpp"
#include "parallel.hpp"

namespace mdlab {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// ------------------------------------------------------------------ Operator

Operator Operator::dense(MatrixXcd m) {
  Operator op;
  op.rep_ = std::move(m);
  return op;
}

Operator Operator::diagonal(VectorXcd d) {
  Operator op;
  op.rep_ = std::move(d);
  return op;
}

Operator Operator::sparse(Sparse m) {
  m.makeCompressed();
  Operator op;
  op.rep_ = std::move(m);
  return op;
}

Index Operator::rows() const {
  return std::visit([](const auto& m) -> Index { return m.rows(); }, rep_);
}

Index Operator::cols() const {
  if (const auto* d = std::get_if<VectorXcd>(&rep_)) return d->size();
  return std::visit([](const auto& m) -> Index { return m.cols(); }, rep_);
}

VectorXcd Operator::apply(const VectorXcd& x) const {
  if (x.size() != cols()) throw ValidationError("operator applied to a vector of the wrong size");
  if (const auto* d = std::get_if<VectorXcd>(&rep_)) return d->cwiseProduct(x);
  if (const auto* s = std::get_if<Sparse>(&rep_)) return *s * x;
  return std::get<MatrixXcd>(rep_) * x;
}

Operator Operator::operator*(const Operator& other) const {
  if (cols() != other.rows()) throw ValidationError("operator product shape mismatch");
  const auto* a = std::get_if<VectorXcd>(&rep_);
  const auto* b = std::get_if<VectorXcd>(&other.rep_);
  if (a && b) return diagonal(a->cwiseProduct(*b));
  const auto* sa = std::get_if<Sparse>(&rep_);
  const auto* sb = std::get_if<Sparse>(&other.rep_);
  if (sa && sb) return sparse(Sparse(*sa * *sb));
  return dense(to_dense() * other.to_dense());
}

Operator Operator::adjoint() const {
  if (const auto* d = std::get_if<VectorXcd>(&rep_)) return diagonal(d->conjugate());
  if (const auto* s = std::get_if<Sparse>(&rep_)) return sparse(Sparse(s->adjoint()));
  return dense(std::get<MatrixXcd>(rep_).adjoint());
}

MatrixXcd Operator::to_dense() const {
  if (const auto* d = std::get_if<VectorXcd>(&rep_)) return d->asDiagonal();
  if (const auto* s = std::get_if<Sparse>(&rep_)) return MatrixXcd(*s);
  return std::get<MatrixXcd>(rep_);
}

double Operator::norm() const {
  if (rows() == 0 || cols() == 0) return 0.0;
  if (const auto* d = std::get_if<VectorXcd>(&rep_)) return d->cwiseAbs().maxCoeff();
  Eigen::BDCSVD<MatrixXcd> svd(to_dense());
  return svd.singularValues()(0);
}

namespace {

double max_abs_diff(const Operator& a, const Operator& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  if (a.is_diagonal() && b.is_diagonal()) {
    const VectorXcd e = VectorXcd::Ones(a.cols());
    return (a.apply(e) - b.apply(e)).cwiseAbs().maxCoeff();
  }
  return (a.to_dense() - b.to_dense()).cwiseAbs().maxCoeff();
}

Operator identity_like(const Operator& a) { return Operator::diagonal(VectorXcd::Ones(a.cols())); }

void check_certificate_shape(const FactorizationCertificate& c) {
  const std::size_t d = c.maps.size();
  if (d == 0) throw ValidationError("certificate " + c.id + " has degree 0");
  if (c.dims.size() != d + 1 || c.sup_norms.size() != d) {
    throw ValidationError("certificate " + c.id + " has inconsistent dimension data");
  }
  if (c.dims.front() != 1 || c.dims.back() != 1) {
    throw ValidationError("certificate " + c.id + " boundary dimensions must be 1");
  }
  for (auto n : c.dims) {
    if (n < 1) throw ValidationError("certificate " + c.id + " has an empty space");
  }
  for (double s : c.sup_norms) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw ValidationError("certificate " + c.id + " has a bad sup norm");
  }
}

// e^{2 pi i m / q} for m = 0..q-1.
std::vector<cd> roots_of_unity(std::size_t q) {
  std::vector<cd> r(q);
  for (std::size_t m = 0; m < q; ++m) {
    r[m] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(q));
  }
  return r;
}

std::size_t mod_q(std::int64_t x, std::size_t q) {
  const auto qq = static_cast<std::int64_t>(q);
  return static_cast<std::size_t>(((x % qq) + qq) % qq);
}

std::size_t grid_size(std::size_t q, std::size_t n) {
  std::size_t total = 1;
  for (std::size_t a = 0; a < n; ++a) {
    if (total > (std::size_t{1} << 24) / q) throw ResourceError("torus grid too large");
    total *= q;
  }
  return total;
}

}  // namespace

double md_upper_from_certificate(const FactorizationCertificate& c) {
  check_certificate_shape(c);
  double p = 1.0;
  for (double s : c.sup_norms) p *= s;
  return p;
}

CertificateCheck verify_certificate(const FactorizationCertificate& c, const Multiplier& phi,
                                    const Ball& ball, const VerifyOptions& options) {
  check_certificate_shape(c);
  const std::size_t d = c.degree();
  const std::size_t b = ball.size();
  const Group& g = *phi.group();
  if (b == 0) return {};

  // Matrices of every map on every ball element.
  std::vector<std::vector<Operator>> ops(d, std::vector<Operator>(b));
  for (std::size_t i = 0; i < d; ++i) {
    detail::parallel_for(b, options.exec, [&](std::size_t k) {
      Operator op = c.maps[i](ball.elements[k]);
      if (op.rows() != c.dims[i] || op.cols() != c.dims[i + 1]) {
        throw ValidationError("certificate " + c.id + " map " + std::to_string(i + 1) +
                              " has the wrong shape");
      }
      ops[i][k] = std::move(op);
    });
  }
  const VectorXcd one = VectorXcd::Ones(1);

  double total = 1.0;
  for (std::size_t i = 0; i < d; ++i) total *= static_cast<double>(b);

  CertificateCheck out;
  if (total <= static_cast<double>(options.exhaustive_cap)) {
    // Depth-first over tuples, sharing suffix products t_i ... t_d.
    std::vector<double> worst(b, 0.0);
    detail::parallel_for(b, options.exec, [&](std::size_t last) {
      double w = 0.0;
      auto descend = [&](auto&& self, std::size_t level, const VectorXcd& v, const Element& suffix) -> void {
        for (std::size_t k = 0; k < b; ++k) {
          const VectorXcd next = ops[level][k].apply(v);
          const Element prod = g.multiply(ball.elements[k], suffix);
          if (level == 0) {
            w = std::max(w, std::abs(phi(prod) - next(0)));
          } else {
            self(self, level - 1, next, prod);
          }
        }
      };
      const VectorXcd v = ops[d - 1][last].apply(one);
      if (d == 1) {
        w = std::abs(phi(ball.elements[last]) - v(0));
      } else {
        descend(descend, d - 2, v, ball.elements[last]);
      }
      worst[last] = w;
    });
    out.residual = *std::max_element(worst.begin(), worst.end());
    out.tuples = static_cast<std::size_t>(total);
    out.exhaustive = true;
    out.coverage = 1.0;
    return out;
  }

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick(0, b - 1);
  std::vector<std::size_t> idx(options.samples * d);
  for (auto& x : idx) x = pick(rng);
  std::vector<double> worst(options.samples, 0.0);
  detail::parallel_for(options.samples, options.exec, [&](std::size_t s) {
    const std::size_t* tuple = idx.data() + s * d;
    VectorXcd v = one;
    Element prod = g.identity();
    for (std::size_t i = d; i-- > 0;) {
      v = ops[i][tuple[i]].apply(v);
      prod = g.multiply(ball.elements[tuple[i]], prod);
    }
    worst[s] = std::abs(phi(prod) - v(0));
  });
  out.residual = options.samples ? *std::max_element(worst.begin(), worst.end()) : 0.0;
  out.tuples = options.samples;
  out.exhaustive = false;
  out.coverage = static_cast<double>(options.samples) / total;
  return out;
}

std::vector<double> sup_norm_excess(const FactorizationCertificate& c, const Ball& ball) {
  check_certificate_shape(c);
  std::vector<double> excess(c.degree(), -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < c.degree(); ++i) {
    for (const auto& t : ball.elements) {
      excess[i] = std::max(excess[i], c.maps[i](t).norm() - c.sup_norms[i]);
    }
  }
  return excess;
}

RepCheck check_unitary_rep(const UnitaryRep& pi, const std::vector<Element>& sample) {
  RepCheck r;
  const Group& g = *pi.group;
  std::vector<Operator> mats;
  mats.reserve(sample.size());
  for (const auto& s : sample) {
    Operator m = pi.matrix(s);
    if (m.rows() != pi.dim || m.cols() != pi.dim) throw ValidationError("representation matrix has the wrong size");
    r.unitarity_residual = std::max(r.unitarity_residual, max_abs_diff(m.adjoint() * m, identity_like(m)));
    mats.push_back(std::move(m));
  }
  for (std::size_t i = 0; i < sample.size(); ++i) {
    for (std::size_t j = 0; j < sample.size(); ++j) {
      const Operator st = pi.matrix(g.multiply(sample[i], sample[j]));
      r.homomorphism_residual = std::max(r.homomorphism_residual, max_abs_diff(mats[i] * mats[j], st));
    }
  }
  return r;
}

FactorizationCertificate certificate_from_unitary_rep(const UnitaryRep& pi, const VectorXcd& xi,
                                                      const VectorXcd& eta, std::size_t d,
                                                      const std::vector<Element>& sample) {
  if (d < 1) throw ValidationError("certificate degree must be at least 1");
  if (xi.size() != pi.dim || eta.size() != pi.dim) throw ValidationError("vector size differs from the representation");
  const RepCheck rc = check_unitary_rep(pi, sample);
  if (rc.unitarity_residual > 1e-12) {
    throw ValidationError("representation " + pi.id + " is not unitary on the sample (residual " +
                          std::to_string(rc.unitarity_residual) + ")");
  }
  if (rc.homomorphism_residual > 1e-12) {
    throw ValidationError("representation " + pi.id + " is not a homomorphism on the sample (residual " +
                          std::to_string(rc.homomorphism_residual) + ")");
  }
  FactorizationCertificate c;
  c.id = pi.id;
  c.group = pi.group;
  auto matrix = pi.matrix;
  if (d == 1) {
    c.dims = {1, 1};
    c.maps.push_back([matrix, xi, eta](const Element& t) {
      MatrixXcd m(1, 1);
      m(0, 0) = eta.dot(matrix(t).apply(xi));
      return Operator::dense(std::move(m));
    });
    c.sup_norms = {xi.norm() * eta.norm()};
    return c;
  }
  c.dims.assign(d + 1, pi.dim);
  c.dims.front() = 1;
  c.dims.back() = 1;
  c.maps.push_back([matrix, eta](const Element& t) {
    return Operator::dense(matrix(t).adjoint().apply(eta).adjoint());
  });
  for (std::size_t i = 1; i + 1 < d; ++i) c.maps.push_back(matrix);
  c.maps.push_back([matrix, xi](const Element& t) { return Operator::dense(matrix(t).apply(xi)); });
  c.sup_norms.assign(d, 1.0);
  c.sup_norms.front() = eta.norm();
  c.sup_norms.back() = xi.norm();
  return c;
}

UnitaryRep trivial_rep(const GroupPtr& g) {
  return {g, 1, [](const Element&) { return Operator::diagonal(VectorXcd::Ones(1)); }, "trivial"};
}

UnitaryRep regular_rep_finite(const GroupPtr& g, Index multiplicity) {
  const auto order = g->order();
  if (!order) throw ValidationError("regular representation matrices need a finite group");
  if (multiplicity < 1) throw ValidationError("multiplicity must be positive");
  const auto n = static_cast<Index>(*order);
  const Index r = multiplicity;
  auto matrix = [g, n, r](const Element& t) {
    std::vector<Eigen::Triplet<cd>> trip;
    trip.reserve(static_cast<std::size_t>(n * r));
    for (Index s = 0; s < n; ++s) {
      const Index ts = g->multiply(t, Element{GroupKind::Finite, {s}}).data[0];
      for (Index j = 0; j < r; ++j) trip.emplace_back(ts * r + j, s * r + j, 1.0);
    }
    Operator::Sparse m(n * r, n * r);
    m.setFromTriplets(trip.begin(), trip.end());
    return Operator::sparse(std::move(m));
  };
  return {g, n * r, matrix, "regular"};
}

UnitaryRep torus_rep(const GroupPtr& zn, std::size_t q) {
  if (zn->kind() != GroupKind::Zn) throw ValidationError("torus representation needs Z^n");
  if (q < 1) throw ValidationError("torus grid needs at least one node");
  const std::size_t n = zn->identity().data.size();
  const std::size_t total = grid_size(q, n);
  auto roots = std::make_shared<std::vector<cd>>(roots_of_unity(q));
  auto matrix = [q, n, total, roots](const Element& t) {
    std::vector<std::size_t> tm(n);
    for (std::size_t a = 0; a < n; ++a) tm[a] = mod_q(t.data[a], q);
    VectorXcd d(static_cast<Index>(total));
    for (std::size_t node = 0; node < total; ++node) {
      std::size_t rest = node, phase = 0;
      for (std::size_t a = 0; a < n; ++a) {
        phase = (phase + tm[a] * (rest % q)) % q;
        rest /= q;
      }
      d(static_cast<Index>(node)) = (*roots)[phase];
    }
    return Operator::diagonal(std::move(d));
  };
  return {zn, static_cast<Index>(total), matrix, "torus(q=" + std::to_string(q) + ")"};
}

namespace {

std::vector<Element> small_sample(const GroupPtr& g) {
  std::vector<Element> s{g->identity()};
  for (const auto& x : g->generators()) s.push_back(x);
  const auto& gens = g->generators();
  for (std::size_t i = 0; i < gens.size() && i < 3; ++i) s.push_back(g->multiply(gens[i], gens[(i + 2) % gens.size()]));
  return s;
}

// xi_q = sqrt(w |p_q|), eta_q = conj(phase(p_q)) sqrt(w |p_q|).
std::pair<VectorXcd, VectorXcd> split_density(const VectorXcd& p, double w) {
  VectorXcd xi(p.size()), eta(p.size());
  for (Index k = 0; k < p.size(); ++k) {
    const double a = std::abs(p(k));
    const double root = std::sqrt(w * a);
    xi(k) = root;
    eta(k) = a > 0.0 ? std::conj(p(k) / a) * root : cd{};
  }
  return {xi, eta};
}

}  // namespace

FactorizationCertificate constant_certificate(const GroupPtr& g, cd c, std::size_t d) {
  VectorXcd xi(1), eta(1);
  const double a = std::abs(c);
  xi(0) = std::sqrt(a);
  eta(0) = a > 0.0 ? std::conj(c / a) * std::sqrt(a) : cd{};
  auto cert = certificate_from_unitary_rep(trivial_rep(g), xi, eta, d, small_sample(g));
  cert.id = "trivial";
  return cert;
}

FactorizationCertificate finite_group_certificate(const Multiplier& phi, std::size_t d) {
  const GroupPtr& g = phi.group();
  const auto order = g->order();
  if (!order) throw ValidationError("finite_group_certificate needs a finite group");
  const auto n = static_cast<Index>(*order);
  // X = (1/|G|) sum_s phi(s) lambda(s)^*, so that phi(t) = tr(lambda(t) X).
  MatrixXcd x = MatrixXcd::Zero(n, n);
  for (Index s = 0; s < n; ++s) {
    const Element es{GroupKind::Finite, {s}};
    const cd v = phi(es);
    if (v == cd{}) continue;
    for (Index u = 0; u < n; ++u) {
      const Index su = g->multiply(es, Element{GroupKind::Finite, {u}}).data[0];
      // lambda(s)^* maps delta_su to delta_u
      x(u, su) += v;
    }
  }
  x /= static_cast<double>(n);
  Eigen::BDCSVD<MatrixXcd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  Index r = 0;
  while (r < sv.size() && sv(r) > 1e-14 * std::max(sv(0), 1e-300)) ++r;
  r = std::max<Index>(r, 1);
  VectorXcd xi(n * r), eta(n * r);
  for (Index s = 0; s < n; ++s) {
    for (Index k = 0; k < r; ++k) {
      const double root = std::sqrt(sv(k));
      xi(s * r + k) = root * svd.matrixU()(s, k);
      eta(s * r + k) = root * svd.matrixV()(s, k);
    }
  }
  std::vector<Element> sample;
  for (Index s = 0; s < std::min<Index>(n, 16); ++s) sample.push_back(Element{GroupKind::Finite, {s}});
  auto cert = certificate_from_unitary_rep(regular_rep_finite(g, r), xi, eta, d, sample);
  cert.id = "finite_regular(rank=" + std::to_string(r) + ")";
  return cert;
}

FactorizationCertificate density_certificate(const GroupPtr& zn,
                                             const std::function<cd(const std::vector<double>&)>& density,
                                             std::size_t d, std::size_t q, std::string id) {
  UnitaryRep pi = torus_rep(zn, q);
  const std::size_t n = zn->identity().data.size();
  VectorXcd p(pi.dim);
  std::vector<double> theta(n);
  for (Index node = 0; node < pi.dim; ++node) {
    auto rest = static_cast<std::size_t>(node);
    for (std::size_t a = 0; a < n; ++a) {
      theta[a] = 2.0 * std::numbers::pi * static_cast<double>(rest % q) / static_cast<double>(q);
      rest /= q;
    }
    p(node) = density(theta);
  }
  auto [xi, eta] = split_density(p, 1.0 / static_cast<double>(pi.dim));
  auto cert = certificate_from_unitary_rep(pi, xi, eta, d, small_sample(zn));
  cert.id = std::move(id);
  cert.domain = "products t with max|t_i| < " + std::to_string(q) + " minus the density bandwidth";
  return cert;
}

FactorizationCertificate fourier_certificate(const Multiplier& phi, std::size_t d, std::size_t q) {
  const GroupPtr& zn = phi.group();
  if (zn->kind() != GroupKind::Zn) throw ValidationError("fourier_certificate needs Z^n");
  const auto support = enumerate_support(phi);
  UnitaryRep pi = torus_rep(zn, q);
  const std::size_t n = zn->identity().data.size();
  const auto roots = roots_of_unity(q);
  // p(theta) = sum_m phi(m) e^{-i m.theta}
  VectorXcd p = VectorXcd::Zero(pi.dim);
  std::int64_t width = 0;
  for (const auto& [m, v] : support) {
    std::vector<std::size_t> mm(n);
    for (std::size_t a = 0; a < n; ++a) {
      mm[a] = mod_q(-m.data[a], q);
      width = std::max(width, m.data[a] < 0 ? -m.data[a] : m.data[a]);
    }
    for (Index node = 0; node < pi.dim; ++node) {
      auto rest = static_cast<std::size_t>(node);
      std::size_t phase = 0;
      for (std::size_t a = 0; a < n; ++a) {
        phase = (phase + mm[a] * (rest % q)) % q;
        rest /= q;
      }
      p(node) += v * roots[phase];
    }
  }
  auto [xi, eta] = split_density(p, 1.0 / static_cast<double>(pi.dim));
  auto cert = certificate_from_unitary_rep(pi, xi, eta, d, small_sample(zn));
  cert.id = "fourier(q=" + std::to_string(q) + ")";
  cert.domain = "products t with max|t_i| < " + std::to_string(static_cast<std::int64_t>(q) - width);
  return cert;
}

namespace {

FactorizationCertificate regular_impl(const FinitelySupportedVector& xi,
                                      std::function<cd(const Element&)> eta, double eta_norm,
                                      std::size_t d, const Ball& window, std::string id) {
  if (d < 1) throw ValidationError("certificate degree must be at least 1");
  const GroupPtr g = xi.group();
  if (window.group.get() != g.get() && window.group->name() != g->name()) {
    throw ValidationError("window lives in another group");
  }
  auto win = std::make_shared<const Ball>(window);
  auto xs = std::make_shared<const std::vector<std::pair<Element, cd>>>(xi.terms().begin(), xi.terms().end());
  const auto w = static_cast<Index>(win->size());
  FactorizationCertificate c;
  c.id = std::move(id);
  c.group = g;
  c.domain = "products whose partial products stay in the radius-" + std::to_string(window.radius) + " window";
  if (d == 1) {
    c.dims = {1, 1};
    c.maps.push_back([g, xs, eta](const Element& t) {
      MatrixXcd m(1, 1);
      m(0, 0) = 0.0;
      for (const auto& [s, v] : *xs) m(0, 0) += v * std::conj(eta(g->multiply(t, s)));
      return Operator::dense(std::move(m));
    });
    c.sup_norms = {xi.l2_norm() * eta_norm};
    return c;
  }
  c.dims.assign(d + 1, w);
  c.dims.front() = 1;
  c.dims.back() = 1;
  // eta^* lambda(t): entry w is conj(eta(t w)), exact without truncation.
  c.maps.push_back([g, win, eta, w](const Element& t) {
    MatrixXcd row(1, w);
    for (Index k = 0; k < w; ++k) row(0, k) = std::conj(eta(g->multiply(t, win->elements[static_cast<std::size_t>(k)])));
    return Operator::dense(std::move(row));
  });
  auto lambda = [g, win, w](const Element& t) {
    std::vector<Eigen::Triplet<cd>> trip;
    for (Index k = 0; k < w; ++k) {
      if (auto pos = win->find(g->multiply(t, win->elements[static_cast<std::size_t>(k)]))) {
        trip.emplace_back(static_cast<Index>(*pos), k, 1.0);
      }
    }
    Operator::Sparse m(w, w);
    m.setFromTriplets(trip.begin(), trip.end());
    return Operator::sparse(std::move(m));
  };
  for (std::size_t i = 1; i + 1 < d; ++i) c.maps.push_back(lambda);
  c.maps.push_back([g, win, xs, w](const Element& t) {
    MatrixXcd col = MatrixXcd::Zero(w, 1);
    for (const auto& [s, v] : *xs) {
      if (auto pos = win->find(g->multiply(t, s))) col(static_cast<Index>(*pos), 0) += v;
    }
    return Operator::dense(std::move(col));
  });
  c.sup_norms.assign(d, 1.0);
  c.sup_norms.front() = eta_norm;
  c.sup_norms.back() = xi.l2_norm();
  return c;
}

// Number of elements of each length up to `radius`.
std::vector<double> sphere_sizes(const GroupPtr& g, std::size_t radius) {
  std::vector<double> s(radius + 1, 0.0);
  if (g->kind() == GroupKind::Free) {
    const double k2 = static_cast<double>(g->generators().size());
    s[0] = 1.0;
    for (std::size_t l = 1; l <= radius; ++l) s[l] = k2 * std::pow(k2 - 1.0, static_cast<double>(l - 1));
    return s;
  }
  const Ball b = g->ball(radius);
  for (auto l : b.lengths) s[l] += 1.0;
  return s;
}

}  // namespace

FactorizationCertificate regular_certificate(const FinitelySupportedVector& xi,
                                             const FinitelySupportedVector& eta, std::size_t d,
                                             const Ball& window, std::string id) {
  auto terms = std::make_shared<std::map<Element, cd>>(eta.terms());
  auto eta_fn = [terms](const Element& t) {
    auto it = terms->find(t);
    return it == terms->end() ? cd{} : it->second;
  };
  return regular_impl(xi, eta_fn, eta.l2_norm(), d, window, std::move(id));
}

FactorizationCertificate l2_certificate(const Multiplier& phi, std::size_t d, const Ball& window) {
  const GroupPtr& g = phi.group();
  FinitelySupportedVector delta(g);
  delta.add(g->identity(), 1.0);
  double norm2 = 0.0;
  if (const auto* coeffs = phi.radial_coefficients()) {
    const auto sizes = sphere_sizes(g, coeffs->empty() ? 0 : coeffs->size() - 1);
    for (std::size_t l = 0; l < coeffs->size(); ++l) norm2 += sizes[l] * std::norm((*coeffs)[l]);
  } else {
    for (const auto& [t, v] : enumerate_support(phi)) norm2 += std::norm(v);
  }
  auto eta = [phi](const Element& t) { return std::conj(phi(t)); };
  return regular_impl(delta, eta, std::sqrt(norm2), d, window, "l2_regular");
}

FactorizationCertificate restrict_certificate(const FactorizationCertificate& c, const Embedding& e) {
  FactorizationCertificate r = c;
  r.group = e.sub;
  r.id = c.id + "|sub";
  r.maps.clear();
  for (const auto& m : c.maps) {
    auto map = e.map;
    r.maps.push_back([m, map](const Element& h) { return m(map(h)); });
  }
  return r;
}

std::vector<std::pair<Element, cd>> enumerate_support(const Multiplier& phi) {
  if (phi.support_kind() == SupportKind::Finite) return phi.support();
  if (const auto* coeffs = phi.radial_coefficients()) {
    std::vector<std::pair<Element, cd>> out;
    if (coeffs->empty()) return out;
    const Ball b = phi.group()->ball(coeffs->size() - 1);
    for (std::size_t i = 0; i < b.size(); ++i) {
      const cd v = (*coeffs)[b.lengths[i]];
      if (v != cd{}) out.emplace_back(b.elements[i], v);
    }
    return out;
  }
  throw EvaluationError("multiplier " + phi.id() + " has no enumerable finite support");
}

}  // namespace mdlab
