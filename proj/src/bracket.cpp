#include "mdlab/bracket.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "mdlab/errors.hpp"

namespace mdlab {

bool NormBracket::has_flag(const std::string& f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

std::string NormBracket::flag_string() const {
  std::string s;
  for (const auto& f : flags) {
    if (!s.empty()) s += '|';
    s += f;
  }
  return s;
}

namespace {

void add_flag(NormBracket& b, const std::string& f) {
  if (!b.has_flag(f)) b.flags.push_back(f);
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

std::size_t support_width(const std::vector<std::pair<Element, cd>>& support) {
  std::int64_t w = 0;
  for (const auto& [t, v] : support) {
    for (auto x : t.data) w = std::max(w, x < 0 ? -x : x);
  }
  return static_cast<std::size_t>(w);
}

bool enumerable(const Multiplier& phi) {
  return phi.support_kind() == SupportKind::Finite || phi.radial_coefficients() != nullptr;
}

double tent(std::size_t k, const std::vector<std::int64_t>& m) {
  double v = 1.0;
  for (auto x : m) {
    v *= std::max(0.0, 1.0 - static_cast<double>(x < 0 ? -x : x) / static_cast<double>(k + 1));
  }
  return v;
}

const QuotientStructure& semidirect_quotient(const Group& g) {
  const QuotientStructure* qs = g.quotient();
  if (qs == nullptr || g.kind() != GroupKind::SL2ZSemidirect) {
    throw ValidationError("the extension pipeline needs SL(2,Z) x| Z^2 with its quotient structure");
  }
  return *qs;
}

}  // namespace

std::vector<FactorizationCertificate> candidate_certificates(const Multiplier& phi, std::size_t d,
                                                             const BracketOptions& options) {
  const GroupPtr& g = phi.group();
  std::vector<FactorizationCertificate> out;
  if (auto c = phi.constant_value()) {
    out.push_back(constant_certificate(g, *c, d));
    return out;
  }
  if (g->order()) {
    out.push_back(finite_group_certificate(phi, d));
    return out;
  }
  if (!enumerable(phi)) return out;
  if (g->kind() == GroupKind::Zn) {
    const auto support = enumerate_support(phi);
    const std::size_t n = g->identity().data.size();
    std::size_t q = options.fourier_nodes;
    if (q == 0) {
      q = 4 * (d * options.radius + support_width(support) + 1);
      if (n == 1) q = std::max<std::size_t>(q, 4096);
    }
    try {
      out.push_back(fourier_certificate(phi, d, q));
    } catch (const ResourceError&) {
      // torus grid too large for this n; fall through to the regular certificate
    }
  }
  const std::size_t window = (d > 1 ? d - 1 : 1) * options.radius;
  out.push_back(l2_certificate(phi, d, g->ball(window)));
  return out;
}

NormBracket bracket(const Multiplier& phi, std::size_t d, const BracketOptions& options) {
  if (d < 1) throw ValidationError("d must be at least 1");
  const GroupPtr& g = phi.group();
  NormBracket b;
  b.phi_id = phi.id();
  b.d = d;
  b.radius = options.radius;
  const Ball ball = g->ball(options.radius);

  if (d == 1) {
    double m = 0.0;
    for (const auto& t : ball.elements) m = std::max(m, std::abs(phi(t)));
    b.lower = m;
    b.lower_provenance = "sup_on_ball(R=" + std::to_string(options.radius) + ")";
    if (auto c = phi.constant_value()) {
      b.upper = std::abs(*c);
      b.upper_provenance = "exact_sup(constant)";
      add_flag(b, "CERTIFIED_UPPER");
    } else if (enumerable(phi)) {
      double s = 0.0;
      if (const auto* coeffs = phi.radial_coefficients()) {
        for (cd c : *coeffs) s = std::max(s, std::abs(c));
      } else {
        for (const auto& [t, v] : phi.support()) s = std::max(s, std::abs(v));
      }
      b.upper = s;
      b.upper_provenance = "exact_sup(support)";
      add_flag(b, "CERTIFIED_UPPER");
    }
  } else {
    const LowerBound lb = m2_lower_bound(phi, ball.elements, options.schur, options.exec);
    b.lower = lb.value;
    b.lower_provenance = "schur(F=B_" + std::to_string(options.radius) + ";n=" + std::to_string(ball.size()) +
                         ";gap=" + fmt(lb.solution.upper - lb.solution.lower) + ")";
    if (!lb.solution.converged) add_flag(b, "NONCONVERGED");
  }

  if (!b.has_flag("CERTIFIED_UPPER")) {
    VerifyOptions vo = options.verify;
    vo.exec = options.exec;
    for (const auto& cert : candidate_certificates(phi, d, options)) {
      const CertificateCheck check = verify_certificate(cert, phi, ball, vo);
      if (!(check.residual <= options.cert_tol)) continue;
      const double bound = md_upper_from_certificate(cert);
      if (bound < b.upper) {
        b.upper = bound;
        b.upper_provenance = cert.id + "(verified on B_" + std::to_string(options.radius) + "^" +
                             std::to_string(d) + (check.exhaustive ? "" : " sampled") +
                             ";residual=" + fmt(check.residual) + ")";
        b.flags.erase(std::remove(b.flags.begin(), b.flags.end(), "SAMPLED"), b.flags.end());
        if (!check.exhaustive) add_flag(b, "SAMPLED");
        if (cert.empirical) add_flag(b, "EMPIRICAL");
      }
    }
    if (std::isfinite(b.upper)) {
      add_flag(b, "CERTIFIED_UPPER");
    } else {
      add_flag(b, "NO_UPPER");
    }
  }
  if (b.lower > b.upper + options.tol) add_flag(b, "INCONSISTENT");
  return b;
}

Multiplier folner_approximant(const GroupPtr& zn, std::size_t k) {
  if (!zn || zn->kind() != GroupKind::Zn) throw ValidationError("Folner boxes live in Z^n");
  const std::size_t n = zn->identity().data.size();
  const auto kk = static_cast<std::int64_t>(k);
  std::vector<std::pair<Element, cd>> support;
  std::vector<std::int64_t> m(n, -kk);
  while (true) {
    support.emplace_back(Element{GroupKind::Zn, m}, tent(k, m));
    std::size_t a = 0;
    while (a < n && m[a] == kk) m[a++] = -kk;
    if (a == n) break;
    ++m[a];
  }
  return Multiplier::finite(zn, std::move(support), "folner(k=" + std::to_string(k) + ")");
}

FactorizationCertificate folner_certificate(const GroupPtr& zn, std::size_t k, std::size_t d,
                                            std::size_t radius) {
  if (!zn || zn->kind() != GroupKind::Zn) throw ValidationError("Folner boxes live in Z^n");
  const std::size_t n = zn->identity().data.size();
  double size = 1.0;
  for (std::size_t a = 0; a < n; ++a) size *= static_cast<double>(k + 1);
  FinitelySupportedVector box(zn);
  std::vector<std::int64_t> m(n, 0);
  const auto kk = static_cast<std::int64_t>(k);
  while (true) {
    box.add(Element{GroupKind::Zn, m}, 1.0 / std::sqrt(size));
    std::size_t a = 0;
    while (a < n && m[a] == kk) m[a++] = 0;
    if (a == n) break;
    ++m[a];
  }
  const std::size_t window = (d > 1 ? d - 1 : 0) * radius + n * k;
  auto c = regular_certificate(box, box, d, zn->ball(window), "folner_box(k=" + std::to_string(k) + ")");
  // |F|^{-1/2} 1_F is a unit vector; summing |F| rounded squares is not exactly 1.
  c.sup_norms.front() = 1.0;
  c.sup_norms.back() = 1.0;
  return c;
}

FinitelySupportedVector lifted_quotient_approximant(const GroupPtr& semidirect, std::size_t k) {
  const QuotientStructure& qs = semidirect_quotient(*semidirect);
  if (k < 2) throw ValidationError("extension index k must be at least 2");
  const double r = 1.0 - 1.0 / static_cast<double>(k);
  const Ball b = qs.quotient->ball(k);
  FinitelySupportedVector f(semidirect);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const std::size_t l = b.lengths[i];
    const double v = fejer_kernel_coeff(k, static_cast<std::int64_t>(l)) * std::pow(r, static_cast<double>(l));
    if (v != 0.0) f.add(semidirect->inverse(qs.lift(b.elements[i])), v);
  }
  return f;
}

namespace {

// f bucketed by coset q(w), shared by the lazy evaluators.
struct CosetBuckets {
  GroupPtr group;
  const QuotientStructure* qs = nullptr;
  std::map<Element, std::vector<std::pair<Element, cd>>> by_coset;
};

std::shared_ptr<const CosetBuckets> bucket(const FinitelySupportedVector& f) {
  auto b = std::make_shared<CosetBuckets>();
  b->group = f.group();
  b->qs = &semidirect_quotient(*b->group);
  for (const auto& [w, c] : f.terms()) b->by_coset[b->qs->project(w)].emplace_back(w, c);
  return b;
}

}  // namespace

Multiplier extension_pipeline(const FinitelySupportedVector& f, std::size_t k) {
  auto b = bucket(f);
  return Multiplier::lazy(
      b->group,
      [b, k](const Element& t) {
        // w t lies in the kernel exactly when q(w) = q(t)^{-1}.
        auto it = b->by_coset.find(b->qs->quotient->inverse(b->qs->project(t)));
        if (it == b->by_coset.end()) return cd{};
        cd s{};
        for (const auto& [w, c] : it->second) {
          s += c * tent(k, b->qs->kernel_coordinates(b->group->multiply(w, t)).data);
        }
        return s;
      },
      false, "extension(k=" + std::to_string(k) + ")");
}

Multiplier extension_limit(const FinitelySupportedVector& f) {
  auto b = bucket(f);
  return Multiplier::lazy(
      b->group,
      [b](const Element& t) {
        auto it = b->by_coset.find(b->qs->quotient->inverse(b->qs->project(t)));
        if (it == b->by_coset.end()) return cd{};
        cd s{};
        for (const auto& [w, c] : it->second) s += c;
        return s;
      },
      false, "extension_limit");
}

double window_residual(const Multiplier& phi, const std::vector<Element>& window) {
  double r = 0.0;
  for (const auto& t : window) r = std::max(r, std::abs(phi(t) - 1.0));
  return r;
}

double aitken_limit(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  if (x.size() < 3) return x.back();
  const double a = x[x.size() - 3], b = x[x.size() - 2], c = x[x.size() - 1];
  const double den = (c - b) - (b - a);
  if (std::abs(den) < 1e-300) return c;
  const double lim = c - (c - b) * (c - b) / den;
  // Extrapolation only makes sense towards the direction of travel.
  return std::clamp(lim, 0.0, c);
}

ConvergenceReport convergence_report(std::vector<ConvergenceRow> rows, double C, double tol) {
  ConvergenceReport rep;
  rep.C = C;
  rep.tol = tol;
  rep.monotone = true;
  rep.bounded = true;
  std::vector<double> res;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    res.push_back(rows[i].residual);
    if (i > 0 && rows[i].residual > rows[i - 1].residual + 1e-15) rep.monotone = false;
    if (!(rows[i].bracket.upper <= C + tol)) rep.bounded = false;
  }
  rep.limit_estimate = aitken_limit(res);
  rep.success = !rows.empty() && rep.monotone && rep.bounded && rep.limit_estimate <= kResidualLimitThreshold;
  for (auto& row : rows) add_flag(row.bracket, rep.success ? "SUCCESS" : "NO_SUCCESS");
  rep.rows = std::move(rows);
  return rep;
}

ConvergenceReport run_fejer(const FejerJob& job) {
  if (!job.group) throw ValidationError("fejer job needs a group");
  if (job.Ns.empty() || job.rs.empty()) throw ValidationError("fejer job needs N and r values");
  if (job.rs.size() != 1 && job.Ns.size() != 1 && job.rs.size() != job.Ns.size()) {
    throw ValidationError("N-list and r-list must have equal length or one entry");
  }
  if (job.empirical && job.group->kind() != GroupKind::Free) {
    throw ValidationError("empirical Fejer bounds need a free group");
  }
  const std::size_t len = std::max(job.Ns.size(), job.rs.size());
  const Ball window = job.group->ball(job.window_radius);
  std::vector<ConvergenceRow> rows;
  for (std::size_t i = 0; i < len; ++i) {
    FejerParams p;
    p.N = job.Ns[job.Ns.size() == 1 ? 0 : i];
    p.r = job.rs[job.rs.size() == 1 ? 0 : i];
    p.validate();
    const Multiplier phi = fejer_multiplier(p, job.group);
    ConvergenceRow row;
    row.n = i + 1;
    row.N = p.N;
    row.r = p.r;
    row.residual = window_residual(phi, window.elements);
    row.bracket = bracket(phi, job.d, job.bracket);
    if (job.empirical) {
      const std::size_t rank = job.group->generators().size() / 2;
      const auto e = fejer_empirical_upper(p, job.d, job.family_radius, rank, job.bracket.exec);
      row.bracket.empirical_upper = e.value;
      row.bracket.empirical_provenance =
          "tree_family(R=" + std::to_string(job.family_radius) + ";Q=" + std::to_string(p.nodes()) + ")";
      add_flag(row.bracket, "EMPIRICAL");
    }
    rows.push_back(std::move(row));
  }
  return convergence_report(std::move(rows), job.C, job.bracket.tol);
}

ConvergenceReport run_extension(const GroupPtr& semidirect, const ExtensionJob& job) {
  semidirect_quotient(*semidirect);
  if (job.ks.empty()) throw ValidationError("extension job needs k values");
  const Ball window = semidirect->ball(job.window_radius);
  std::vector<ConvergenceRow> rows;
  for (std::size_t i = 0; i < job.ks.size(); ++i) {
    const std::size_t k = job.ks[i];
    const FinitelySupportedVector f = lifted_quotient_approximant(semidirect, k);
    const Multiplier phi = extension_pipeline(f, k);
    ConvergenceRow row;
    row.n = i + 1;
    row.N = k;
    row.r = 1.0 - 1.0 / static_cast<double>(k);
    row.residual = window_residual(phi, window.elements);
    NormBracket b = bracket(phi, job.d, job.bracket);
    b.flags.erase(std::remove(b.flags.begin(), b.flags.end(), "NO_UPPER"), b.flags.end());
    b.upper = f.l1_norm();
    b.upper_provenance = "analytic(l1(f) x folner_tent)";
    add_flag(b, "CERTIFIED_UPPER");
    if (b.lower > b.upper + job.bracket.tol) add_flag(b, "INCONSISTENT");
    row.bracket = std::move(b);
    rows.push_back(std::move(row));
  }
  return convergence_report(std::move(rows), kInfinity, job.bracket.tol);
}

}  // namespace mdlab
