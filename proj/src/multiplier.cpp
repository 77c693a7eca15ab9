#include "mdlab/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <Eigen/SVD>

#include "mdlab/errors.hpp"
#include "parallel.hpp"

namespace mdlab {

struct Multiplier::Impl {
  GroupPtr group;
  SupportKind kind = SupportKind::Lazy;
  bool hermitian = false;
  std::string id;
  std::optional<cd> constant;

  std::vector<std::pair<Element, cd>> support;
  std::unordered_map<Element, cd, ElementHash> lookup;

  bool has_coeffs = false;
  std::vector<cd> coeffs;
  LengthRule length_rule;
  Rule rule;
  std::optional<std::size_t> radius;
};

namespace {

void require_group(const GroupPtr& g) {
  if (!g) throw ValidationError("multiplier needs a group");
}

bool same_group(const Group& a, const Group& b) { return &a == &b || (a.kind() == b.kind() && a.name() == b.name()); }

}  // namespace

Multiplier Multiplier::finite(GroupPtr g, std::vector<std::pair<Element, cd>> values, std::string id) {
  require_group(g);
  auto impl = std::make_shared<Impl>();
  impl->group = g;
  impl->kind = SupportKind::Finite;
  impl->id = std::move(id);
  std::sort(values.begin(), values.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < values.size(); ++i) {
    g->validate(values[i].first);
    if (values[i].first.kind != g->kind()) throw ValidationError("support element of the wrong kind");
    if (i > 0 && values[i].first == values[i - 1].first) {
      throw ValidationError("repeated support element " + g->to_string(values[i].first));
    }
    impl->lookup.emplace(values[i].first, values[i].second);
  }
  impl->support = std::move(values);
  bool herm = true;
  std::size_t radius = 0;
  bool radius_known = true;
  for (const auto& [t, c] : impl->support) {
    auto it = impl->lookup.find(g->inverse(t));
    const cd back = it == impl->lookup.end() ? cd{} : it->second;
    if (back != std::conj(c)) herm = false;
    try {
      radius = std::max(radius, g->word_length(t));
    } catch (const ResourceError&) {
      radius_known = false;
    }
  }
  impl->hermitian = herm;
  if (radius_known) impl->radius = radius;
  return Multiplier(std::move(impl));
}

Multiplier Multiplier::radial(GroupPtr g, std::vector<cd> coeffs_by_length, std::string id) {
  require_group(g);
  while (!coeffs_by_length.empty() && coeffs_by_length.back() == cd{}) coeffs_by_length.pop_back();
  auto impl = std::make_shared<Impl>();
  impl->group = std::move(g);
  impl->kind = SupportKind::Radial;
  impl->id = std::move(id);
  impl->has_coeffs = true;
  impl->hermitian = std::all_of(coeffs_by_length.begin(), coeffs_by_length.end(),
                                [](cd c) { return c.imag() == 0.0; });
  impl->radius = coeffs_by_length.empty() ? 0 : coeffs_by_length.size() - 1;
  impl->coeffs = std::move(coeffs_by_length);
  return Multiplier(std::move(impl));
}

Multiplier Multiplier::radial_rule(GroupPtr g, LengthRule rule, bool hermitian, std::string id) {
  require_group(g);
  auto impl = std::make_shared<Impl>();
  impl->group = std::move(g);
  impl->kind = SupportKind::Radial;
  impl->id = std::move(id);
  impl->hermitian = hermitian;
  impl->length_rule = std::move(rule);
  return Multiplier(std::move(impl));
}

Multiplier Multiplier::lazy(GroupPtr g, Rule rule, bool hermitian, std::string id) {
  require_group(g);
  auto impl = std::make_shared<Impl>();
  impl->group = std::move(g);
  impl->kind = SupportKind::Lazy;
  impl->id = std::move(id);
  impl->hermitian = hermitian;
  impl->rule = std::move(rule);
  return Multiplier(std::move(impl));
}

Multiplier Multiplier::constant(GroupPtr g, cd c, std::string id) {
  require_group(g);
  auto impl = std::make_shared<Impl>();
  impl->group = std::move(g);
  impl->kind = SupportKind::Radial;
  impl->id = std::move(id);
  impl->hermitian = c.imag() == 0.0;
  impl->constant = c;
  impl->length_rule = [c](std::size_t) { return c; };
  return Multiplier(std::move(impl));
}

cd Multiplier::operator()(const Element& t) const {
  const Impl& m = *impl_;
  if (t.kind != m.group->kind()) {
    throw ValidationError("multiplier " + m.id + " evaluated on an element of another realization");
  }
  if (m.constant) return *m.constant;
  switch (m.kind) {
    case SupportKind::Finite: {
      auto it = m.lookup.find(t);
      return it == m.lookup.end() ? cd{} : it->second;
    }
    case SupportKind::Radial:
      return radial_value(m.group->word_length(t));
    case SupportKind::Lazy:
      return m.rule(t);
  }
  throw EvaluationError("multiplier " + m.id + " has no evaluation rule");
}

cd Multiplier::radial_value(std::size_t l) const {
  const Impl& m = *impl_;
  if (m.kind != SupportKind::Radial) throw EvaluationError("multiplier " + m.id + " is not radial");
  if (m.has_coeffs) return l < m.coeffs.size() ? m.coeffs[l] : cd{};
  return m.length_rule(l);
}

const GroupPtr& Multiplier::group() const { return impl_->group; }
SupportKind Multiplier::support_kind() const { return impl_->kind; }
bool Multiplier::hermitian() const { return impl_->hermitian; }
const std::string& Multiplier::id() const { return impl_->id; }
std::optional<cd> Multiplier::constant_value() const { return impl_->constant; }
std::optional<std::size_t> Multiplier::support_radius() const { return impl_->radius; }

Multiplier Multiplier::with_id(std::string id) const {
  auto impl = std::make_shared<Impl>(*impl_);
  impl->id = std::move(id);
  return Multiplier(std::move(impl));
}

const std::vector<std::pair<Element, cd>>& Multiplier::support() const {
  if (impl_->kind != SupportKind::Finite) {
    throw EvaluationError("multiplier " + impl_->id + " has no enumerated support");
  }
  return impl_->support;
}

const std::vector<cd>* Multiplier::radial_coefficients() const {
  return impl_->has_coeffs ? &impl_->coeffs : nullptr;
}

FinitelySupportedVector::FinitelySupportedVector(GroupPtr g,
                                                 const std::vector<std::pair<Element, cd>>& terms)
    : group_(std::move(g)) {
  for (const auto& [t, c] : terms) {
    group_->validate(t);
    if (!terms_.emplace(t, c).second) {
      throw ValidationError("repeated support element " + group_->to_string(t));
    }
  }
}

void FinitelySupportedVector::add(const Element& t, cd c) {
  if (t.kind != group_->kind()) throw ValidationError("element of the wrong kind");
  terms_[t] += c;
}

cd FinitelySupportedVector::operator[](const Element& t) const {
  auto it = terms_.find(t);
  return it == terms_.end() ? cd{} : it->second;
}

double FinitelySupportedVector::l1_norm() const {
  double s = 0.0;
  for (const auto& [t, c] : terms_) s += std::abs(c);
  return s;
}

double FinitelySupportedVector::l2_norm() const {
  double s = 0.0;
  for (const auto& [t, c] : terms_) s += std::norm(c);
  return std::sqrt(s);
}

Eigen::MatrixXcd gram_matrix(const Multiplier& phi, const std::vector<Element>& f, Exec exec) {
  const Group& g = *phi.group();
  const std::size_t n = f.size();
  std::vector<Element> inv(n);
  for (std::size_t i = 0; i < n; ++i) inv[i] = g.inverse(f[i]);
  Eigen::MatrixXcd m(n, n);
  detail::parallel_for(n, exec, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = phi(g.multiply(inv[i], f[j]));
    }
  });
  return m;
}

cd pairing(const Multiplier& phi, const FinitelySupportedVector& g) {
  if (!same_group(*phi.group(), *g.group())) throw ValidationError("pairing across different groups");
  cd s{};
  for (const auto& [t, c] : g.terms()) s += phi(t) * c;
  return s;
}

double cstar_norm_finite(const FinitelySupportedVector& g) {
  const Group& grp = *g.group();
  const auto order = grp.order();
  if (!order) throw ValidationError("C*-norm by the regular representation needs a finite group");
  const auto n = static_cast<Eigen::Index>(*order);
  Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& [t, c] : g.terms()) {
    for (Eigen::Index s = 0; s < n; ++s) {
      const Element ts = grp.multiply(t, Element{GroupKind::Finite, {s}});
      l(ts.data[0], s) += c;
    }
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(l);
  return svd.singularValues()(0);
}

Multiplier restrict(const Multiplier& phi, const Embedding& embedding) {
  if (!embedding.sub || !embedding.ambient || !embedding.map) throw ValidationError("incomplete embedding");
  if (!same_group(*embedding.ambient, *phi.group())) {
    throw ValidationError("embedding target differs from the multiplier's group");
  }
  auto map = embedding.map;
  return Multiplier::lazy(
      embedding.sub, [phi, map](const Element& h) { return phi(map(h)); }, phi.hermitian(),
      phi.id() + "|sub");
}

Multiplier inflate(const Multiplier& psi, const GroupPtr& g) {
  const QuotientStructure* qs = g->quotient();
  if (qs == nullptr) throw ValidationError(g->name() + " has no quotient structure");
  if (!same_group(*qs->quotient, *psi.group())) {
    throw ValidationError("multiplier does not live on the quotient of " + g->name());
  }
  auto project = qs->project;
  return Multiplier::lazy(
      g, [psi, project](const Element& t) { return psi(project(t)); }, psi.hermitian(),
      psi.id() + "oq");
}

FinitelySupportedVector coset_average(const FinitelySupportedVector& f) {
  const QuotientStructure* qs = f.group()->quotient();
  if (qs == nullptr) throw ValidationError(f.group()->name() + " has no quotient structure");
  FinitelySupportedVector out(qs->quotient);
  for (const auto& [t, c] : f.terms()) out.add(qs->project(t), c);
  return out;
}

LowerBound m2_lower_bound(const Multiplier& phi, const std::vector<Element>& f, SchurOptions options,
                          Exec exec) {
  if (f.empty()) throw ValidationError("m2_lower_bound needs a non-empty finite set");
  LowerBound lb;
  lb.solution = schur_norm(gram_matrix(phi, f, exec), options);
  lb.value = lb.solution.lower;
  return lb;
}

}  // namespace mdlab
