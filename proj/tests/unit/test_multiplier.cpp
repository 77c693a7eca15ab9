#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <algorithm>
#include <random>
#include <set>

#include "mdlab/errors.hpp"
#include "mdlab/family.hpp"
#include "mdlab/multiplier.hpp"

using namespace mdlab;

namespace {

std::vector<Element> segment(std::int64_t n) {
  std::vector<Element> f;
  for (std::int64_t i = 0; i <= n; ++i) f.push_back(zn_element({i}));
  return f;
}

// (1/2pi) int |1 + e^{i theta}| d theta by a fine midpoint rule.
double four_over_pi_by_quadrature() {
  const int q = 1 << 16;
  double s = 0.0;
  for (int k = 0; k < q; ++k) {
    const double th = 2.0 * std::numbers::pi * (k + 0.5) / q;
    s += std::abs(cd(1.0, 0.0) + std::polar(1.0, th));
  }
  return s / q;
}

}  // namespace

TEST(Multiplier, PairingExamples) {
  auto z = make_zn(1);
  FinitelySupportedVector de(z), d3(z);
  de.add(zn_element({0}), 1.0);
  d3.add(zn_element({3}), 1.0);
  EXPECT_EQ(pairing(Multiplier::constant(z, 1.0), de), cd(1.0));
  const double r = 0.6;
  auto poisson = Multiplier::radial_rule(z, [r](std::size_t l) { return cd(std::pow(r, l)); }, true, "poisson");
  EXPECT_NEAR(std::abs(pairing(poisson, d3) - std::pow(r, 3)), 0.0, 1e-15);
  EXPECT_THROW(pairing(poisson, FinitelySupportedVector(make_free_group(2))), ValidationError);
}

TEST(Multiplier, CstarNormFinite) {
  auto c2 = make_cyclic_group(2);
  FinitelySupportedVector g(c2);
  g.add(Element{GroupKind::Finite, {0}}, 1.0);
  EXPECT_NEAR(cstar_norm_finite(g), 1.0, 1e-12);
  g.add(Element{GroupKind::Finite, {1}}, 1.0);
  EXPECT_NEAR(cstar_norm_finite(g), 2.0, 1e-12);
  auto c7 = make_cyclic_group(7);
  FinitelySupportedVector h(c7);
  h.add(Element{GroupKind::Finite, {1}}, 1.0);
  EXPECT_NEAR(cstar_norm_finite(h), 1.0, 1e-12);
  EXPECT_THROW(cstar_norm_finite(FinitelySupportedVector(make_zn(1))), ValidationError);
}

TEST(Multiplier, FiniteSupportValidation) {
  auto z = make_zn(1);
  EXPECT_THROW(Multiplier::finite(z, {{zn_element({1}), 1.0}, {zn_element({1}), 2.0}}), ValidationError);
  EXPECT_THROW(FinitelySupportedVector(z, {{zn_element({1}), 1.0}, {zn_element({1}), 2.0}}), ValidationError);
  auto herm = Multiplier::finite(z, {{zn_element({1}), cd(0, 1)}, {zn_element({-1}), cd(0, -1)}});
  EXPECT_TRUE(herm.hermitian());
  auto not_herm = Multiplier::finite(z, {{zn_element({1}), cd(0, 1)}});
  EXPECT_FALSE(not_herm.hermitian());
  EXPECT_EQ(not_herm(zn_element({5})), cd{});
  EXPECT_THROW(not_herm(make_free_group(1)->identity()), ValidationError);
}

TEST(Multiplier, RestrictionExamples) {
  auto f2 = make_free_group(2);
  const Embedding emb = cyclic_subgroup(f2, 0);
  auto one = restrict(Multiplier::constant(f2, 1.0), emb);
  for (int n = -4; n <= 4; ++n) EXPECT_EQ(one(zn_element({n})), cd(1.0));

  const Multiplier psi = radial_multiplier(f2, 0.7);
  const Multiplier sub = restrict(psi, emb);
  std::vector<Element> f = segment(4);
  std::vector<Element> image;
  for (const auto& t : f) image.push_back(emb.map(t));
  EXPECT_EQ(gram_matrix(sub, f), gram_matrix(psi, image));

  // Submatrix monotonicity: image of F inside a larger set of F_2.
  const Ball b = f2->ball(2);
  std::vector<Element> big = image;
  for (const auto& t : b.elements) {
    if (std::find(big.begin(), big.end(), t) == big.end()) big.push_back(t);
  }
  const double small_lb = m2_lower_bound(sub, f).value;
  const double big_lb = m2_lower_bound(psi, big).value;
  EXPECT_LE(small_lb, big_lb + 2e-6);
}

TEST(Multiplier, InflationAndCosetAverage) {
  auto g = make_sl2z_semidirect();
  const QuotientStructure* qs = g->quotient();
  auto one = inflate(Multiplier::constant(qs->quotient, 1.0), g);
  auto delta = inflate(Multiplier::finite(qs->quotient, {{qs->quotient->identity(), 1.0}}), g);
  const Ball b = g->ball(3);
  for (const auto& t : b.elements) {
    EXPECT_EQ(one(t), cd(1.0));
    EXPECT_EQ(delta(t), qs->in_kernel(t) ? cd(1.0) : cd(0.0));
  }
  EXPECT_THROW(inflate(Multiplier::constant(make_zn(1), 1.0), g), ValidationError);
  EXPECT_THROW(inflate(Multiplier::constant(make_zn(1), 1.0), make_zn(1)), ValidationError);

  const Element a = sl2z_element(1, 1, 0, 1);
  FinitelySupportedVector f(g);
  f.add(semidirect_element(a, 2, -1), 1.0);
  auto t1 = coset_average(f);
  EXPECT_EQ(t1.size(), 1u);
  EXPECT_EQ(t1[a], cd(1.0));
  f.add(semidirect_element(a, 0, 5), 1.0);
  EXPECT_EQ(coset_average(f)[a], cd(2.0));
}

TEST(Multiplier, AdjointIdentityOnRandomPairs) {
  auto g = make_sl2z_semidirect();
  const QuotientStructure* qs = g->quotient();
  const Ball gb = g->ball(3);
  const Ball qb = qs->quotient->ball(3);
  std::mt19937 rng(17);
  std::uniform_int_distribution<int> small(-5, 5);
  std::uniform_int_distribution<std::size_t> pg(0, gb.size() - 1), pq(0, qb.size() - 1);
  for (int it = 0; it < 100; ++it) {
    std::vector<std::pair<Element, cd>> psi_vals;
    std::set<Element> used;
    for (int k = 0; k < 10; ++k) {
      const Element& x = qb.elements[pq(rng)];
      if (used.insert(x).second) psi_vals.emplace_back(x, cd(small(rng), small(rng)));
    }
    const Multiplier psi = Multiplier::finite(qs->quotient, psi_vals);
    FinitelySupportedVector f(g);
    for (int k = 0; k < 15; ++k) f.add(gb.elements[pg(rng)], cd(small(rng), small(rng)));
    // Integer data: both sides are exact sums.
    EXPECT_EQ(pairing(inflate(psi, g), f), pairing(psi, coset_average(f)));
  }
}

TEST(Multiplier, LowerBoundExamples) {
  auto z = make_zn(1);
  EXPECT_NEAR(m2_lower_bound(Multiplier::constant(z, 1.0), segment(5)).value, 1.0, 1e-6);
  auto alt = Multiplier::lazy(z, [](const Element& t) { return cd(t.data[0] % 2 == 0 ? 1.0 : -1.0); }, true, "alt");
  for (int n : {1, 4, 9}) EXPECT_NEAR(m2_lower_bound(alt, segment(n)).value, 1.0, 1e-5);
  EXPECT_THROW(m2_lower_bound(alt, {}), ValidationError);
}

TEST(Multiplier, IndicatorLowerBoundIsMonotoneAndBelowFourOverPi) {
  const double oracle = four_over_pi_by_quadrature();
  EXPECT_NEAR(oracle, 4.0 / std::numbers::pi, 1e-8);
  auto z = make_zn(1);
  auto ind = Multiplier::finite(z, {{zn_element({0}), 1.0}, {zn_element({1}), 1.0}});
  double prev = 0.0;
  for (int n : {4, 8, 16}) {
    const double lb = m2_lower_bound(ind, segment(n)).value;
    EXPECT_GE(lb, prev - 2e-6);
    EXPECT_LE(lb, oracle + 1e-6);
    prev = lb;
  }
}

TEST(Multiplier, RadialGramOnFreeGroupIsPsd) {
  auto f2 = make_free_group(2);
  for (double r : {0.3, 0.8}) {
    const Multiplier psi = radial_multiplier(f2, r);
    const Ball b = f2->ball(3);
    const auto m = gram_matrix(psi, b.elements);
    EXPECT_GE(psd_check(m, 1e-12).min_eigenvalue, -1e-9);
    const Ball b2 = f2->ball(2);
    EXPECT_NEAR(m2_lower_bound(psi, b2.elements).value, 1.0, 1e-5);
  }
}
