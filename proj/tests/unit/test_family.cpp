#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mdlab/errors.hpp"
#include "mdlab/family.hpp"

using namespace mdlab;

namespace {

// (1/2pi) int F_N(theta) (r e^{i theta})^l d theta by a 1e5-node midpoint rule
// over the explicit kernel sum, independent of the library.
double fejer_coefficient_oracle(std::size_t N, double r, std::size_t l) {
  const int q = 100000;
  cd s = 0.0;
  for (int k = 0; k < q; ++k) {
    const double th = 2.0 * std::numbers::pi * (k + 0.5) / q;
    double f = 0.0;
    for (std::int64_t n = -static_cast<std::int64_t>(N); n <= static_cast<std::int64_t>(N); ++n) {
      f += (1.0 - std::abs(double(n)) / double(N + 1)) * std::cos(double(n) * th);
    }
    s += f * std::polar(std::pow(r, double(l)), double(l) * th);
  }
  return (s / double(q)).real();
}

}  // namespace

TEST(Family, PsiExamples) {
  auto f2 = make_free_group(2);
  EXPECT_NEAR(std::abs(psi(*f2, 0.5, f2->parse("ab")) - 0.25), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(psi(*f2, cd(0, 0.5), f2->parse("abA")) - cd(0, -0.125)), 0.0, 1e-15);
  EXPECT_EQ(psi(*f2, 0.0, f2->identity()), cd(1.0));
  EXPECT_EQ(psi(*f2, 0.0, f2->parse("a")), cd(0.0));
  EXPECT_EQ(complex_power(cd(0, 1), 4), cd(1.0));
}

TEST(Family, FejerCoefficients) {
  EXPECT_EQ(fejer_kernel_coeff(7, 0), 1.0);
  EXPECT_DOUBLE_EQ(fejer_kernel_coeff(4, 2), 0.6);
  EXPECT_DOUBLE_EQ(fejer_kernel_coeff(4, -2), 0.6);
  EXPECT_EQ(fejer_kernel_coeff(4, 7), 0.0);
  EXPECT_EQ(fejer_kernel_coeff(4, 5), 0.0);
  // F_N(0) = N + 1
  EXPECT_NEAR(fejer_kernel(6, 0.0), 7.0, 1e-12);
  EXPECT_GE(fejer_kernel(6, 1.3), 0.0);
  auto f2 = make_free_group(2);
  auto phi = fejer_multiplier({4, 0.9}, f2);
  EXPECT_NEAR(phi(f2->parse("ab")).real(), 0.6 * 0.81, 1e-15);
  EXPECT_EQ(phi(f2->parse("ababa")), cd(0.0));
}

TEST(Family, FejerParamsValidation) {
  EXPECT_THROW((FejerParams{4, 1.0}.validate()), ValidationError);
  EXPECT_THROW((FejerParams{4, 0.0}.validate()), ValidationError);
  EXPECT_THROW((FejerParams{4, 0.5, 8}.validate()), ValidationError);
  EXPECT_NO_THROW((FejerParams{4, 0.5, 20}.validate()));
}

TEST(Family, QuadratureMatchesClosedForm) {
  auto f2 = make_free_group(2);
  for (std::size_t N : {0u, 1u, 4u, 8u, 16u, 32u}) {
    for (double r : {0.5, 0.9, 0.99}) {
      FejerParams p{N, r};
      auto q = fejer_quadrature(p, f2);
      auto cf = fejer_multiplier(p, f2);
      for (std::size_t l = 0; l <= 2 * N + 1; ++l) {
        EXPECT_NEAR(std::abs(q.average.radial_value(l) - cf.radial_value(l)), 0.0, 1e-10) << N << " " << r << " " << l;
      }
    }
  }
}

TEST(Family, QuadratureAgainstIndependentIntegral) {
  for (std::size_t l : {0u, 1u, 3u}) {
    const double want = fejer_kernel_coeff(4, static_cast<std::int64_t>(l)) * std::pow(0.9, double(l));
    EXPECT_NEAR(fejer_coefficient_oracle(4, 0.9, l), want, 1e-10);
  }
}

TEST(Family, QuadratureEdgeCases) {
  auto z = make_zn(1);
  // F_0 = 1: the average of psi_{r e^{i theta}} is the constant term only.
  auto q0 = fejer_quadrature({0, 0.7}, z);
  EXPECT_NEAR(std::abs(q0.average(zn_element({0})) - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(q0.average(zn_element({1}))), 0.0, 1e-14);

  auto a = Multiplier::radial(z, {1.0, 0.5});
  auto b = Multiplier::radial(z, {2.0, -0.5});
  auto zero = quadrature_average({a, b}, {0.0, 0.0}, 3);
  EXPECT_EQ(zero.average(zn_element({1})), cd(0.0));
  EXPECT_THROW(quadrature_average({a, b}, {1.0}, 3), ValidationError);
  EXPECT_THROW(quadrature_average({}, {}, 3), ValidationError);

  auto tiny = quadrature_average({Multiplier::radial(z, {1.0, 1e-16})}, {1.0}, 3);
  EXPECT_EQ(tiny.dropped, 1u);
  EXPECT_NEAR(tiny.dropped_mass, 1e-16, 1e-30);

  // Averaging preserves coefficients of constant families within rounding.
  std::vector<Multiplier> same(50, a);
  std::vector<cd> w(50, 1.0 / 50);
  auto avg = quadrature_average(same, w, 3);
  EXPECT_NEAR(std::abs(avg.average(zn_element({1})) - 0.5), 0.0, 1e-9);

  auto serial = fejer_quadrature({8, 0.9}, z, Exec::Serial);
  auto par = fejer_quadrature({8, 0.9}, z, Exec::Parallel);
  for (std::int64_t m = 0; m < 10; ++m) EXPECT_EQ(serial.average(zn_element({m})), par.average(zn_element({m})));
}

TEST(Family, TreeFamilyCoefficientsAreRadial) {
  for (cd z : {cd(0.3), cd(0.9), cd(0.6, 0.6 * 0.0), std::polar(0.6, std::numbers::pi / 4), cd(0, 0.9)}) {
    FamilyPoint fp = tree_family_point(z, 5, 2);
    EXPECT_LE(fp.coefficient_residual, 1e-8);
    EXPECT_LE(fp.homomorphism_residual, 1e-8);
    if (fp.real_point()) EXPECT_LE(fp.unitarity_residual, 1e-8);
    const auto& g = *fp.group;
    EXPECT_NEAR(std::abs(fp.coefficient(g.parse("abA")) - complex_power(z, 3)), 0.0, 1e-12);
  }
}

TEST(Family, ExactColumnMatchesMatrix) {
  const cd z(0.4, 0.3);
  FamilyPoint fp = tree_family_point(z, 6, 2);
  const auto& g = *fp.group;
  for (const char* ts : {"a", "aB", "bba"}) {
    const Element t = g.parse(ts);
    for (const char* vs : {"", "A", "b", "Ab"}) {
      const Element v = g.parse(vs);
      Eigen::VectorXcd e = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(fp.ball.size()));
      e(static_cast<Eigen::Index>(fp.ball.index.at(v))) = 1.0;
      const Eigen::VectorXcd got = fp.apply(t, e);
      Eigen::VectorXcd want = Eigen::VectorXcd::Zero(got.size());
      for (const auto& [u, c] : exact_column(g, z, t, v)) want(static_cast<Eigen::Index>(fp.ball.index.at(u))) += c;
      EXPECT_LT((got - want).norm(), 1e-12) << ts << " " << vs;
    }
  }
}

TEST(Family, EmpiricalBoundIsConjugationInvariant) {
  FamilyPoint a = tree_family_point(cd(0.5, 0.4), 5, 2);
  FamilyPoint b = tree_family_point(cd(0.5, -0.4), 5, 2);
  EXPECT_NEAR(empirical_bound(a), empirical_bound(b), 1e-8);
  FamilyPoint real = tree_family_point(0.7, 5, 2);
  EXPECT_NEAR(empirical_bound(real), 1.0, 1e-8);
  FamilyPoint s = tree_family_point(cd(0.5, 0.4), 5, 2);
  EXPECT_EQ(empirical_bound(s, Exec::Serial), *a.empirical);
}

TEST(Family, Holomorphy) {
  auto f2 = make_free_group(2);
  EXPECT_LE(holomorphy_check(f2->identity(), cd(0.3, 0.2), 1e-3, 5, 2).residual, 1e-12);
  for (const char* w : {"a", "ab"}) {
    auto h = holomorphy_check(f2->parse(w), cd(0.3, 0.2), 1e-3, 5, 2);
    EXPECT_LE(h.residual, 1e-6) << w;
  }
  // Central differences: the error of z^l scales like h^2.
  const Element t = f2->parse("abab");
  const double r1 = holomorphy_check(t, cd(0.4, 0.1), 1e-2, 6, 2).residual;
  const double r2 = holomorphy_check(t, cd(0.4, 0.1), 5e-3, 6, 2).residual;
  EXPECT_LT(r2, r1);
  EXPECT_THROW(holomorphy_check(t, cd(0.9995, 0.0), 1e-2, 6, 2), ValidationError);
  EXPECT_THROW(holomorphy_check(t, cd(0.3, 0.0), 0.0, 6, 2), ValidationError);
  EXPECT_THROW(holomorphy_check(f2->parse("ababab"), cd(0.3, 0.0), 1e-3, 6, 2), ValidationError);
}

TEST(Family, UniformlyBoundedCertificate) {
  FamilyPoint fp = tree_family_point(cd(0.5, 0.3), 5, 2);
  EXPECT_THROW(certificate_from_ub_rep(fp, Eigen::VectorXcd::Zero(1), Eigen::VectorXcd::Zero(1), 2), ContractError);
  const double b = empirical_bound(fp);
  Eigen::VectorXcd xi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(fp.ball.size()));
  xi(static_cast<Eigen::Index>(fp.basepoint)) = 1.0;
  auto c2 = certificate_from_ub_rep(fp, xi, xi, 2);
  auto c3 = certificate_from_ub_rep(fp, xi, xi, 3);
  EXPECT_TRUE(c2.empirical);
  EXPECT_NEAR(md_upper_from_certificate(c3) / md_upper_from_certificate(c2), b, 1e-12);
}

TEST(Family, ContractViolationsThrow) {
  EXPECT_THROW(tree_family_point(0.5, 4, 2, -1.0), ContractError);
  EXPECT_THROW(tree_family_point(1.5, 4, 2), ValidationError);
}
