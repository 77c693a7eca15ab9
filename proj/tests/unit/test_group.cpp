#include <gtest/gtest.h>

#include <array>
#include <deque>
#include <random>
#include <set>

#include "mdlab/errors.hpp"
#include "mdlab/group.hpp"
#include "mdlab/multiplier.hpp"

using namespace mdlab;

namespace {

// Independent free reduction on letter vectors.
std::vector<std::int64_t> reduce(const std::vector<std::int64_t>& w) {
  std::vector<std::int64_t> out;
  for (auto x : w) {
    if (!out.empty() && out.back() == -x) {
      out.pop_back();
    } else {
      out.push_back(x);
    }
  }
  return out;
}

// BFS over reduced words of F_k, no library code.
std::vector<std::size_t> free_sphere_sizes(int k, std::size_t radius) {
  std::set<std::vector<std::int64_t>> seen{{}};
  std::deque<std::pair<std::vector<std::int64_t>, std::size_t>> q{{{}, 0}};
  std::vector<std::size_t> sizes(radius + 1, 0);
  while (!q.empty()) {
    auto [w, d] = q.front();
    q.pop_front();
    ++sizes[d];
    if (d == radius) continue;
    for (int g = 1; g <= k; ++g) {
      for (int s : {1, -1}) {
        auto v = w;
        v.push_back(g * s);
        v = reduce(v);
        if (seen.insert(v).second) q.push_back({v, d + 1});
      }
    }
  }
  return sizes;
}

std::vector<GroupPtr> all_groups() {
  std::vector<std::vector<std::size_t>> s3 = {{0, 1, 2, 3, 4, 5}, {1, 2, 0, 4, 5, 3}, {2, 0, 1, 5, 3, 4},
                                              {3, 5, 4, 0, 2, 1}, {4, 3, 5, 1, 0, 2}, {5, 4, 3, 2, 1, 0}};
  return {make_free_group(2), make_zn(2), make_finite_group(s3), make_cyclic_group(5), make_sl2z(),
          make_sl2z_semidirect()};
}

}  // namespace

TEST(Group, FreeMultiplicationReduces) {
  auto g = make_free_group(2);
  EXPECT_EQ(g->multiply(g->parse("ab"), g->parse("Ba")), g->parse("aa"));
  EXPECT_EQ(g->to_string(g->multiply(g->parse("ab"), g->parse("Ba"))), "aa");
}

TEST(Group, SemidirectLaw) {
  auto g = make_sl2z_semidirect();
  std::mt19937 rng(3);
  const Ball b = g->ball(3);
  std::uniform_int_distribution<std::size_t> pick(0, b.size() - 1);
  for (int it = 0; it < 200; ++it) {
    const auto& x = b.elements[pick(rng)].data;
    const auto& y = b.elements[pick(rng)].data;
    // (A,v)(B,w) = (AB, v + A w)
    std::vector<std::int64_t> expect = {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3],
                                        x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3],
                                        x[4] + x[0] * y[4] + x[1] * y[5], x[5] + x[2] * y[4] + x[3] * y[5]};
    EXPECT_EQ(g->multiply(Element{GroupKind::SL2ZSemidirect, x}, Element{GroupKind::SL2ZSemidirect, y}).data,
              expect);
  }
}

TEST(Group, ZnAddition) {
  auto g = make_zn(2);
  EXPECT_EQ(g->multiply(zn_element({1, 2}), zn_element({3, -2})), zn_element({4, 0}));
}

TEST(Group, WordLengthExamples) {
  auto g = make_free_group(2);
  EXPECT_EQ(g->word_length(g->identity()), 0u);
  EXPECT_EQ(g->word_length(g->parse("abA")), 3u);
  EXPECT_EQ(g->word_length(g->parse("aAb")), 1u);
  for (const auto& gr : all_groups()) EXPECT_EQ(gr->word_length(gr->identity()), 0u) << gr->name();
}

TEST(Group, BallSizesAgainstBfsOracle) {
  auto g = make_free_group(2);
  EXPECT_EQ(g->ball(1).size(), 5u);
  EXPECT_EQ(g->ball(2).size(), 17u);
  for (int k : {1, 2, 3}) {
    auto f = make_free_group(static_cast<std::size_t>(k));
    const auto sizes = free_sphere_sizes(k, 4);
    const Ball b = f->ball(4);
    std::vector<std::size_t> got(5, 0);
    for (auto l : b.lengths) ++got[l];
    EXPECT_EQ(got, sizes);
  }
  EXPECT_EQ(make_zn(2)->ball(1).size(), 5u);
  // l1 ball in Z^2 has 2R^2 + 2R + 1 points
  EXPECT_EQ(make_zn(2)->ball(4).size(), 41u);
}

TEST(Group, BallInvariants) {
  for (const auto& g : all_groups()) {
    const Ball b = g->ball(3);
    ASSERT_EQ(b.elements.front(), g->identity());
    for (std::size_t i = 0; i < b.size(); ++i) {
      ASSERT_TRUE(b.find(g->inverse(b.elements[i]))) << g->name();
      EXPECT_EQ(b.lengths[b.index.at(g->inverse(b.elements[i]))], b.lengths[i]);
      if (b.lengths[i] == 0) continue;
      bool parent = false;
      for (const auto& s : g->generators()) {
        auto p = b.find(g->multiply(b.elements[i], s));
        if (p && b.lengths[*p] + 1 == b.lengths[i]) parent = true;
      }
      EXPECT_TRUE(parent) << g->name() << " " << g->to_string(b.elements[i]);
    }
    // canonical order inside spheres
    for (std::size_t i = 1; i < b.size(); ++i) {
      if (b.lengths[i] == b.lengths[i - 1]) EXPECT_LT(b.elements[i - 1], b.elements[i]);
    }
  }
}

TEST(Group, AxiomsOnSamples) {
  std::mt19937 rng(11);
  for (const auto& g : all_groups()) {
    const Ball b = g->ball(2);
    std::uniform_int_distribution<std::size_t> pick(0, b.size() - 1);
    for (int it = 0; it < 100; ++it) {
      const Element& x = b.elements[pick(rng)];
      const Element& y = b.elements[pick(rng)];
      const Element& z = b.elements[pick(rng)];
      EXPECT_EQ(g->multiply(g->multiply(x, y), z), g->multiply(x, g->multiply(y, z)));
      EXPECT_EQ(g->multiply(x, g->identity()), x);
      EXPECT_EQ(g->multiply(g->identity(), x), x);
      EXPECT_EQ(g->multiply(x, g->inverse(x)), g->identity());
      EXPECT_EQ(g->word_length(g->inverse(x)), g->word_length(x));
      EXPECT_LE(g->word_length(g->multiply(x, y)), g->word_length(x) + g->word_length(y));
    }
    std::set<Element> gens(g->generators().begin(), g->generators().end());
    for (const auto& s : g->generators()) {
      EXPECT_TRUE(gens.count(g->inverse(s))) << g->name();
      EXPECT_NE(s, g->identity());
    }
  }
}

TEST(Group, Errors) {
  auto f = make_free_group(2);
  auto z = make_zn(2);
  EXPECT_THROW(f->multiply(f->parse("a"), zn_element({1, 0})), ValidationError);
  EXPECT_THROW(f->parse("c"), ValidationError);
  EXPECT_THROW(z->validate(zn_element({1})), ValidationError);
  auto sl = make_sl2z();
  const std::int64_t big = std::int64_t{1} << 40;
  const Element m = sl2z_element(big, 1, big - 1, 1);
  EXPECT_THROW(sl->multiply(m, m), OverflowError);
  EXPECT_THROW(sl->validate(sl2z_element(2, 0, 0, 1)), ValidationError);
  // Beyond the BFS horizon
  auto tight = make_sl2z(GroupLimits{2'000'000, 3});
  EXPECT_THROW(tight->word_length(sl2z_element(1, 10, 0, 1)), HorizonError);
  auto capped = make_free_group(2, GroupLimits{100, 14});
  EXPECT_THROW(capped->ball(4), ResourceError);
  EXPECT_THROW(make_finite_group({{0, 1}, {1, 1}}), ValidationError);
}

TEST(Group, QuotientStructure) {
  auto g = make_sl2z_semidirect();
  const QuotientStructure* qs = g->quotient();
  ASSERT_NE(qs, nullptr);
  const Ball b = g->ball(2);
  std::mt19937 rng(5);
  std::uniform_int_distribution<std::size_t> pick(0, b.size() - 1);
  for (int it = 0; it < 100; ++it) {
    const Element& x = b.elements[pick(rng)];
    const Element& y = b.elements[pick(rng)];
    EXPECT_EQ(qs->project(g->multiply(x, y)), qs->quotient->multiply(qs->project(x), qs->project(y)));
    EXPECT_EQ(qs->project(qs->lift(qs->project(x))), qs->project(x));
    EXPECT_TRUE(qs->in_kernel(g->multiply(g->inverse(x), qs->lift(qs->project(x)))));
    const auto dec = quotient_and_lift(*g, x);
    EXPECT_EQ(g->multiply(qs->lift(dec.coset), qs->embed_kernel(dec.kernel_part)), x);
  }
  EXPECT_THROW(quotient_and_lift(*make_free_group(2), make_free_group(2)->identity()), ValidationError);
}

TEST(Group, GramMatrixExamples) {
  auto z = make_zn(1);
  std::vector<Element> f;
  for (int i = 0; i <= 6; ++i) f.push_back(zn_element({i}));
  auto ones = gram_matrix(Multiplier::constant(z, 1.0), f);
  EXPECT_EQ(ones, Eigen::MatrixXcd::Ones(7, 7));
  auto delta = gram_matrix(Multiplier::finite(z, {{zn_element({0}), 1.0}}), f);
  EXPECT_EQ(delta, Eigen::MatrixXcd::Identity(7, 7));
  const double r = 0.7;
  auto poisson = Multiplier::lazy(
      z, [r](const Element& t) { return cd(std::pow(r, std::abs(static_cast<double>(t.data[0]))), 0.0); }, true,
      "poisson");
  auto m = gram_matrix(poisson, f, Exec::Serial);
  for (int i = 0; i <= 6; ++i) {
    for (int j = 0; j <= 6; ++j) EXPECT_DOUBLE_EQ(m(i, j).real(), std::pow(r, std::abs(i - j)));
  }
  EXPECT_EQ(gram_matrix(poisson, f, Exec::Parallel), m);
}
