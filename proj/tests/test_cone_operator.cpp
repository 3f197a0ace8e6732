#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "conespec/cone_operator.hpp"

using namespace conespec;

namespace {

const ABlock& find_block(const std::vector<ABlock>& blocks, BlockFamily f) {
  for (const auto& b : blocks)
    if (b.family == f) return b;
  throw std::runtime_error("block missing");
}

std::vector<double> sorted_gammas(const ABlock& b) {
  std::vector<double> g(b.gammas.data(), b.gammas.data() + b.gammas.size());
  std::sort(g.begin(), g.end());
  return g;
}

}  // namespace

TEST(ConeOperator, PlusHalfExample) {
  const auto blocks = build_blocks(coexact_mode(2, 0, 1));
  const ABlock& b = find_block(blocks, BlockFamily::PlusHalf);
  const double s2 = std::sqrt(2.0);
  EXPECT_NEAR(b.matrix(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(b.matrix(0, 1), -s2, 1e-15);
  EXPECT_NEAR(b.matrix(1, 0), -s2, 1e-15);
  EXPECT_NEAR(b.matrix(1, 1), 1.0, 1e-15);
  const auto g = sorted_gammas(b);
  EXPECT_NEAR(g[0], -1.0, 1e-14);
  EXPECT_NEAR(g[1], 2.0, 1e-14);
  for (const auto& v : b.basis) EXPECT_EQ(v.total_degree, 1);
}

TEST(ConeOperator, MinusHalfExample) {
  const auto blocks = build_blocks(coexact_mode(2, 0, 1));
  const ABlock& b = find_block(blocks, BlockFamily::MinusHalf);
  const auto g = sorted_gammas(b);
  EXPECT_NEAR(g[0], -2.0, 1e-14);
  EXPECT_NEAR(g[1], 1.0, 1e-14);
  EXPECT_EQ(b.basis[0].total_degree, 0);
  EXPECT_EQ(b.basis[1].total_degree, 2);
}

TEST(ConeOperator, HarmonicModesGiveExceptionalBlocks) {
  const auto blocks = build_blocks(harmonic_mode(3, 0));
  ASSERT_EQ(blocks.size(), 2u);
  std::map<int, double> by_degree;
  for (const auto& b : blocks) {
    EXPECT_EQ(b.family, BlockFamily::Exceptional);
    ASSERT_EQ(b.size(), 1);
    by_degree[b.basis[0].total_degree] = b.gammas(0);
  }
  EXPECT_DOUBLE_EQ(by_degree.at(0), -1.5);
  EXPECT_DOUBLE_EQ(by_degree.at(1), 1.5);
}

TEST(ConeOperator, BlockEigenvaluesMatchFormula) {
  for (int n = 2; n <= 4; ++n)
    for (const auto& mode : enumerate_sphere_modes(n, 60.0)) {
      if (mode.harmonic()) continue;
      const double s = std::sqrt(mode.mu_sq + std::pow(0.5 * (n - 1) - mode.q, 2));
      for (const auto& b : build_blocks(mode)) {
        const double c = b.family == BlockFamily::PlusHalf ? 0.5 : -0.5;
        EXPECT_NEAR(b.gammas(0), c + s, 1e-12 * (c + s));
        EXPECT_NEAR(b.gammas(1), c - s, 1e-12 * std::abs(c - s));
        // eigenvectors really are eigenvectors
        for (int j = 0; j < 2; ++j)
          EXPECT_LT((b.matrix * b.eigvecs.col(j) - b.gammas(j) * b.eigvecs.col(j)).norm(), 1e-12 * s);
      }
    }
}

TEST(ConeOperator, ChannelsInDegreeOne) {
  std::map<double, long> got;
  for (const auto& c : gamma_channels(2, 1, 2.0)) got[c.gamma] += c.multiplicity;
  // {2,-1,1,-2} x 3 plus the exceptional +1 from constants
  std::map<double, long> expect{{2.0, 3}, {-1.0, 3}, {1.0, 4}, {-2.0, 3}};
  ASSERT_EQ(got.size(), expect.size());
  for (const auto& [g, m] : expect) {
    auto it = std::find_if(got.begin(), got.end(),
                           [&](const auto& kv) { return std::abs(kv.first - g) < 1e-12; });
    ASSERT_NE(it, got.end()) << g;
    EXPECT_EQ(it->second, m) << g;
  }
}

TEST(ConeOperator, ChannelsInDegreeZero) {
  // the lowest family block contributes {1,-2}; gamma = -1 comes from constants
  std::map<double, long> got;
  for (const auto& c : gamma_channels(2, 0, 2.0)) got[std::round(c.gamma * 1e9) / 1e9] += c.multiplicity;
  EXPECT_EQ(got, (std::map<double, long>{{-2.0, 3}, {-1.0, 1}, {1.0, 3}}));
}

TEST(ConeOperator, GammaBoundAndNonzero) {
  for (int n = 2; n <= 4; ++n)
    for (int p = 0; p <= n + 1; ++p) {
      double min_abs = 1e300;
      for (const auto& c : gamma_channels(n, p, 60.0)) {
        EXPECT_NE(c.gamma, 0.0);
        EXPECT_GE(std::abs(c.gamma), 0.5 * n - 1e-12);
        EXPECT_GE(c.gamma * (c.gamma + 1.0), 0.0);
        min_abs = std::min(min_abs, std::abs(c.gamma));
      }
      EXPECT_NEAR(min_abs, 0.5 * n, 1e-12) << "n=" << n << " p=" << p;
    }
}

TEST(ConeOperator, ChannelMultisetHodgeSymmetric) {
  for (int n = 2; n <= 4; ++n)
    for (int p = 0; p <= n + 1; ++p) {
      std::map<long long, long> a, b;
      for (const auto& c : gamma_channels(n, p, 60.0)) a[std::llround(c.gamma * c.gamma * 1e8)] += c.multiplicity;
      for (const auto& c : gamma_channels(n, n + 1 - p, 60.0)) b[std::llround(c.gamma * c.gamma * 1e8)] += c.multiplicity;
      // Hodge star carries degree-p channels to degree m-p with the same |gamma|
      EXPECT_EQ(a, b) << "n=" << n << " p=" << p;
    }
}

TEST(ConeOperator, DegreeCompressionOfASquaredPlusA) {
  // A(A+1) preserves total degree; on MINUS_HALF it is the scalar gamma(gamma+1)
  for (const auto& mode : enumerate_sphere_modes(3, 40.0))
    for (const auto& b : build_blocks(mode)) {
      const Eigen::MatrixXd V = b.matrix * b.matrix + b.matrix;
      for (int i = 0; i < b.size(); ++i)
        for (int j = 0; j < b.size(); ++j)
          if (b.basis[i].total_degree != b.basis[j].total_degree)
            EXPECT_NEAR(V(i, j), 0.0, 1e-12 * V.norm());
      if (b.family == BlockFamily::MinusHalf) {
        const double g = b.gammas(0);
        EXPECT_NEAR(V(0, 0), g * (g + 1), 1e-12 * g * g);
        EXPECT_NEAR(V(1, 1), g * (g + 1), 1e-12 * g * g);
      }
    }
}

TEST(ConeOperator, ProjectorsSplitData) {
  std::mt19937 rng(7);
  std::normal_distribution<double> N;
  const auto ch = gamma_channels(2, 1, 20.0);
  const ApsProjector P = aps_projector(ch);
  for (std::size_t i = 0; i < ch.size(); ++i) {
    const ABlock& b = ch[i].block;
    Eigen::VectorXd x(b.size());
    for (int j = 0; j < b.size(); ++j) x(j) = N(rng);
    EXPECT_LT((P.negative(b, x) + P.positive(b, x) - x).norm(), 1e-13);
    const Eigen::MatrixXd Pm = negative_projector(b);
    EXPECT_LT((Pm * Pm - Pm).norm(), 1e-13);
    // classification by sign
    EXPECT_EQ(P.selects_negative(i), ch[i].gamma < 0);
    const Eigen::VectorXd w = ch[i].eigvec;
    const double kept = P.negative(b, w).norm();
    EXPECT_NEAR(kept, ch[i].gamma < 0 ? 1.0 : 0.0, 1e-13);
  }
}

TEST(ConeOperator, GammaFormulaHelper) {
  EXPECT_DOUBLE_EQ(gamma_formula(2, 0, 2.0, +1, +1), 2.0);
  EXPECT_DOUBLE_EQ(gamma_formula(2, 0, 2.0, +1, -1), -1.0);
  EXPECT_DOUBLE_EQ(gamma_formula(2, 0, 2.0, -1, +1), 1.0);
  EXPECT_DOUBLE_EQ(gamma_formula(2, 0, 2.0, -1, -1), -2.0);
}
