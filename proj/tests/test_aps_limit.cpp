#include <gtest/gtest.h>

#include "conespec/analysis.hpp"
#include "oracles.hpp"

using namespace conespec;

TEST(ApsLimit, L2ExtensionRule) {
  // int_1^inf r^{-2 gamma} dr is finite iff 2 gamma > 1
  for (double g : {-2.0, -0.5, 0.25, 0.5}) EXPECT_FALSE(l2_extension_rule(g)) << g;
  for (double g : {0.5000001, 1.0, 1.5, 7.0}) EXPECT_TRUE(l2_extension_rule(g)) << g;
}

TEST(ApsLimit, HarmonicFieldsOnTheSpindle) {
  const Profile sp = profiles::spindle(1.0);
  EXPECT_EQ(analytic_zero_modes(sp, scalar_channel(-1.0)), 1);
  EXPECT_EQ(analytic_zero_modes(sp, scalar_channel(1.0)), 0);
  EXPECT_EQ(analytic_zero_modes(sp, scalar_channel(-3.0)), 1);
}

TEST(ApsLimit, KernelMatchesCohomologyOfClosedM2) {
  ApsProblem prob;
  prob.m2 = profiles::truncated_spindle(2.0, 1.0);
  prob.n = 2;
  const KernelReport rep = aps_kernel(prob);
  ASSERT_EQ(rep.dimension_by_degree.size(), 4u);
  EXPECT_FALSE(rep.near_singular);
  // closed M2 is the spindle, a 3-sphere up to homeomorphism: b_1 = b_2 = 0
  for (int p = 1; p <= 2; ++p) {
    EXPECT_TRUE(rep.in_cohomology_range(p));
    EXPECT_EQ(rep.dimension_by_degree[p], 0) << p;
  }
  EXPECT_FALSE(rep.in_cohomology_range(0));
  EXPECT_FALSE(rep.in_cohomology_range(3));
}

TEST(ApsLimit, KernelInvariantUnderRefinement) {
  std::vector<long> ref;
  for (double R2 : {1.5, 2.0, 3.0})
    for (double mu : {30.0, 60.0, 120.0}) {
      ApsProblem prob;
      prob.m2 = profiles::truncated_spindle(R2, 1.0);
      prob.n = 2;
      prob.mu_sq_max = mu;
      const KernelReport rep = aps_kernel(prob);
      EXPECT_FALSE(rep.near_singular) << R2 << " " << mu;
      if (ref.empty()) ref = rep.dimension_by_degree;
      EXPECT_EQ(rep.dimension_by_degree, ref) << R2 << " " << mu;
    }
}

TEST(ApsLimit, KernelInHigherDimension) {
  ApsProblem prob;
  prob.m2 = profiles::truncated_spindle(2.0, 1.0);
  prob.n = 3;
  prob.mu_sq_max = 40.0;
  const KernelReport rep = aps_kernel(prob);
  for (int p = 1; p <= 3; ++p) EXPECT_EQ(rep.dimension_by_degree[p], 0) << p;
  EXPECT_FALSE(rep.near_singular);
}

TEST(ApsLimit, ParametrixClosedForms) {
  // psi = r^k: gamma > 0 gives r^{k+1}/(gamma+k+1); gamma < 0 integrates from 1
  for (double g : {1.0, 1.5, 3.0})
    for (int k : {0, 1, 2})
      for (double r : {0.1, 0.5, 1.0}) {
        const auto psi = [k](double x) { return std::pow(x, k); };
        EXPECT_NEAR(parametrix_apply(g, psi, r).phi, std::pow(r, k + 1) / (g + k + 1), 1e-13);
      }
  for (double g : {-1.5, -2.0, -4.0})
    for (int k : {0, 1})
      for (double r : {0.1, 0.5, 0.9}) {
        const auto psi = [k](double x) { return std::pow(x, k); };
        const double a = g + k + 1;  // a = 0 is the logarithmic case
        const double expect =
            a == 0.0 ? std::pow(r, -g) * std::log(r) : (std::pow(r, k + 1) - std::pow(r, -g)) / a;
        EXPECT_NEAR(parametrix_apply(g, psi, r).phi, expect, 1e-12) << g << " " << k << " " << r;
      }
}

TEST(ApsLimit, ParametrixInvertsTheOperator) {
  const auto psi = [](double x) { return std::cos(3.0 * x) + x * x; };
  for (double g : {-3.0, -1.0, 1.0, 2.0})
    for (double r : {0.2, 0.5, 0.8}) EXPECT_LE(parametrix_residual(g, psi, r), 1e-8) << g << " " << r;
  EXPECT_THROW(parametrix_apply(0.0, psi, 0.5), Error);
  EXPECT_THROW(parametrix_apply(1.0, psi, 1.5), Error);
}

TEST(ApsLimit, ProlongationNorms) {
  std::vector<ChannelDatum> data;
  for (const auto& c : gamma_channels(2, 1, 20.0))
    if (c.gamma > 0.5) data.push_back({c.gamma, 0.3 + 0.1 * data.size()});
  ASSERT_FALSE(data.empty());
  for (double eps : {0.2, 0.05, 0.01}) {
    const Prolongation P = prolong_P_eps(data, eps, 2);
    for (std::size_t i = 0; i < P.size(); ++i) {
      const double num =
          oracle::simpson([&](double r) { return std::pow(P.channel_value(i, r), 2); }, eps, 1.0, 1e-14);
      EXPECT_NEAR(P.channel_norm_squared(i), num, 1e-10);
      // at r = eps the datum is recovered up to eps^{-1/2}
      EXPECT_NEAR(P.channel_value(i, eps) * std::sqrt(eps), data[i].amplitude, 1e-14);
    }
    EXPECT_LE(P.norm_squared(), P.bound_constant() * P.data_norm_squared());
  }
  EXPECT_THROW(prolong_P_eps({{0.5, 1.0}}, 0.1, 2), Error);
  EXPECT_THROW(prolong_P_eps(data, 1.0, 2), Error);
}
