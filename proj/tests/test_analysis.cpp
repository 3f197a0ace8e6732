#include <gtest/gtest.h>

#include "conespec/analysis.hpp"
#include "conespec/sturm_liouville.hpp"

using namespace conespec;

namespace {

const Profile kM1 = profiles::spindle(1.0);
const Profile kM2 = profiles::truncated_spindle(2.0, 1.0);

void expect_same_multiset(const std::vector<double>& a, const std::vector<double>& b, double tol,
                          const std::string& what) {
  ASSERT_EQ(a.size(), b.size()) << what;
  for (std::size_t i = 0; i < a.size(); ++i)
    EXPECT_NEAR(a[i], b[i], tol * std::max(1.0, a[i])) << what << " #" << i;
}

}  // namespace

TEST(Analysis, McGowanFormula) {
  EXPECT_DOUBLE_EQ(mcgowan_bound(1, 1, 1, 1, 1), 0.25);
  EXPECT_DOUBLE_EQ(mcgowan_bound(2, 2, 4, 1, 4), 0.5);
  // c_rho -> 0 leaves the harmonic half-mean of the pieces
  EXPECT_NEAR(mcgowan_bound(3, 6, 1, 1, 1e-14), 2.0, 1e-12);
  // a large overlap eigenvalue has the same effect
  EXPECT_NEAR(mcgowan_bound(3, 6, 1e14, 1, 1), 2.0, 1e-12);
  EXPECT_THROW(mcgowan_bound(0, 1, 1, 1, 1), Error);
  EXPECT_THROW(mcgowan_bound(1, 1, -1, 1, 1), Error);
  EXPECT_THROW(mcgowan_bound(1, 1, 1, 0, 1), Error);
}

TEST(Analysis, PartitionConstantScalesLikeInverseEpsSquared) {
  EXPECT_NEAR(default_c_rho(0.05) / default_c_rho(0.1), 4.0, 1e-12);
  EXPECT_NEAR(default_c_rho(0.5), 4.0 / (std::log(2.0) * std::log(2.0)), 1e-12);
}

TEST(Analysis, OverlapEigenvalueScalesLikeInverseEpsSquared) {
  const SolverOptions opt;
  const double a = first_exact_eigenvalue(profiles::annulus(0.1, 0.2), 2, 1, opt);
  const double b = first_exact_eigenvalue(profiles::annulus(0.05, 0.1), 2, 1, opt);
  EXPECT_GT(a, 0.0);
  EXPECT_NEAR(b / a, 4.0, 1e-8);
}

TEST(Analysis, CutoffFunctions) {
  for (double eps : {0.2, 0.05, 0.01}) {
    EXPECT_EQ(xi_eps(eps, eps), 0.0);
    EXPECT_NEAR(xi_eps(2.0 * eps, eps), 0.0, 1e-15);
    EXPECT_NEAR(xi_eps(2.0 * std::sqrt(eps), eps), 1.0, 1e-15);
    EXPECT_EQ(xi_eps(1.0, eps), 1.0);
    double prev = -1.0;
    for (double r = eps; r <= 1.0; r += 0.01) {
      const double x = xi_eps(r, eps);
      EXPECT_GE(x, prev);
      prev = x;
    }
    const double r = std::sqrt(2.0 * eps * 2.0 * std::sqrt(eps)), h = 1e-6 * r;
    EXPECT_NEAR(dxi_eps(r, eps), (xi_eps(r + h, eps) - xi_eps(r - h, eps)) / (2 * h), 1e-6 / r);
  }
  EXPECT_EQ(xi_one(0.5), 1.0);
  EXPECT_EQ(xi_one(1.0), 0.0);
  EXPECT_NEAR(xi_one(0.75), 0.5, 1e-15);
  // C^1 at both joins
  const double h = 1e-6;
  EXPECT_NEAR((xi_one(0.5 + h) - xi_one(0.5)) / h, 0.0, 1e-4);
  EXPECT_NEAR((xi_one(1.0) - xi_one(1.0 - h)) / h, 0.0, 1e-4);
}

TEST(Analysis, HodgeDualityOnClosedModels) {
  for (const Profile& prof : {kM1, connected_sum_profile(kM1, kM2, 0.1)}) {
    for (int p = 0; p <= 1; ++p) {
      const auto a = assemble_spectrum(prof, 2, p, 40.0).all_values();
      const auto b = assemble_spectrum(prof, 2, 3 - p, 40.0).all_values();
      expect_same_multiset(a, b, 1e-8, prof.id + " p=" + std::to_string(p));
    }
  }
}

TEST(Analysis, FunctionSpectrumReappearsOnOneForms) {
  for (const Profile& prof : {kM1, connected_sum_profile(kM1, kM2, 0.1)}) {
    const auto s0 = assemble_spectrum(prof, 2, 0, 40.0).positive_values();
    const auto s1 = assemble_spectrum(prof, 2, 1, 40.0).positive_values();
    EXPECT_TRUE(multiset_difference(s0, s1, 1e-8).empty()) << prof.id;
    EXPECT_GT(s1.size(), s0.size());
  }
}

TEST(Analysis, ConnectedSumFunctionsMatchSturmLiouville) {
  const Profile m = connected_sum_profile(kM1, kM2, 0.1);
  const EigList sl = sturm_liouville_oracle(m, 2, 40.0);
  std::vector<double> b;
  for (const auto& e : sl.entries)
    for (long k = 0; k < e.multiplicity; ++k) b.push_back(e.lambda);
  std::sort(b.begin(), b.end());
  expect_same_multiset(assemble_spectrum(m, 2, 0, 40.0).all_values(), b, 1e-8, m.id);
}

TEST(Analysis, MultisetDifference) {
  std::size_t unmatched = 99;
  EXPECT_EQ(multiset_difference({1, 2, 2, 3}, {2, 3.0000001}, 1e-6, &unmatched),
            (std::vector<double>{1, 2}));
  EXPECT_EQ(unmatched, 0u);
  EXPECT_EQ(multiset_difference({1, 2}, {2, 5}, 1e-6, &unmatched), (std::vector<double>{1}));
  EXPECT_EQ(unmatched, 1u);
  EXPECT_EQ(multiset_difference({1, 2}, {}, 1e-6), (std::vector<double>{1, 2}));
  EXPECT_EQ(multiset_difference({1.0, 1.1}, {1.05}, 1e-6), (std::vector<double>{1.0, 1.1}));
}

TEST(Analysis, ExactSpectraOnTheSpindle) {
  const ExactSpectra ex = exact_spectra(kM1, 2, 40.0, 3);
  EXPECT_EQ(ex.inconsistencies, 0u);
  // E_1 is the nonzero function spectrum; on a closed 3-manifold every
  // nonharmonic 3-form is exact, so E_3 exhausts Spec_3 below the window edge
  expect_same_multiset(ex.exact[1], ex.full[0].positive_values(), 0.0, "E_1");
  std::vector<double> top;
  for (double v : ex.full[3].positive_values())
    if (v < 40.0 * (1.0 - 1e-6)) top.push_back(v);
  std::vector<double> e3;
  for (double v : ex.exact[3])
    if (v < 40.0 * (1.0 - 1e-6)) e3.push_back(v);
  expect_same_multiset(e3, top, 1e-6, "E_3");
  EXPECT_FALSE(ex.exact[2].empty());
}

TEST(Analysis, TrackedEntryIsIdentityOnItsOwnReference) {
  const SpectrumResult s = assemble_spectrum(kM1, 2, 1, 40.0);
  for (std::size_t k = 1; k <= 5; ++k) EXPECT_EQ(tracked_entry(s, s, k), s.positive_entry(k)) << k;
  EXPECT_EQ(tracked_entry(s, s, 100000), nullptr);
}

TEST(Analysis, BettiNumbers) {
  const SolverOptions opt;
  EXPECT_EQ(betti_numbers(kM1, 2, opt), (std::vector<long>{1, 0, 0, 1}));
  EXPECT_EQ(betti_numbers(kM1, 3, opt), (std::vector<long>{1, 0, 0, 0, 1}));
  EXPECT_EQ(betti_numbers(profiles::cone(1.0), 2, opt), (std::vector<long>{1, 0, 0, 0}));
  EXPECT_EQ(betti_numbers(profiles::annulus(1.0, 2.0), 2, opt), (std::vector<long>{1, 0, 1, 0}));
}

TEST(Analysis, SolverMethodsAgreeOnTheCollapse) {
  const Profile m = connected_sum_profile(kM1, kM2, 0.05);
  SolverOptions fem, sec;
  fem.method = Method::Fem;
  sec.method = Method::Secular;
  const auto a = assemble_spectrum(m, 2, 1, 40.0, fem).all_values();
  const auto b = assemble_spectrum(m, 2, 1, 40.0, sec).all_values();
  expect_same_multiset(a, b, 1e-6, m.id);
}

TEST(Analysis, ShortSweep) {
  SweepConfig cfg;
  cfg.epsilons = {0.2, 0.1};
  cfg.K = 2;
  const SweepReport rep = sweep_epsilon(cfg);
  ASSERT_EQ(rep.per_eps.size(), 2u);
  EXPECT_EQ(rep.rows.size(), 2u * 2u * 2u);
  EXPECT_EQ(rep.expected_zero_counts, (std::vector<long>{1, 0, 0, 1}));
  for (const auto& se : rep.per_eps) {
    EXPECT_TRUE(se.failures.empty());
    EXPECT_EQ(se.zero_counts, rep.expected_zero_counts);
    EXPECT_EQ(se.zero_counts, se.analytic_zero_counts);
    EXPECT_LE(se.mcgowan_value, se.min_positive);
    EXPECT_GT(se.mcgowan_value, 0.0);
  }
  for (const auto& row : rep.rows) {
    EXPECT_TRUE(row.diag.available);
    EXPECT_TRUE(std::isfinite(row.bord_ratio));
    EXPECT_GE(row.diag.cutoff_mass, 0.0);
  }
  const auto find = [&](const std::string& name) {
    for (const auto& c : rep.checks)
      if (c.name == name) return c.pass;
    ADD_FAILURE() << "missing check " << name;
    return false;
  };
  EXPECT_TRUE(find("sweep_complete"));
  EXPECT_TRUE(find("zero_modes_match_cohomology"));
  EXPECT_TRUE(find("mcgowan_below_gap"));
}

TEST(Analysis, SweepRejectsBadEpsilonLists) {
  SweepConfig cfg;
  cfg.epsilons = {0.1, 0.2};
  EXPECT_THROW(sweep_epsilon(cfg), Error);
  cfg.epsilons = {};
  EXPECT_THROW(sweep_epsilon(cfg), Error);
}
