// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <cstdio>
#include <functional>
#include <string>

#include "conespec/analysis.hpp"
#include "conespec/sturm_liouville.hpp"
#include "conespec/report.hpp"
#include "oracles.hpp"

using namespace conespec;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& why) {
    if (!ok && pass) detail = why;
    pass = pass && ok;
  }
};

const Profile kM1 = profiles::spindle(1.0);
const Profile kM2 = profiles::truncated_spindle(2.0, 1.0);

std::vector<double> expand(const EigList& l) {
  std::vector<double> v;
  for (const auto& e : l.entries)
    for (long m = 0; m < e.multiplicity; ++m) v.push_back(e.lambda);
  std::sort(v.begin(), v.end());
  return v;
}

double max_rel_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(1e-8, std::abs(a[i])));
  return worst;
}

const SweepReport& sweep() {
  static const SweepReport rep = sweep_epsilon(SweepConfig{});
  return rep;
}

bool check_passed(const SweepReport& rep, const std::string& name, std::string* detail) {
  for (const auto& c : rep.checks)
    if (c.name == name) {
      if (!c.pass && detail) *detail = name + ": " + c.detail;
      return c.pass;
    }
  if (detail) *detail = "missing check " + name;
  return false;
}

Outcome mode_invariants() {
  Outcome o;
  double worst = 0.0;
  std::size_t channels = 0;
  for (int n = 2; n <= 4; ++n) {
    for (int p = 0; p <= n + 1; ++p)
      for (const auto& c : gamma_channels(n, p, 60.0)) {
        ++channels;
        o.require(c.gamma != 0.0, "gamma = 0 in Spec(A)");
        o.require(std::abs(c.gamma) >= 0.5 * n, "|gamma| < n/2 at n=" + std::to_string(n));
      }
    for (const auto& mode : enumerate_sphere_modes(n, 60.0)) {
      if (mode.harmonic()) continue;
      for (const auto& b : build_blocks(mode)) {
        const int outer = b.family == BlockFamily::PlusHalf ? 1 : -1;
        for (int j = 0; j < 2; ++j) {
          const double f = gamma_formula(n, mode.q, mode.mu_sq, outer, j == 0 ? 1 : -1);
          worst = std::max(worst, std::abs(b.gammas(j) - f) / std::abs(f));
        }
      }
    }
  }
  o.require(worst <= 1e-12, "block eigenvalues off the formula by " + fmt_num(worst));
  if (o.pass) o.detail = std::to_string(channels) + " channels, max rel formula error " + fmt_num(worst);
  return o;
}

Outcome solver_cross_validation() {
  Outcome o;
  double worst = 0.0;
  std::size_t compared = 0;
  for (const Profile& prof : {profiles::cone(1.0), kM1, connected_sum_profile(kM1, kM2, 0.1)})
    for (int p = 0; p <= 3; ++p)
      for (const auto& u : enumerate_units(2, p, 40.0, prof.max_radius()).units) {
        const RadialProblem prob{u, prof, 40.0};
        const EigList a = transfer_spectrum(prob);
        const EigList b = fem_spectrum(prob, MeshSpec{}, 1e-8 * 40.0);
        o.require(a.entries.size() == b.entries.size() && a.zero_count == b.zero_count,
                  "count mismatch for " + u.label + " on " + prof.id);
        for (std::size_t i = 0; i < std::min(a.entries.size(), b.entries.size()); ++i) {
          const double x = a.entries[i].lambda, y = b.entries[i].lambda;
          if (x == 0.0 && y == 0.0) continue;
          worst = std::max(worst, std::abs(x - y) / std::max(std::abs(x), 1e-8));
          ++compared;
        }
      }
  o.require(worst <= 1e-6, "max relative disagreement " + fmt_num(worst));
  if (o.pass) o.detail = std::to_string(compared) + " eigenvalues, max rel gap " + fmt_num(worst);
  return o;
}

Outcome derived_anchors() {
  Outcome o;
  const double x = oracle::tan_x_eq_x_root();
  const auto cone = transfer_spectrum({scalar_channel(1.0), profiles::cone(1.0, BcKind::DirichletLike), 30.0});
  const double a1 = cone.entries.empty() ? NAN : cone.entries[0].lambda;
  o.require(std::abs(a1 - x * x) <= 1e-3 && std::abs(a1 - 20.1907) <= 1e-3,
            "Dirichlet cone " + fmt_num(a1) + " vs " + fmt_num(x * x));
  const double j = oracle::spherical_j1_derivative_root();
  const auto ball = assemble_spectrum(profiles::cone(1.0), 2, 0, 40.0).positive(1);
  const double a2 = ball.value_or(NAN);
  o.require(std::abs(a2 - j * j) <= 1e-3 && std::abs(a2 - 4.3330) <= 1e-3,
            "ball Neumann " + fmt_num(a2) + " vs " + fmt_num(j * j));
  const auto sp = assemble_spectrum(kM1, 2, 0, 40.0).all_values();
  const auto sl = expand(sturm_liouville_oracle(kM1, 2, 40.0));
  const double gap = max_rel_gap(sp, sl);
  o.require(sp.size() == sl.size() && gap <= 1e-6,
            "spindle functions vs SL oracle: " + std::to_string(sp.size()) + "/" +
                std::to_string(sl.size()) + " values, gap " + fmt_num(gap));
  if (o.pass)
    o.detail = "cone " + fmt_num(a1) + ", ball " + fmt_num(a2) + ", SL gap " + fmt_num(gap);
  return o;
}

Outcome collapse_convergence() {
  Outcome o;
  std::string d;
  o.require(check_passed(sweep(), "sweep_complete", &d), d);
  o.require(check_passed(sweep(), "collapse_convergence", &d), d);
  o.require(check_passed(sweep(), "upper_semicontinuity", &d), d);
  if (o.pass) {
    double worst = 0.0;
    for (const auto& r : sweep().rows)
      if (r.eps == sweep().config.epsilons.back()) worst = std::max(worst, r.rel_err);
    o.detail = std::to_string(sweep().rows.size()) + " rows, final max rel err " + fmt_num(worst);
  }
  return o;
}

Outcome uniform_gap() {
  Outcome o;
  std::string d;
  o.require(check_passed(sweep(), "uniform_gap", &d), d);
  o.require(check_passed(sweep(), "mcgowan_below_gap", &d), d);
  double gap = INFINITY, mcg = INFINITY;
  for (const auto& se : sweep().per_eps) {
    gap = std::min(gap, se.min_positive);
    mcg = std::min(mcg, se.mcgowan_value);
    o.require(se.mcgowan_value <= se.min_positive, "McGowan above the gap at eps=" + fmt_num(se.eps));
  }
  if (o.pass) o.detail = "min gap " + fmt_num(gap) + ", min McGowan " + fmt_num(mcg);
  return o;
}

Outcome cohomology() {
  Outcome o;
  const std::vector<long> expect{1, 0, 0, 1};
  for (const auto& se : sweep().per_eps)
    o.require(se.zero_counts == expect, "zero counts differ at eps=" + fmt_num(se.eps));
  ApsProblem prob;
  prob.m2 = kM2;
  prob.n = 2;
  const KernelReport rep = aps_kernel(prob);
  o.require(rep.dimension_by_degree[1] == 0 && rep.dimension_by_degree[2] == 0,
            "aps_kernel nonzero in degree 1 or 2");
  o.require(!rep.near_singular, "aps_kernel rank decision near tolerance");
  if (o.pass) o.detail = "(1,0,0,1) at every eps; aps_kernel degrees 1,2 = 0,0";
  return o;
}

Outcome aps_machinery() {
  Outcome o;
  std::size_t channels = 0;
  for (int n = 2; n <= 4; ++n)
    for (int p = 0; p <= n + 1; ++p)
      for (const auto& c : gamma_channels(n, p, 60.0)) {
        ++channels;
        // partial integrals of r^{-2 gamma} over [1, R] settle iff they converge
        const double a = 1.0 - 2.0 * c.gamma;
        const auto partial = [a](double R) { return (std::pow(R, a) - 1.0) / a; };
        const bool finite = std::abs(partial(1e12) - partial(1e6)) < 1e-3;
        o.require(l2_extension_rule(c.gamma) == finite, "l2 rule wrong at gamma=" + fmt_num(c.gamma));
      }
  const auto psi = [](double r) { return std::sin(2.0 * r) + 1.0 - r * r; };
  double worst = 0.0;
  for (double g : {-4.0, -2.0, -1.5, -1.0, 1.0, 1.5, 2.0, 4.0}) {
    for (double r : {0.15, 0.4, 0.7, 0.95}) worst = std::max(worst, parametrix_residual(g, psi, r));
    if (g < 0) o.require(parametrix_apply(g, psi, 1.0).phi == 0.0, "phi(1) != 0 for gamma < 0");
  }
  o.require(worst <= 1e-8, "parametrix residual " + fmt_num(worst));
  double norm_gap = 0.0;
  for (int n = 2; n <= 4; ++n) {
    std::vector<ChannelDatum> data;
    for (const auto& c : gamma_channels(n, 1, 30.0))
      if (c.gamma > 0.5) data.push_back({c.gamma, 1.0});
    for (double eps : {0.2, 0.1, 0.05, 0.025}) {
      const Prolongation P = prolong_P_eps(data, eps, n);
      for (std::size_t i = 0; i < P.size(); ++i) {
        const double num = oracle::simpson(
            [&](double r) { return std::pow(P.channel_value(i, r), 2); }, eps, 1.0, 1e-14);
        norm_gap = std::max(norm_gap, std::abs(num - P.channel_norm_squared(i)));
      }
      o.require(P.norm_squared() <= P.data_norm_squared() / (n - 1.0), "P_eps bound violated");
    }
  }
  o.require(norm_gap <= 1e-8, "P_eps norm off by " + fmt_num(norm_gap));
  if (o.pass)
    o.detail = std::to_string(channels) + " channels; residual " + fmt_num(worst) + "; norm gap " +
               fmt_num(norm_gap);
  return o;
}

Outcome diagnostics() {
  Outcome o;
  std::string d;
  o.require(check_passed(sweep(), "boundary_ratio_bounded", &d), d);
  o.require(check_passed(sweep(), "cutoff_mass_decreasing", &d), d);
  double max_ratio = 0.0;
  for (const auto& r : sweep().rows)
    if (r.k == 1) max_ratio = std::max(max_ratio, r.bord_ratio);
  for (double eps : {0.2, 0.1, 0.05, 0.025}) {
    o.require(xi_eps(2.0 * eps, eps) == 0.0, "xi_eps(2 eps) != 0");
    o.require(std::abs(xi_eps(2.0 * std::sqrt(eps), eps) - 1.0) <= 1e-15, "xi_eps(2 sqrt eps) != 1");
    o.require(std::abs(xi_eps(2.0 * std::pow(eps, 0.75), eps) - 0.5) <= 1e-15, "xi_eps midpoint != 1/2");
  }
  if (o.pass) o.detail = "max ratio " + fmt_num(max_ratio);
  return o;
}

Outcome symmetries() {
  Outcome o;
  double dual = 0.0, scal = 0.0;
  for (const Profile& prof : {kM1, connected_sum_profile(kM1, kM2, 0.1)}) {
    std::vector<std::vector<double>> s;
    for (int p = 0; p <= 3; ++p) s.push_back(assemble_spectrum(prof, 2, p, 40.0).all_values());
    for (int p = 0; p <= 1; ++p) {
      o.require(s[p].size() == s[3 - p].size(), "duality count mismatch on " + prof.id);
      dual = std::max(dual, max_rel_gap(s[p], s[3 - p]));
    }
    std::vector<double> pos0, pos1;
    for (double v : s[0]) if (v > 0) pos0.push_back(v);
    for (double v : s[1]) if (v > 0) pos1.push_back(v);
    o.require(multiset_difference(pos0, pos1, 1e-6).empty(), "unpaired function eigenvalue on " + prof.id);
  }
  o.require(dual <= 1e-6, "duality gap " + fmt_num(dual));
  for (int p = 0; p <= 1; ++p) {
    const auto a = assemble_spectrum(kM1, 2, p, 40.0).all_values();
    const auto b = assemble_spectrum(scale(kM1, 2.0), 2, p, 10.0).all_values();
    o.require(a.size() == b.size(), "scaling count mismatch");
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
      if (a[i] > 0) scal = std::max(scal, std::abs(4.0 * b[i] - a[i]) / a[i]);
  }
  o.require(scal <= 1e-6, "scaling gap " + fmt_num(scal));
  if (o.pass) o.detail = "duality gap " + fmt_num(dual) + ", scaling gap " + fmt_num(scal);
  return o;
}

Outcome dodziuk() {
  Outcome o;
  const auto [lo, hi] = dodziuk_interval(3.7, 0.0, 2, 1);
  o.require(lo == 3.7 && hi == 3.7, "eta = 0 is not the identity");
  std::size_t tested = 0;
  for (double eta : {0.05, 0.1})
    for (int p = 0; p <= 1; ++p) {
      // radii * e^{eta/2}: the metric becomes e^{eta} g, inside the pinching band
      const auto base = assemble_spectrum(kM1, 2, p, 40.0);
      const auto moved = assemble_spectrum(scale(kM1, std::exp(0.5 * eta)), 2, p, 40.0);
      for (std::size_t k = 1; k <= 5; ++k) {
        const double l = base.positive(k).value_or(NAN), m = moved.positive(k).value_or(NAN);
        const auto [a, b] = dodziuk_interval(l, eta, 2, p);
        o.require(m >= a && m <= b, "outside the interval at eta=" + fmt_num(eta));
        ++tested;
      }
    }
  if (o.pass) o.detail = std::to_string(tested) + " eigenvalues inside their intervals";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"mode_invariants", mode_invariants},
      {"solver_cross_validation", solver_cross_validation},
      {"derived_anchors", derived_anchors},
      {"collapse_convergence", collapse_convergence},
      {"uniform_gap", uniform_gap},
      {"cohomology", cohomology},
      {"aps_machinery", aps_machinery},
      {"boundary_diagnostics", diagnostics},
      {"structural_symmetries", symmetries},
      {"dodziuk_comparison", dodziuk},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s [%zu] %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
