#pragma once

// Full p-form spectra from radial units, exact-form spectra, the McGowan
// lower bound, boundary-control diagnostics, and the collapsing sweep.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "conespec/aps_limit.hpp"
#include "conespec/fem.hpp"
#include "conespec/geometry.hpp"
#include "conespec/parallel.hpp"
#include "conespec/radial_problem.hpp"
#include "conespec/transfer.hpp"

namespace conespec {

enum class Method { Fem, Secular, Both };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::Fem: return "fem";
    case Method::Secular: return "secular";
    case Method::Both: return "both";
  }
  return "?";
}

struct SolverOptions {
  Method method = Method::Both;
  MeshSpec mesh;
  TransferOptions transfer;
  double agreement_tol = 1e-6;
  double zero_threshold_rel = 1e-8;  // lambda < rel * lambda_max counts as 0
  int max_refinements = 3;           // secular rescans on count mismatch
  int jobs = 1;
  MultiplicityProvider provider;
};

struct UnitSolve {
  EigList list;                 // reported eigenvalues of the unit
  int analytic_zero = 0;
  double max_rel_disagreement = 0.0;
  int refinements = 0;
  int bound_violations = 0;     // eigenvalues below c_min / R_max^2
};

/// Solve one unit on a profile with the configured method(s).
inline UnitSolve solve_unit(const RadialProblem& prob, const SolverOptions& opt) {
  UnitSolve out;
  const double zthr = opt.zero_threshold_rel * prob.lambda_max;
  std::optional<EigList> fem, sec;
  if (opt.method != Method::Secular) fem = fem_spectrum(prob, opt.mesh, zthr);
  if (opt.method != Method::Fem) {
    TransferOptions topt = opt.transfer;
    sec = transfer_spectrum(prob, topt);
    if (fem) {
      while (sec->entries.size() != fem->entries.size() && out.refinements < opt.max_refinements) {
        topt.scan_refine *= 4.0;
        ++out.refinements;
        sec = transfer_spectrum(prob, topt);
      }
      if (sec->entries.size() != fem->entries.size() || sec->zero_count != fem->zero_count)
        throw Error(ErrorCode::SolverDisagreement,
                    "eigenvalue count differs between secular (" +
                        std::to_string(sec->entries.size()) + ") and FEM (" +
                        std::to_string(fem->entries.size()) + ") for " + prob.unit.label +
                        " on " + prob.profile.id);
      for (std::size_t i = 0; i < sec->entries.size(); ++i) {
        const double a = sec->entries[i].lambda, b = fem->entries[i].lambda;
        const double rel = std::abs(a - b) / std::max(std::abs(a), zthr);
        out.max_rel_disagreement = std::max(out.max_rel_disagreement, rel);
        sec->entries[i].error_estimate = fem->entries[i].error_estimate;
      }
      if (out.max_rel_disagreement > opt.agreement_tol)
        throw Error(ErrorCode::SolverDisagreement,
                    "secular and FEM eigenvalues differ by " +
                        std::to_string(out.max_rel_disagreement) + " (relative) for " +
                        prob.unit.label + " on " + prob.profile.id);
    }
  }
  out.list = sec ? *sec : *fem;
  // degenerate copies inside the unit
  for (std::size_t i = 1; i < out.list.entries.size(); ++i) {
    auto& e = out.list.entries[i];
    const auto& prev = out.list.entries[i - 1];
    if (e.lambda > 0.0 && std::abs(e.lambda - prev.lambda) <= 1e-9 * e.lambda)
      e.degenerate_rank = prev.degenerate_rank + 1;
  }
  out.analytic_zero = analytic_zero_modes(prob.profile, prob.unit);
  if (out.analytic_zero != out.list.zero_count)
    throw Error(ErrorCode::SolverDisagreement,
                "numerical zero modes (" + std::to_string(out.list.zero_count) +
                    ") differ from harmonic fields (" + std::to_string(out.analytic_zero) +
                    ") for " + prob.unit.label + " on " + prob.profile.id);
  const double R = prob.profile.max_radius();
  for (const auto& e : out.list.entries)
    if (e.lambda > 0.0 && e.lambda < prob.unit.c_min() / (R * R) * (1.0 - 1e-9))
      ++out.bound_violations;
  return out;
}

struct SpectrumResult {
  std::string profile_id;
  Profile profile;
  int n = 2;
  int p = 0;
  double lambda_max = 0.0;
  Method method = Method::Both;
  std::vector<RadialUnit> units;
  std::vector<EigEntry> entries;  // ascending; each carries its multiplicity
  long zero_count = 0;
  long analytic_zero_count = 0;
  double c_max = 0.0;
  double mu_sq_max = 0.0;
  double max_rel_disagreement = 0.0;
  int bound_violations = 0;
  int refinements = 0;

  /// Positive eigenvalues expanded by multiplicity.
  std::vector<double> positive_values() const {
    std::vector<double> v;
    for (const auto& e : entries)
      if (e.lambda > 0.0)
        for (long m = 0; m < e.multiplicity; ++m) v.push_back(e.lambda);
    return v;
  }

  /// Entry holding the k-th positive eigenvalue (k >= 1, with multiplicity).
  const EigEntry* positive_entry(std::size_t k) const {
    std::size_t seen = 0;
    for (const auto& e : entries) {
      if (e.lambda <= 0.0) continue;
      seen += std::size_t(e.multiplicity);
      if (seen >= k) return &e;
    }
    return nullptr;
  }

  std::optional<double> positive(std::size_t k) const {
    const EigEntry* e = positive_entry(k);
    if (!e) return std::nullopt;
    return e->lambda;
  }

  /// All eigenvalues (including zeros) expanded by multiplicity.
  std::vector<double> all_values() const {
    std::vector<double> v;
    for (const auto& e : entries)
      for (long m = 0; m < e.multiplicity; ++m) v.push_back(e.lambda);
    return v;
  }
};

/// Spectrum of the p-form Laplacian on a profile, up to lambda_max.
inline SpectrumResult assemble_spectrum(const Profile& prof, int n, int p, double lambda_max,
                                        const SolverOptions& opt = {}) {
  validate(prof);
  require(lambda_max > 0.0, ErrorCode::Domain, "lambda_max must be positive");
  SpectrumResult res;
  res.profile_id = prof.id;
  res.profile = prof;
  res.n = n;
  res.p = p;
  res.lambda_max = lambda_max;
  res.method = opt.method;
  const UnitEnumeration en = enumerate_units(n, p, lambda_max, prof.max_radius(), opt.provider);
  res.units = en.units;
  res.c_max = en.c_max;
  res.mu_sq_max = en.mu_sq_max;
  std::vector<UnitSolve> solves(res.units.size());
  parallel_for(res.units.size(), opt.jobs, [&](std::size_t i) {
    solves[i] = solve_unit(RadialProblem{res.units[i], prof, lambda_max}, opt);
  });
  for (std::size_t i = 0; i < solves.size(); ++i) {
    const auto& s = solves[i];
    for (auto e : s.list.entries) {
      e.unit_index = int(i);
      res.entries.push_back(e);
    }
    res.zero_count += long(s.list.zero_count) * res.units[i].multiplicity;
    res.analytic_zero_count += long(s.analytic_zero) * res.units[i].multiplicity;
    res.max_rel_disagreement = std::max(res.max_rel_disagreement, s.max_rel_disagreement);
    res.bound_violations += s.bound_violations;
    res.refinements += s.refinements;
  }
  std::stable_sort(res.entries.begin(), res.entries.end(),
                   [](const EigEntry& a, const EigEntry& b) { return a.lambda < b.lambda; });
  return res;
}

/// Eigenfunction (unit coordinates) behind a spectrum entry.
inline RadialEigenfunction entry_eigenfunction(const SpectrumResult& s, const EigEntry& e) {
  require(e.unit_index >= 0, ErrorCode::Domain, "entry has no unit");
  RadialProblem prob{s.units[e.unit_index], s.profile, s.lambda_max};
  return RadialEigenfunction(prob, e.lambda, e.degenerate_rank);
}

/// Multiset difference a \ b with relative tolerance (both ascending).
inline std::vector<double> multiset_difference(const std::vector<double>& a,
                                               const std::vector<double>& b, double rel_tol,
                                               std::size_t* unmatched_b = nullptr) {
  std::vector<double> out;
  std::vector<bool> used(b.size(), false);
  std::size_t start = 0;
  for (double x : a) {
    bool hit = false;
    for (std::size_t j = start; j < b.size(); ++j) {
      if (used[j]) continue;
      if (b[j] > x * (1.0 + rel_tol) + rel_tol) break;
      if (std::abs(b[j] - x) <= rel_tol * std::max(1.0, std::abs(x))) {
        used[j] = true;
        hit = true;
        break;
      }
    }
    while (start < b.size() && used[start]) ++start;
    if (!hit) out.push_back(x);
  }
  if (unmatched_b) *unmatched_b = std::size_t(std::count(used.begin(), used.end(), false));
  return out;
}

/// Spectra of exact p-forms, p = 0..n+1, via E_p = nonzero(Spec_{p-1}) \ E_{p-1}.
struct ExactSpectra {
  std::vector<std::vector<double>> exact;  // index p
  std::vector<SpectrumResult> full;
  std::size_t inconsistencies = 0;  // E_{p-1} values missing from Spec_{p-1}
};

inline ExactSpectra exact_spectra(const Profile& prof, int n, double lambda_max, int p_max,
                                  const SolverOptions& opt = {}) {
  ExactSpectra ex;
  ex.exact.assign(p_max + 1, {});
  for (int p = 0; p <= p_max; ++p) {
    ex.full.push_back(assemble_spectrum(prof, n, p, lambda_max, opt));
    if (p == 0) continue;
    const auto prev = ex.full[p - 1].positive_values();
    std::size_t miss = 0;
    // drop the top edge: values within tolerance of lambda_max may straddle it
    std::vector<double> e_prev;
    for (double v : ex.exact[p - 1])
      if (v < lambda_max * (1.0 - 1e-6)) e_prev.push_back(v);
    ex.exact[p] = multiset_difference(prev, e_prev, 1e-6, &miss);
    ex.inconsistencies += miss;
  }
  return ex;
}

/// McGowan's lower bound for the first positive eigenvalue on exact p-forms.
inline double mcgowan_bound(double mu_p_u1, double mu_p_u2, double mu_pm1_u12, double omega,
                            double c_rho) {
  require(mu_p_u1 > 0.0 && mu_p_u2 > 0.0 && mu_pm1_u12 > 0.0 && omega > 0.0 && c_rho > 0.0,
          ErrorCode::Domain, "mcgowan_bound needs positive inputs");
  return 1.0 / ((1.0 / mu_p_u1 + 1.0 / mu_p_u2) * (omega * c_rho / mu_pm1_u12 + 1.0));
}

/// (sup |d rho|)^2 for a partition of unity linear in log r on [eps, 2 eps].
inline double default_c_rho(double eps) {
  const double s = 1.0 / (eps * std::numbers::ln2);
  return s * s;
}

struct McGowanResult {
  int p = 0;
  bool valid = false;  // the bound needs 1 < p <= n
  double mu_p_u1 = 0.0, mu_p_u2 = 0.0, mu_pm1_u12 = 0.0;
  double c_rho = 0.0;
  double omega = 1.0;
  double lambda0 = std::numeric_limits<double>::quiet_NaN();
};

/// First exact eigenvalue in degree p, growing the window until one appears.
inline double first_exact_eigenvalue(const Profile& prof, int n, int p, const SolverOptions& opt) {
  const double R = prof.max_radius();
  for (double window = 10.0 / (R * R);; window *= 2.0) {
    require(window < 1e8 / (R * R), ErrorCode::SolverFailure,
            "no exact eigenvalue found on " + prof.id);
    const ExactSpectra ex = exact_spectra(prof, n, window, p, opt);
    if (!ex.exact[p].empty()) return ex.exact[p].front();
  }
}

inline McGowanResult mcgowan_from_cover(const Profile& meps, double eps, int n, int p,
                                        const SolverOptions& opt, double omega = 1.0,
                                        double c_rho = -1.0) {
  McGowanResult m;
  m.p = p;
  m.omega = omega;
  m.c_rho = c_rho > 0.0 ? c_rho : default_c_rho(eps);
  m.valid = p > 1 && p <= n;
  if (!m.valid) return m;
  const CoverProfiles cov = cover_profiles(meps, eps);
  m.mu_p_u1 = first_exact_eigenvalue(cov.u1, n, p, opt);
  m.mu_p_u2 = first_exact_eigenvalue(cov.u2, n, p, opt);
  m.mu_pm1_u12 = first_exact_eigenvalue(cov.u12, n, p - 1, opt);
  m.lambda0 = mcgowan_bound(m.mu_p_u1, m.mu_p_u2, m.mu_pm1_u12, omega, m.c_rho);
  return m;
}

// Cut-offs of the boundary analysis.

/// 0 below 2 eps, 1 above 2 sqrt(eps), linear in log r between.
inline double xi_eps(double r, double eps) {
  if (r <= 2.0 * eps) return 0.0;
  if (r >= 2.0 * std::sqrt(eps)) return 1.0;
  return (std::log(2.0 * eps) - std::log(r)) / std::log(std::sqrt(eps));
}

inline double dxi_eps(double r, double eps) {
  if (r <= 2.0 * eps || r >= 2.0 * std::sqrt(eps)) return 0.0;
  return -1.0 / (r * std::log(std::sqrt(eps)));
}

/// C^1 cut-off: 1 on [0, 1/2], 0 on [1, inf), cubic smoothstep between.
inline double xi_one(double r) {
  if (r <= 0.5) return 1.0;
  if (r >= 1.0) return 0.0;
  const double t = (r - 0.5) / 0.5;
  return 1.0 - t * t * (3.0 - 2.0 * t);
}

struct BoundaryDiagnostics {
  double pi_minus_sq = 0.0;     // ||Pi_{<0} sigma(eps)||^2
  double ratio = 0.0;           // pi_minus_sq / eps
  double cutoff_mass = 0.0;     // ||(1 - xi_eps) xi_1 phi^-||^2
  double cutoff_energy = 0.0;   // || |d xi_eps| xi_1 phi^- ||^2
  double energy_bound = 0.0;    // 4 Lambda / (n |log eps|)
  double pairing = 0.0;         // <xi_1 phi^+ - psi_1, psi_1>
  bool available = false;
};

/// Diagnostics of an eigenfunction of M_eps on the M1 cone [eps, 1].
inline BoundaryDiagnostics boundary_diagnostics(const RadialEigenfunction& ef, const RadialUnit& u,
                                                double eps, int n) {
  BoundaryDiagnostics d;
  if (!u.block) return d;
  const Profile& prof = ef.problem().profile;
  const int seg = int(gluing_seam(prof, eps)) + 1;
  const Segment& s = prof.segments[seg];
  const ABlock& blk = *u.block;
  const Eigen::MatrixXd Pm = negative_projector(blk), Pp = positive_projector(blk);
  const auto block_value = [&](double r) -> Eigen::VectorXd { return u.embed * ef.value(seg, r); };
  const Eigen::VectorXd sig_eps = block_value(s.r_lo);
  d.pi_minus_sq = (Pm * sig_eps).squaredNorm();
  d.ratio = d.pi_minus_sq / eps;

  std::vector<double> cuts = {s.r_lo, 2.0 * eps, 2.0 * eps, 2.0 * std::sqrt(eps), 0.5, s.r_hi};
  for (auto& c : cuts) c = std::clamp(c, s.r_lo, s.r_hi);
  std::sort(cuts.begin(), cuts.end());
  const auto integrate = [&](auto&& fn) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      if (cuts[i + 1] > cuts[i]) total += RadialEigenfunction::integrate(cuts[i], cuts[i + 1], fn);
    return total;
  };
  d.cutoff_mass = integrate([&](double r) {
    const double w = (1.0 - xi_eps(r, eps)) * xi_one(r);
    return w * w * (Pm * block_value(r)).squaredNorm();
  });
  d.cutoff_energy = integrate([&](double r) {
    const double w = dxi_eps(r, eps) * xi_one(r);
    return w * w * (Pm * block_value(r)).squaredNorm();
  });
  d.energy_bound = 4.0 * (ef.lambda() + 1.0) / (n * std::abs(std::log(eps)));
  // psi_1 = xi_1 sum_{gamma > 0} (eps/r)^gamma Pi_gamma sigma(eps)
  const auto psi1 = [&](double r) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(blk.size());
    for (int j = 0; j < blk.size(); ++j) {
      if (blk.gammas(j) <= 0.0) continue;
      const Eigen::VectorXd w = blk.eigvecs.col(j);
      v += std::pow(eps / r, blk.gammas(j)) * w.dot(sig_eps) * w;
    }
    return Eigen::VectorXd(xi_one(r) * v);
  };
  d.pairing = integrate([&](double r) {
    const Eigen::VectorXd ps = psi1(r);
    return (xi_one(r) * (Pp * block_value(r)) - ps).dot(ps);
  });
  d.available = true;
  return d;
}

// Collapsing sweep.

struct SweepConfig {
  int n = 2;
  std::vector<int> degrees{0, 1};
  Profile m1 = profiles::spindle(1.0);
  Profile m2 = profiles::truncated_spindle(2.0, 1.0);
  std::vector<double> epsilons{0.2, 0.1, 0.05, 0.025};
  double lambda_max = 40.0;
  int K = 5;
  SolverOptions solver;
  double omega = 1.0;
  double c_rho = -1.0;          // <= 0: derived from the partition of unity
  double upper_margin = 0.05;
  double final_rel_tol = 0.02;
  double gap_fraction = 0.5;    // floor as a fraction of min_p lambda_1^p(M1)
};

struct SweepRow {
  double eps = 0.0;
  int p = 0;
  int k = 0;
  double lambda_eps = 0.0;
  double lambda_m1 = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;
  double bord_ratio = std::numeric_limits<double>::quiet_NaN();
  double mcgowan = std::numeric_limits<double>::quiet_NaN();
  long zero_count = 0;
  BoundaryDiagnostics diag;
};

struct SweepEpsilon {
  double eps = 0.0;
  std::vector<long> zero_counts;        // degree 0..n+1
  std::vector<long> analytic_zero_counts;
  double min_positive = 0.0;            // degrees 1..n
  std::vector<McGowanResult> mcgowan;   // per degree 2..n
  double mcgowan_value = std::numeric_limits<double>::quiet_NaN();
  double volume = 0.0;
  std::vector<std::string> failures;
};

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SweepReport {
  SweepConfig config;
  std::vector<SweepRow> rows;
  std::vector<SweepEpsilon> per_eps;
  std::vector<long> m1_zero_counts;
  std::vector<long> expected_zero_counts;
  double m1_min_positive = 0.0;
  double m1_volume = 0.0;
  std::vector<Check> checks;

  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
};

/// Eigenpair of `target` continuing the k-th positive eigenpair of `ref`: same
/// radial unit, same position among that unit's positive roots. Ordering by
/// lambda alone swaps identities where levels cross during the collapse.
inline const EigEntry* tracked_entry(const SpectrumResult& target, const SpectrumResult& ref,
                                     std::size_t k) {
  const EigEntry* r = ref.positive_entry(k);
  if (!r) return nullptr;
  int ordinal = 0;
  for (const auto& e : ref.entries) {
    if (&e == r) break;
    if (e.lambda > 0.0 && e.unit == r->unit) ++ordinal;
  }
  for (const auto& e : target.entries)
    if (e.lambda > 0.0 && e.unit == r->unit && ordinal-- == 0) return &e;
  return nullptr;
}

/// Betti numbers of a radial model, from the harmonic-field count.
inline std::vector<long> betti_numbers(const Profile& prof, int n, const SolverOptions& opt) {
  std::vector<long> b;
  for (int p = 0; p <= n + 1; ++p) {
    long count = 0;
    const auto en = enumerate_units(n, p, 1.0, prof.max_radius(), opt.provider);
    for (const auto& u : en.units) count += analytic_zero_modes(prof, u) * u.multiplicity;
    b.push_back(count);
  }
  return b;
}

inline SweepReport sweep_epsilon(const SweepConfig& cfg) {
  SweepReport rep;
  rep.config = cfg;
  require(!cfg.epsilons.empty(), ErrorCode::Config, "empty epsilon list");
  for (std::size_t i = 1; i < cfg.epsilons.size(); ++i)
    require(cfg.epsilons[i] < cfg.epsilons[i - 1], ErrorCode::Config,
            "epsilons must be strictly decreasing");
  const int n = cfg.n;
  const int top = n + 1;

  // reference M1 and the expected cohomology b_p(M1) + b_p(M2) (M2 closed up
  // by its own tip cap: the model of M2 is the spindle over its boundary)
  std::vector<SpectrumResult> m1(top + 1);
  parallel_for(std::size_t(top + 1), 1, [&](std::size_t p) {
    m1[p] = assemble_spectrum(cfg.m1, n, int(p), cfg.lambda_max, cfg.solver);
  });
  rep.m1_volume = profile_volume(cfg.m1, n);
  rep.m1_min_positive = std::numeric_limits<double>::infinity();
  for (int p = 0; p <= top; ++p) {
    rep.m1_zero_counts.push_back(m1[p].zero_count);
    if (p >= 1 && p <= n && m1[p].positive(1))
      rep.m1_min_positive = std::min(rep.m1_min_positive, *m1[p].positive(1));
  }
  {
    // M2 closed up by filling its boundary with a cone tip
    Profile m2_closed = cfg.m2;
    m2_closed.segments.front().r_lo = 0.0;
    m2_closed.start = Endpoint::tip();
    const auto b1 = betti_numbers(cfg.m1, n, cfg.solver);
    const auto b2 = betti_numbers(m2_closed, n, cfg.solver);
    // b_p(M1 # M2) = b_p(M1) + b_p(M2) for 0 < p < m; one copy in degrees 0 and m
    for (int p = 0; p <= top; ++p) {
      long v = b1[p] + b2[p];
      if (p == 0 || p == top) v = std::max(b1[p], b2[p]);
      rep.expected_zero_counts.push_back(v);
    }
  }

  for (double eps : cfg.epsilons) {
    SweepEpsilon se;
    se.eps = eps;
    std::vector<SpectrumResult> spec(top + 1);
    Profile meps;
    try {
      meps = connected_sum_profile(cfg.m1, cfg.m2, eps);
      se.volume = profile_volume(meps, n);
      for (int p = 0; p <= top; ++p)
        spec[p] = assemble_spectrum(meps, n, p, cfg.lambda_max, cfg.solver);
    } catch (const Error& e) {
      se.failures.push_back(std::string(to_string(e.code())) + ": " + e.what());
      rep.per_eps.push_back(se);
      continue;
    }
    se.min_positive = std::numeric_limits<double>::infinity();
    for (int p = 0; p <= top; ++p) {
      se.zero_counts.push_back(spec[p].zero_count);
      se.analytic_zero_counts.push_back(spec[p].analytic_zero_count);
      if (p >= 1 && p <= n && spec[p].positive(1))
        se.min_positive = std::min(se.min_positive, *spec[p].positive(1));
    }
    for (int p = 2; p <= n; ++p) {
      try {
        se.mcgowan.push_back(mcgowan_from_cover(meps, eps, n, p, cfg.solver, cfg.omega, cfg.c_rho));
        const double v = se.mcgowan.back().lambda0;
        if (std::isnan(se.mcgowan_value) || v < se.mcgowan_value) se.mcgowan_value = v;
      } catch (const Error& e) {
        se.failures.push_back(std::string("mcgowan: ") + e.what());
      }
    }
    for (int p : cfg.degrees) {
      for (int k = 1; k <= cfg.K; ++k) {
        SweepRow row;
        row.eps = eps;
        row.p = p;
        row.k = k;
        const auto le = spec[p].positive(k);
        const auto lm = m1[p].positive(k);
        if (!le || !lm) {
          se.failures.push_back("missing eigenvalue p=" + std::to_string(p) +
                                " k=" + std::to_string(k));
          continue;
        }
        row.lambda_eps = *le;
        row.lambda_m1 = *lm;
        row.abs_err = std::abs(*le - *lm);
        row.rel_err = row.abs_err / *lm;
        row.mcgowan = se.mcgowan_value;
        row.zero_count = spec[p].zero_count;
        try {
          const EigEntry* e = tracked_entry(spec[p], m1[p], k);
          require(e != nullptr, ErrorCode::SolverFailure, "tracked eigenfunction not found");
          const auto ef = entry_eigenfunction(spec[p], *e);
          row.diag = boundary_diagnostics(ef, spec[p].units[e->unit_index], eps, n);
          if (row.diag.available) row.bord_ratio = row.diag.ratio;
        } catch (const Error& err) {
          se.failures.push_back(std::string("diagnostics: ") + err.what());
        }
        rep.rows.push_back(row);
      }
    }
    rep.per_eps.push_back(se);
  }

  // embedded property checks
  const auto add = [&](std::string name, bool pass, std::string detail) {
    rep.checks.push_back({std::move(name), pass, std::move(detail)});
  };
  bool no_fail = true;
  for (const auto& se : rep.per_eps) no_fail = no_fail && se.failures.empty();
  add("sweep_complete", no_fail, "all (eps, degree) solves succeeded");

  const double eps_last = cfg.epsilons.back();
  bool conv = true, upper = true;
  std::string conv_detail, upper_detail;
  for (int p : cfg.degrees) {
    for (int k = 1; k <= cfg.K; ++k) {
      std::vector<const SweepRow*> seq;
      for (const auto& r : rep.rows)
        if (r.p == p && r.k == k) seq.push_back(&r);
      if (seq.size() != cfg.epsilons.size()) {
        conv = false;
        continue;
      }
      for (std::size_t i = 1; i < seq.size(); ++i)
        if (!(seq[i]->abs_err < seq[i - 1]->abs_err)) {
          conv = false;
          conv_detail += " p=" + std::to_string(p) + ",k=" + std::to_string(k) + " not decreasing;";
        }
      if (!(seq.back()->rel_err < cfg.final_rel_tol)) {
        conv = false;
        conv_detail += " p=" + std::to_string(p) + ",k=" + std::to_string(k) + " final error;";
      }
      if (seq.back()->eps == eps_last &&
          !(seq.back()->lambda_eps <= (1.0 + cfg.upper_margin) * seq.back()->lambda_m1)) {
        upper = false;
        upper_detail += " p=" + std::to_string(p) + ",k=" + std::to_string(k) + ";";
      }
    }
  }
  add("collapse_convergence", conv, conv_detail.empty() ? "errors strictly decreasing, final < tol" : conv_detail);
  add("upper_semicontinuity", upper, upper_detail.empty() ? "lambda_eps <= (1+margin) lambda_m1 at smallest eps" : upper_detail);

  bool zeros = true, gap = true, mcg = true;
  double min_gap = std::numeric_limits<double>::infinity();
  for (const auto& se : rep.per_eps) {
    if (se.zero_counts != rep.expected_zero_counts) zeros = false;
    if (se.zero_counts.empty()) continue;
    min_gap = std::min(min_gap, se.min_positive);
    if (!(se.min_positive >= cfg.gap_fraction * rep.m1_min_positive)) gap = false;
    if (!(std::isfinite(se.mcgowan_value) && se.mcgowan_value > 0.0 &&
          se.mcgowan_value <= se.min_positive))
      mcg = false;
  }
  add("zero_modes_match_cohomology", zeros, "zero-mode counts equal b_p(M1)+b_p(M2) for every eps");
  add("uniform_gap", gap, "min positive eigenvalue (degrees 1..n) = " + std::to_string(min_gap));
  add("mcgowan_below_gap", mcg, "mcgowan lower bound <= min positive eigenvalue for every eps");

  // boundary control: (a)/eps bounded without monotone growth; (b) decreasing
  bool bord = true, mass = true;
  for (int p : cfg.degrees) {
    std::vector<const SweepRow*> seq;
    for (const auto& r : rep.rows)
      if (r.p == p && r.k == 1 && r.diag.available) seq.push_back(&r);
    if (seq.size() >= 2) {
      bool growing = true;
      for (std::size_t i = 1; i < seq.size(); ++i)
        growing = growing && seq[i]->bord_ratio > seq[i - 1]->bord_ratio;
      if (growing) bord = false;
      for (std::size_t i = 1; i < seq.size(); ++i)
        if (!(seq[i]->diag.cutoff_mass < seq[i - 1]->diag.cutoff_mass)) mass = false;
    }
  }
  add("boundary_ratio_bounded", bord, "||Pi_- sigma(eps)||^2 / eps shows no monotone growth");
  add("cutoff_mass_decreasing", mass, "||(1 - xi_eps) xi_1 phi^-||^2 decreases along the sweep");
  return rep;
}

}  // namespace conespec
