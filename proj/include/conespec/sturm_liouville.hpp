#pragma once

// Independent oracle for functions: separate u(t) Y_k on the profile in the
// original arclength coordinate and solve
//   -(f^n u')' / f^n + mu_k^2 u / f^2 = lambda u,   f(t) = r(t),
// with natural conditions at tips, seams and absolute boundaries. Dense
// generalized eigensolver, no change of variables, no seam reflections.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "conespec/fem.hpp"
#include "conespec/geometry.hpp"
#include "conespec/radial_problem.hpp"
#include "conespec/sphere_modes.hpp"

namespace conespec {

struct SturmLiouvilleOptions {
  int order = 4;
  int elements_per_segment = 40;
};

namespace detail {

// Eigenvalues of one sphere level on the whole chain, in [0, lambda_max].
inline std::vector<double> sl_level(const Profile& prof, int n, double mu_sq, double lambda_max,
                                    const SturmLiouvilleOptions& opt) {
  const int P = opt.order;
  struct Elem {
    double t0, t1, r0, r1;
  };
  std::vector<Elem> elems;
  double t = 0.0;
  for (const auto& seg : prof.segments) {
    const int ne = opt.elements_per_segment;
    const double len = seg.length();
    const double sgn = seg.orientation == Orientation::Up ? 1.0 : -1.0;
    for (int e = 0; e < ne; ++e) {
      const double a = len * e / ne, b = len * (e + 1) / ne;
      elems.push_back({t + a, t + b, seg.start_radius() + sgn * a, seg.start_radius() + sgn * b});
    }
    t += len;
  }
  const int nodes = int(elems.size()) * P + 1;
  // Dirichlet at tips for non-constant levels (the eigenfunctions vanish there)
  std::vector<int> map(nodes);
  int next = 0;
  for (int j = 0; j < nodes; ++j) {
    const bool tip = (j == 0 && prof.start.is_tip()) || (j == nodes - 1 && prof.end.is_tip());
    const bool dir_bc = (j == 0 && !prof.start.is_tip() && prof.start.bc == BcKind::DirichletLike) ||
                        (j == nodes - 1 && !prof.end.is_tip() && prof.end.bc == BcKind::DirichletLike);
    map[j] = ((tip && mu_sq > 0.0) || dir_bc) ? -1 : next++;
  }
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(next, next), M = Eigen::MatrixXd::Zero(next, next);
  const auto& rule = gauss12();
  const Lagrange lag(P);
  std::vector<double> phi, dphi;
  for (std::size_t e = 0; e < elems.size(); ++e) {
    const Elem& el = elems[e];
    const double h = el.t1 - el.t0;
    for (std::size_t q = 0; q < rule.x.size(); ++q) {
      const double s = rule.x[q];
      const double r = el.r0 + s * (el.r1 - el.r0);
      const double w = rule.w[q] * h;
      const double rn = std::pow(r, n);
      lag.eval(s, phi, dphi);
      for (int a = 0; a <= P; ++a) {
        const int ga = map[e * P + a];
        if (ga < 0) continue;
        for (int b = 0; b <= P; ++b) {
          const int gb = map[e * P + b];
          if (gb < 0) continue;
          K(ga, gb) += w * (rn * dphi[a] * dphi[b] / (h * h) + mu_sq * rn / (r * r) * phi[a] * phi[b]);
          M(ga, gb) += w * rn * phi[a] * phi[b];
        }
      }
    }
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M, Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, ErrorCode::SolverFailure, "oracle eigensolve failed");
  std::vector<double> out;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double v = es.eigenvalues()(i);
    if (v <= lambda_max) out.push_back(std::max(v, 0.0));
  }
  return out;
}

}  // namespace detail

/// Function spectrum (degree 0) of the profile up to lambda_max, with sphere
/// multiplicities. Eigenvalues below zero_threshold are reported as 0.
inline EigList sturm_liouville_oracle(const Profile& prof, int n, double lambda_max,
                                      const SturmLiouvilleOptions& opt = {},
                                      double zero_threshold = -1.0) {
  validate(prof);
  for (const Endpoint* ep : {&prof.start, &prof.end})
    require(ep->is_tip() || ep->bc == BcKind::Absolute || ep->bc == BcKind::DirichletLike,
            ErrorCode::Unsupported, "oracle supports absolute and Dirichlet ends only");
  if (zero_threshold < 0.0) zero_threshold = 1e-8 * lambda_max;
  const double R = prof.max_radius();
  EigList out;
  for (int k = 0;; ++k) {
    const double mu_sq = k == 0 ? 0.0 : coexact_eigenvalue(n, 0, k);
    if (mu_sq > lambda_max * R * R) break;  // mu^2 / R^2 bounds the level from below
    const long mult = k == 0 ? 1 : coexact_multiplicity(n, 0, k);
    for (double v : detail::sl_level(prof, n, mu_sq, lambda_max, opt)) {
      EigEntry e;
      e.lambda = v < zero_threshold ? 0.0 : v;
      e.multiplicity = mult;
      e.q = 0;
      e.level = k;
      e.unit = "level(k=" + std::to_string(k) + ")";
      if (e.lambda == 0.0) out.zero_count += int(mult);
      out.entries.push_back(e);
    }
  }
  std::stable_sort(out.entries.begin(), out.entries.end(),
                   [](const EigEntry& a, const EigEntry& b) { return a.lambda < b.lambda; });
  return out;
}

}  // namespace conespec
