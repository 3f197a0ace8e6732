#pragma once

// Finite elements for the radial quadratic form: continuous Lagrange elements
// of order P in each segment's own radius, seam nodes shared through the
// reflection R, boundary nodes restricted to the allowed subspace W, tip
// nodes removed (sigma(0) = 0). Two uniformly nested mesh levels give a
// Richardson-extrapolated eigenvalue with an error estimate.

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <algorithm>
#include <cmath>
#include <vector>

#include "conespec/banded.hpp"
#include "conespec/radial_problem.hpp"

namespace conespec {

struct MeshSpec {
  int order = 4;
  double h_max = 0.05;
  double kappa = 0.1;   // graded element size kappa * r away from tips
  bool grading = true;
  int min_elements = 10;
  double window_margin = 0.1;  // extra search window above lambda_max
  double max_level_gap = 1e-2; // relative coarse/fine gap treated as non-converged
};

namespace detail {

struct GaussRule {
  std::vector<double> x, w;  // on [0, 1]
};

inline const GaussRule& gauss12() {
  static const GaussRule rule = [] {
    using G = boost::math::quadrature::gauss<double, 12>;
    GaussRule r;
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (int s : {-1, 1}) {
        if (a[i] == 0.0 && s == 1) continue;
        r.x.push_back(0.5 + 0.5 * s * a[i]);
        r.w.push_back(0.5 * w[i]);
      }
    }
    return r;
  }();
  return rule;
}

// Lagrange basis on equispaced nodes of [0, 1].
struct Lagrange {
  int P;
  explicit Lagrange(int order) : P(order) {}
  double node(int j) const { return double(j) / P; }
  void eval(double t, std::vector<double>& phi, std::vector<double>& dphi) const {
    phi.assign(P + 1, 1.0);
    dphi.assign(P + 1, 0.0);
    for (int a = 0; a <= P; ++a) {
      for (int m = 0; m <= P; ++m) {
        if (m == a) continue;
        phi[a] *= (t - node(m)) / (node(a) - node(m));
      }
      for (int skip = 0; skip <= P; ++skip) {
        if (skip == a) continue;
        double term = 1.0 / (node(a) - node(skip));
        for (int m = 0; m <= P; ++m) {
          if (m == a || m == skip) continue;
          term *= (t - node(m)) / (node(a) - node(m));
        }
        dphi[a] += term;
      }
    }
  }
};

}  // namespace detail

/// Element boundaries of a segment in chain order (start radius first).
inline std::vector<double> segment_mesh(const Segment& seg, const MeshSpec& spec, int level) {
  const double len = seg.length();
  const double h_cap = std::min(spec.h_max, len / spec.min_elements);
  std::vector<double> x;
  if (seg.touches_zero() || !spec.grading) {
    const int n = std::max(1, int(std::ceil(len / h_cap - 1e-9)));
    for (int i = 0; i <= n; ++i) x.push_back(seg.r_lo + len * i / n);
  } else {
    x.push_back(seg.r_lo);
    while (x.back() < seg.r_hi) x.push_back(x.back() + std::min(h_cap, spec.kappa * x.back()));
    const double stretch = len / (x.back() - seg.r_lo);
    for (auto& v : x) v = seg.r_lo + (v - seg.r_lo) * stretch;
    x.back() = seg.r_hi;
  }
  for (int l = 1; l < level; ++l) {
    std::vector<double> y;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      y.push_back(x[i]);
      y.push_back(0.5 * (x[i] + x[i + 1]));
    }
    y.push_back(x.back());
    x.swap(y);
  }
  if (seg.orientation == Orientation::Down) std::reverse(x.begin(), x.end());
  return x;
}

struct FemSystem {
  BandedSym K, M;
  int dofs = 0;
};

/// Assemble the stiffness and mass matrices of a radial problem.
inline FemSystem fem_assemble(const RadialProblem& prob, const MeshSpec& spec, int level) {
  validate(prob);
  require(spec.order >= 2, ErrorCode::Domain, "FEM order must be >= 2");
  const RadialUnit& u = prob.unit;
  const Profile& prof = prob.profile;
  const int d = u.dim();
  const int P = spec.order;
  const auto& segs = prof.segments;

  struct NodeMap {
    int first = 0;
    Eigen::MatrixXd T;  // sigma = T * x[first .. first + cols)
  };
  // Global numbering in chain order.
  std::vector<std::vector<double>> meshes;
  std::vector<std::vector<NodeMap>> nodes;  // per segment, per mesh node (P per element + 1)
  int next = 0;
  NodeMap prev_end;
  for (int s = 0; s < int(segs.size()); ++s) {
    meshes.push_back(segment_mesh(segs[s], spec, level));
    const int nel = int(meshes.back().size()) - 1;
    const int nn = nel * P + 1;
    std::vector<NodeMap> nm(nn);
    for (int j = 0; j < nn; ++j) {
      const bool first = j == 0, last = j == nn - 1;
      if (first && s > 0) {
        nm[j].first = prev_end.first;
        nm[j].T = u.R.asDiagonal() * prev_end.T;
      } else if ((first && s == 0) || (last && s == int(segs.size()) - 1)) {
        const Endpoint& ep = first ? prof.start : prof.end;
        if (ep.is_tip()) {
          nm[j].first = next;
          nm[j].T = Eigen::MatrixXd::Zero(d, 0);
        } else {
          nm[j].first = next;
          nm[j].T = boundary_space(u, ep.bc).W;
          next += int(nm[j].T.cols());
        }
      } else {
        nm[j].first = next;
        nm[j].T = Eigen::MatrixXd::Identity(d, d);
        next += d;
      }
    }
    prev_end = nm.back();
    nodes.push_back(std::move(nm));
  }
  const int N = next;
  require(N > 0, ErrorCode::SolverFailure, "FEM system has no degrees of freedom");
  const int bw = (P + 1) * d;
  FemSystem sys{BandedSym(N, bw), BandedSym(N, bw), N};

  const auto& rule = detail::gauss12();
  const detail::Lagrange lag(P);
  std::vector<double> phi, dphi;
  const int nl = (P + 1) * d;

  auto scatter = [&](const std::vector<NodeMap>& nm, int base, const Eigen::MatrixXd& Ke,
                     const Eigen::MatrixXd& Me) {
    for (int a = 0; a <= P; ++a) {
      const NodeMap& A = nm[base + a];
      for (int b = 0; b <= P; ++b) {
        const NodeMap& B = nm[base + b];
        if (A.T.cols() == 0 || B.T.cols() == 0) continue;
        const Eigen::MatrixXd kab = A.T.transpose() * Ke.block(a * d, b * d, d, d) * B.T;
        const Eigen::MatrixXd mab = A.T.transpose() * Me.block(a * d, b * d, d, d) * B.T;
        for (int i = 0; i < kab.rows(); ++i)
          for (int j = 0; j < kab.cols(); ++j) {
            const int gi = A.first + i, gj = B.first + j;
            if (gi < gj) continue;  // lower triangle only
            sys.K.add(gi, gj, kab(i, j));
            sys.M.add(gi, gj, mab(i, j));
          }
      }
    }
  };

  for (int s = 0; s < int(segs.size()); ++s) {
    const auto& x = meshes[s];
    for (int e = 0; e + 1 < int(x.size()); ++e) {
      const double x0 = x[e], x1 = x[e + 1];
      const double h = std::abs(x1 - x0);
      Eigen::MatrixXd Ke = Eigen::MatrixXd::Zero(nl, nl), Me = Eigen::MatrixXd::Zero(nl, nl);
      for (std::size_t q = 0; q < rule.x.size(); ++q) {
        const double t = rule.x[q];
        const double r = x0 + t * (x1 - x0);
        const double w = rule.w[q] * h;
        lag.eval(t, phi, dphi);
        for (int a = 0; a <= P; ++a)
          for (int b = 0; b <= P; ++b) {
            const double da = dphi[a] / (x1 - x0), db = dphi[b] / (x1 - x0);
            Ke.block(a * d, b * d, d, d) += w * (da * db * Eigen::MatrixXd::Identity(d, d) +
                                                 phi[a] * phi[b] / (r * r) * u.V);
            Me.block(a * d, b * d, d, d) += w * phi[a] * phi[b] * Eigen::MatrixXd::Identity(d, d);
          }
      }
      // boundary terms [sigma.A sigma / r] at the non-tip segment ends
      const auto add_end = [&](int local, double r) {
        if (r == 0.0) return;
        const double sign = r == segs[s].r_hi ? 1.0 : -1.0;
        Ke.block(local * d, local * d, d, d) += sign * u.A / r;
      };
      if (e == 0) add_end(0, x0);
      if (e + 2 == int(x.size())) add_end(P, x1);
      scatter(nodes[s], e * P, Ke, Me);
    }
  }
  return sys;
}

struct FemLevelResult {
  std::vector<double> coarse, fine, extrapolated;
};

/// Eigenvalues of the problem at two mesh levels and their extrapolation.
inline FemLevelResult fem_levels(const RadialProblem& prob, const MeshSpec& spec) {
  const double hi = prob.lambda_max * (1.0 + spec.window_margin);
  const double lo = -1e-9 * std::max(1.0, prob.lambda_max);
  FemLevelResult out;
  for (int level : {1, 2}) {
    const FemSystem sys = fem_assemble(prob, spec, level);
    require(BandedLdlt(sys.M).negative_count() == 0, ErrorCode::SolverFailure,
            "indefinite FEM mass matrix");
    require(sturm_count(sys.K, sys.M, lo) == 0, ErrorCode::SolverFailure,
            "FEM stiffness matrix has negative eigenvalues (" + prob.unit.label + ")");
    auto vals = banded_eigenvalues(sys.K, sys.M, lo, hi).values;
    (level == 1 ? out.coarse : out.fine) = std::move(vals);
  }
  const std::size_t n = std::min(out.coarse.size(), out.fine.size());
  const auto& longer = out.coarse.size() > n ? out.coarse : out.fine;
  for (std::size_t i = n; i < longer.size(); ++i)
    require(longer[i] > prob.lambda_max, ErrorCode::SolverFailure,
            "FEM eigenvalue count differs between mesh levels below lambda_max (" +
                prob.unit.label + ")");
  const double factor = std::pow(2.0, 2 * spec.order) - 1.0;
  for (std::size_t i = 0; i < n; ++i)
    out.extrapolated.push_back(out.fine[i] + (out.fine[i] - out.coarse[i]) / factor);
  return out;
}

/// Extrapolated FEM eigenvalues in [0, lambda_max].
inline EigList fem_spectrum(const RadialProblem& prob, const MeshSpec& spec = {},
                            double zero_threshold = -1.0) {
  if (zero_threshold < 0.0) zero_threshold = 1e-8 * prob.lambda_max;
  const FemLevelResult lv = fem_levels(prob, spec);
  const double factor = std::pow(2.0, 2 * spec.order) - 1.0;
  EigList out;
  for (std::size_t i = 0; i < lv.extrapolated.size(); ++i) {
    double lam = lv.extrapolated[i];
    if (lam > prob.lambda_max) continue;
    const double gap = std::abs(lv.fine[i] - lv.coarse[i]);
    require(gap <= spec.max_level_gap * std::max(1.0, lv.fine[i]), ErrorCode::SolverFailure,
            "FEM extrapolation not converged for " + prob.unit.label);
    EigEntry e;
    tag_entry(e, prob.unit);
    if (lam < zero_threshold) {
      lam = 0.0;
      ++out.zero_count;
    }
    e.lambda = lam;
    e.error_estimate = gap / factor;
    e.index = int(out.entries.size());
    out.entries.push_back(e);
  }
  return out;
}

}  // namespace conespec
