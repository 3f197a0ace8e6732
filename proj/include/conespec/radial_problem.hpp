#pragma once

// Radial eigenproblems of fixed total degree.
//
// A unit is the part of one A-block living in a fixed total degree p:
// a 1-dimensional piece of a MINUS_HALF block, a whole PLUS_HALF block, or an
// EXCEPTIONAL 1x1 block. On every conical segment the unit obeys
//   -sigma'' + V sigma / r^2 = lambda sigma,   V = E^T A(A+1) E,
// and its quadratic form is
//   sum_seg int |sigma'|^2 + sigma.V sigma / r^2 dr + [sigma.A_p sigma / r]
// with A_p = E^T A E. Seams match sigma_b = R sigma_a, R = +1 on alpha slots
// and -1 on beta slots (tangential parts equal, normal parts opposite).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "conespec/cone_operator.hpp"
#include "conespec/error.hpp"
#include "conespec/geometry.hpp"

namespace conespec {

struct RadialUnit {
  std::string label;
  BlockFamily family = BlockFamily::Exceptional;
  int degree = -1;  // -1 for standalone channels
  long multiplicity = 1;
  std::optional<ABlock> block;
  Eigen::MatrixXd embed;      // block coordinates <- unit coordinates
  Eigen::MatrixXd A;          // A_p
  Eigen::MatrixXd V;          // compressed A(A+1)
  Eigen::VectorXd R;          // seam reflection (diagonal)
  std::vector<Slot> slots;

  // Channel decomposition of V: columns of channel_vecs, nu_i = sqrt(c_i + 1/4).
  Eigen::MatrixXd channel_vecs;
  Eigen::VectorXd channel_c;
  Eigen::VectorXd channel_nu;

  int dim() const { return int(A.rows()); }
  double c_min() const { return channel_c.minCoeff(); }

  /// gamma values of the harmonic fields r^{-gamma} w living inside the unit
  /// (only a unit covering its whole block carries them).
  bool carries_harmonic_fields() const {
    return !block || block->size() == dim();
  }
};

namespace detail {

inline void finish_unit(RadialUnit& u) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(u.V);
  u.channel_vecs = es.eigenvectors();
  u.channel_c = es.eigenvalues();
  u.channel_nu.resize(u.dim());
  for (int i = 0; i < u.dim(); ++i) {
    const double c = std::max(u.channel_c(i), -0.25);
    u.channel_nu(i) = std::sqrt(c + 0.25);
  }
}

}  // namespace detail

/// Scalar channel -u'' + gamma(gamma+1) u / r^2, treated as a tangential slot.
inline RadialUnit scalar_channel(double gamma) {
  RadialUnit u;
  u.label = "channel(gamma=" + std::to_string(gamma) + ")";
  u.A = Eigen::MatrixXd::Constant(1, 1, gamma);
  u.V = Eigen::MatrixXd::Constant(1, 1, gamma * (gamma + 1.0));
  u.R = Eigen::VectorXd::Ones(1);
  u.slots = {Slot::Alpha};
  u.embed = Eigen::MatrixXd::Identity(1, 1);
  detail::finish_unit(u);
  return u;
}

/// Degree-p unit of a block, if the block touches degree p.
inline std::optional<RadialUnit> unit_from_block(const ABlock& blk, int p) {
  std::vector<int> cols;
  for (int j = 0; j < blk.size(); ++j)
    if (blk.basis[j].total_degree == p) cols.push_back(j);
  if (cols.empty()) return std::nullopt;
  RadialUnit u;
  u.family = blk.family;
  u.degree = p;
  u.multiplicity = blk.source.multiplicity;
  u.block = blk;
  u.label = blk.label();
  if (blk.family == BlockFamily::MinusHalf)
    u.label += blk.basis[cols[0]].slot == Slot::Alpha ? "[v1]" : "[v4']";
  const int d = int(cols.size());
  u.embed = Eigen::MatrixXd::Zero(blk.size(), d);
  u.R.resize(d);
  for (int c = 0; c < d; ++c) {
    u.embed(cols[c], c) = 1.0;
    const Slot s = blk.basis[cols[c]].slot;
    u.slots.push_back(s);
    u.R(c) = s == Slot::Alpha ? 1.0 : -1.0;
  }
  const Eigen::MatrixXd& a = blk.matrix;
  u.A = u.embed.transpose() * a * u.embed;
  u.V = u.embed.transpose() * (a * a + a) * u.embed;
  detail::finish_unit(u);
  return u;
}

/// Bound on mu^2 beyond which every unit has c_min > c_max.
inline double mode_cutoff_for(double c_max) {
  // MINUS_HALF: c = s^2 - 1/4; PLUS_HALF: c_min = (s-1)^2 - 1/4; s^2 >= mu^2.
  const double s = 1.0 + std::sqrt(std::max(c_max, 0.0) + 0.25);
  return s * s + 1.0;
}

struct UnitEnumeration {
  std::vector<RadialUnit> units;
  double c_max = 0.0;       // units with c_min <= c_max are included
  double mu_sq_max = 0.0;   // enumeration cutoff on the sphere spectrum
};

/// All degree-p units with c_min <= lambda_max * R_max^2 (completeness
/// certificate for eigenvalues up to lambda_max on profiles of radius R_max).
inline UnitEnumeration enumerate_units(int n, int p, double lambda_max, double r_max,
                                       const MultiplicityProvider& provider = {}) {
  require(p >= 0 && p <= n + 1, ErrorCode::Domain, "degree out of range");
  UnitEnumeration e;
  e.c_max = lambda_max * r_max * r_max;
  e.mu_sq_max = mode_cutoff_for(e.c_max);
  for (const auto& mode : enumerate_sphere_modes(n, e.mu_sq_max, provider)) {
    for (const auto& blk : build_blocks(mode)) {
      auto u = unit_from_block(blk, p);
      if (u && u->c_min() <= e.c_max) e.units.push_back(std::move(*u));
    }
  }
  // certificate: the first level past the cutoff in every sphere degree
  // already lies above c_max
  for (int q = 0; q <= n - 1; ++q) {
    int k = 1;
    while (coexact_eigenvalue(n, q, k) <= e.mu_sq_max) ++k;
    for (const auto& blk : build_blocks(coexact_mode(n, q, k, provider))) {
      auto u = unit_from_block(blk, p);
      if (u && u->c_min() <= e.c_max)
        throw Error(ErrorCode::IncompleteEnumeration,
                    "unit " + u->label + " has c_min = " + std::to_string(u->c_min()) +
                        " <= lambda_max R^2 = " + std::to_string(e.c_max) +
                        " beyond the mode cutoff " + std::to_string(e.mu_sq_max));
    }
  }
  return e;
}

/// Allowed boundary subspace W (columns orthonormal) and its complement.
struct BoundarySpace {
  Eigen::MatrixXd W;
  Eigen::MatrixXd Wperp;
};

inline BoundarySpace boundary_space(const RadialUnit& u, BcKind bc) {
  const int d = u.dim();
  BoundarySpace s;
  std::vector<int> keep, drop;
  switch (bc) {
    case BcKind::Absolute:
      for (int i = 0; i < d; ++i) (u.slots[i] == Slot::Alpha ? keep : drop).push_back(i);
      break;
    case BcKind::DirichletLike:
      for (int i = 0; i < d; ++i) drop.push_back(i);
      break;
    case BcKind::Aps: {
      // sigma with Pi_{<0}(R sigma) = 0 inside the block
      Eigen::MatrixXd P;
      if (u.block) {
        P = negative_projector(*u.block) * u.embed * u.R.asDiagonal();
      } else {
        P = Eigen::MatrixXd::Constant(1, 1, u.A(0, 0) < 0.0 ? 1.0 : 0.0);
      }
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(P, Eigen::ComputeFullV);
      const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
      int rank = 0;
      for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > 1e-12 * std::max(1.0, smax)) ++rank;
      s.Wperp = svd.matrixV().leftCols(rank);
      s.W = svd.matrixV().rightCols(d - rank);
      return s;
    }
    case BcKind::RegularTip:
      throw Error(ErrorCode::Domain, "REGULAR_TIP is not a boundary condition at r > 0");
  }
  s.W = Eigen::MatrixXd::Zero(d, int(keep.size()));
  s.Wperp = Eigen::MatrixXd::Zero(d, int(drop.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) s.W(keep[i], int(i)) = 1.0;
  for (std::size_t i = 0; i < drop.size(); ++i) s.Wperp(drop[i], int(i)) = 1.0;
  return s;
}

struct RadialProblem {
  RadialUnit unit;
  Profile profile;
  double lambda_max = 40.0;
};

/// One eigenvalue with provenance.
struct EigEntry {
  double lambda = 0.0;
  long multiplicity = 1;
  std::string unit;
  BlockFamily family = BlockFamily::Exceptional;
  int q = -1;
  int level = 0;  // 0 for harmonic sphere modes
  int unit_dim = 1;
  int index = 0;  // position within the unit's own list
  int unit_index = -1;       // into the owning spectrum's unit list
  int degenerate_rank = 0;   // k-th copy of a repeated root within its unit
  double bracket_lo = 0.0, bracket_hi = 0.0;  // secular root bracket
  double error_estimate = 0.0;                // FEM extrapolation gap
  bool clustered = false;
};

struct EigList {
  std::vector<EigEntry> entries;
  int zero_count = 0;
};

inline void tag_entry(EigEntry& e, const RadialUnit& u) {
  e.unit = u.label;
  e.family = u.family;
  e.multiplicity = u.multiplicity;
  e.unit_dim = u.dim();
  if (u.block) {
    e.q = u.block->source.q;
    e.level = u.block->source.level.value_or(0);
  }
}

inline void validate(const RadialProblem& prob) {
  validate(prob.profile);
  require(prob.lambda_max > 0.0, ErrorCode::Domain, "lambda_max must be positive");
  require(prob.unit.dim() >= 1, ErrorCode::Domain, "empty radial unit");
}

}  // namespace conespec
