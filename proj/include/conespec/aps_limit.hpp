#pragma once

// Limit problem on M2(1): harmonic fields (d/dr + A/r) sigma = 0 with the
// APS condition Pi_{<0} sigma(1) = 0, the L2 extension rule, the parametrix of
// d/dr + gamma/r, and the prolongation P_eps of boundary data.

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "conespec/cone_operator.hpp"
#include "conespec/geometry.hpp"
#include "conespec/radial_problem.hpp"

namespace conespec {

/// r^{-gamma} extends in L2 to the infinite cone r >= 1 iff gamma > 1/2.
inline bool l2_extension_rule(double gamma) { return gamma > 0.5; }

/// A whole A-block seen as a radial unit (all degrees at once).
inline RadialUnit block_unit(const ABlock& blk) {
  RadialUnit u;
  u.label = blk.label();
  u.family = blk.family;
  u.multiplicity = blk.source.multiplicity;
  u.block = blk;
  u.embed = Eigen::MatrixXd::Identity(blk.size(), blk.size());
  u.A = blk.matrix;
  u.V = blk.matrix * blk.matrix + blk.matrix;
  u.R.resize(blk.size());
  for (int i = 0; i < blk.size(); ++i) {
    u.slots.push_back(blk.basis[i].slot);
    u.R(i) = blk.basis[i].slot == Slot::Alpha ? 1.0 : -1.0;
  }
  detail::finish_unit(u);
  return u;
}

/// Solutions of (d/dr + A/r) sigma = 0 satisfying the profile's matching
/// conditions. On segment s, sigma = sum_i c_{s,i} (r / r_i)^{-gamma_i} w_i, with
/// r_i the end of the segment where the power is largest (so every column is
/// bounded by 1 and the rank decision is scale-free).
struct HarmonicKernel {
  Eigen::VectorXd gammas;
  Eigen::MatrixXd eigvecs;           // w_i in unit coordinates
  Eigen::MatrixXd basis;             // columns: kernel vectors of stacked c
  Eigen::VectorXd singular_values;   // of the matching system
  bool near_singular = false;
  int dimension() const { return int(basis.cols()); }
};

inline constexpr double kRankTolerance = 1e-10;

inline HarmonicKernel harmonic_kernel(const Profile& prof, const RadialUnit& u) {
  validate(prof);
  HarmonicKernel hk;
  const int d = u.dim();
  const int ns = int(prof.segments.size());
  if (!u.carries_harmonic_fields()) {
    hk.basis = Eigen::MatrixXd::Zero(d * ns, 0);
    return hk;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(u.A);
  hk.gammas = es.eigenvalues();
  hk.eigvecs = es.eigenvectors();
  const auto col = [&](int s, int i) { return s * d + i; };
  const auto scale = [&](int s, int i, double r) {
    const Segment& seg = prof.segments[s];
    const double ref = hk.gammas(i) > 0.0 && seg.r_lo > 0.0 ? seg.r_lo : seg.r_hi;
    return std::pow(r / ref, -hk.gammas(i));
  };
  std::vector<Eigen::RowVectorXd> rows;
  const auto add_row = [&](const Eigen::RowVectorXd& row) { rows.push_back(row); };
  // tips keep only the regular fields r^{-gamma}, gamma < 0
  for (int s = 0; s < ns; ++s) {
    if (!prof.segments[s].touches_zero()) continue;
    for (int i = 0; i < d; ++i) {
      if (hk.gammas(i) > 0.0) {
        Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(d * ns);
        row(col(s, i)) = 1.0;
        add_row(row);
      }
    }
  }
  // seams: sigma_b(rho) = R sigma_a(rho)
  for (int s = 0; s + 1 < ns; ++s) {
    const double rho = prof.seams[s].radius;
    for (int k = 0; k < d; ++k) {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(d * ns);
      for (int i = 0; i < d; ++i) {
        row(col(s + 1, i)) += hk.eigvecs(k, i) * scale(s + 1, i, rho);
        row(col(s, i)) -= u.R(k) * hk.eigvecs(k, i) * scale(s, i, rho);
      }
      add_row(row);
    }
  }
  // boundaries: sigma in the allowed subspace W, i.e. Wperp^T sigma = 0
  const auto boundary = [&](const Endpoint& ep, int s, double r) {
    if (ep.is_tip()) return;
    const BoundarySpace bs = boundary_space(u, ep.bc);
    for (int j = 0; j < bs.Wperp.cols(); ++j) {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(d * ns);
      for (int i = 0; i < d; ++i)
        row(col(s, i)) = bs.Wperp.col(j).dot(hk.eigvecs.col(i)) * scale(s, i, r);
      add_row(row);
    }
  };
  boundary(prof.start, 0, prof.segments.front().start_radius());
  boundary(prof.end, ns - 1, prof.segments.back().end_radius());

  Eigen::MatrixXd S(std::max<std::size_t>(rows.size(), 1), d * ns);
  S.setZero();
  for (std::size_t i = 0; i < rows.size(); ++i) S.row(i) = rows[i];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(S, Eigen::ComputeFullV);
  hk.singular_values = svd.singularValues();
  const double smax = hk.singular_values.size() ? hk.singular_values(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < hk.singular_values.size(); ++i) {
    const double sv = hk.singular_values(i);
    if (sv > kRankTolerance * smax) ++rank;
    if (sv > kRankTolerance * smax && sv < 1e-6 * smax) hk.near_singular = true;
  }
  if (rows.empty()) rank = 0;
  hk.basis = svd.matrixV().rightCols(d * ns - rank);
  return hk;
}

/// Number of lambda = 0 modes of a degree-p unit on a profile.
inline int analytic_zero_modes(const Profile& prof, const RadialUnit& u) {
  return harmonic_kernel(prof, u).dimension();
}

struct ApsProblem {
  Profile m2;  // starts with a boundary at r = 1
  int n = 2;
  double mu_sq_max = 60.0;
  MultiplicityProvider provider;
};

struct KernelBlockRecord {
  std::string block;
  int dimension = 0;           // kernel of the block problem
  std::vector<int> by_degree;  // graded ranks, index = total degree
  long multiplicity = 1;
  bool near_singular = false;
  std::vector<double> gammas;
};

struct KernelReport {
  std::vector<long> dimension_by_degree;  // index p = 0..n+1
  std::vector<KernelBlockRecord> blocks;
  bool near_singular = false;
  double rank_tolerance = kRankTolerance;
  int n = 2;

  /// Degrees covered by the cohomology comparison (1 <= p <= m-1).
  bool in_cohomology_range(int p) const { return p >= 1 && p <= n; }
};

/// Kernel of the limit operator with Pi_{<0}(sigma(1)) = 0 at the boundary,
/// graded by total degree.
inline KernelReport aps_kernel(const ApsProblem& prob) {
  Profile prof = prob.m2;
  validate(prof);
  require(!prof.start.is_tip(), ErrorCode::InvalidProfile, "M2(1) must start with a boundary");
  prof.start = Endpoint::boundary(BcKind::Aps);
  KernelReport rep;
  rep.n = prob.n;
  rep.dimension_by_degree.assign(prob.n + 2, 0);
  for (const auto& mode : enumerate_sphere_modes(prob.n, prob.mu_sq_max, prob.provider)) {
    for (const auto& blk : build_blocks(mode)) {
      const RadialUnit u = block_unit(blk);
      const HarmonicKernel hk = harmonic_kernel(prof, u);
      KernelBlockRecord rec;
      rec.block = blk.label();
      rec.dimension = hk.dimension();
      rec.multiplicity = mode.multiplicity;
      rec.near_singular = hk.near_singular;
      for (int i = 0; i < blk.size(); ++i) rec.gammas.push_back(blk.gammas(i));
      rec.by_degree.assign(prob.n + 2, 0);
      if (hk.dimension() > 0) {
        const int d = u.dim();
        const int ns = int(prof.segments.size());
        for (int p = 0; p <= prob.n + 1; ++p) {
          // functions r^{-gamma_i} are independent: stack P_p w_i c_{s,i}
          Eigen::MatrixXd G = Eigen::MatrixXd::Zero(d * d * ns, hk.dimension());
          for (int v = 0; v < hk.dimension(); ++v)
            for (int s = 0; s < ns; ++s)
              for (int i = 0; i < d; ++i)
                for (int k = 0; k < d; ++k)
                  if (blk.basis[k].total_degree == p)
                    G((s * d + i) * d + k, v) = hk.eigvecs(k, i) * hk.basis(s * d + i, v);
          Eigen::JacobiSVD<Eigen::MatrixXd> svd(G);
          const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
          int rank = 0;
          for (int i = 0; i < svd.singularValues().size(); ++i)
            if (smax > 0.0 && svd.singularValues()(i) > kRankTolerance * smax) ++rank;
          rec.by_degree[p] = rank;
          rep.dimension_by_degree[p] += long(rank) * mode.multiplicity;
        }
      }
      rep.near_singular = rep.near_singular || hk.near_singular;
      rep.blocks.push_back(std::move(rec));
    }
  }
  return rep;
}

/// phi = r^{-gamma} int_{1 or 0}^r rho^gamma psi(rho) d rho, the inverse of
/// d/dr + gamma/r (vanishing at r = 1 for gamma < 0).
struct ParametrixValue {
  double phi = 0.0;
  double quad_error = 0.0;
};

inline ParametrixValue parametrix_apply(double gamma, const std::function<double(double)>& psi,
                                        double r) {
  require(r > 0.0 && r <= 1.0, ErrorCode::Domain, "parametrix is defined on (0, 1]");
  require(gamma != 0.0, ErrorCode::Domain, "gamma = 0 is not in Spec(A)");
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  const auto f = [&](double rho) { return std::pow(rho, gamma) * psi(rho); };
  double err = 0.0;
  const double lower = gamma < 0.0 ? 1.0 : 0.0;
  const double I = GK::integrate(f, lower, r, 15, 1e-14, &err);
  require(std::isfinite(I), ErrorCode::SolverFailure, "parametrix quadrature failed");
  return {std::pow(r, -gamma) * I, std::pow(r, -gamma) * err};
}

/// |(d/dr + gamma/r) phi - psi| at r, derivative by a Richardson-extrapolated
/// central difference of the computed phi.
inline double parametrix_residual(double gamma, const std::function<double(double)>& psi,
                                  double r) {
  const auto phi = [&](double x) { return parametrix_apply(gamma, psi, x).phi; };
  const double h = 1e-3 * r;
  const double d1 = (phi(r + h) - phi(r - h)) / (2 * h);
  const double d2 = (phi(r + h / 2) - phi(r - h / 2)) / h;
  const double dphi = (4 * d2 - d1) / 3;
  return std::abs(dphi + gamma * phi(r) / r - psi(r));
}

/// Boundary datum of one positive channel.
struct ChannelDatum {
  double gamma = 1.0;
  double amplitude = 0.0;  // |sigma_gamma|
};

/// P_eps(sigma) = sum eps^{gamma-1/2} r^{-gamma} sigma_gamma on [eps, 1].
class Prolongation {
 public:
  Prolongation(std::vector<ChannelDatum> data, double eps, int n)
      : data_(std::move(data)), eps_(eps), n_(n) {
    require(eps > 0.0 && eps < 1.0, ErrorCode::Domain, "eps must lie in (0, 1)");
    require(n >= 2, ErrorCode::Domain, "sphere dimension must be >= 2");
    for (const auto& c : data_)
      require(c.gamma > 0.5, ErrorCode::Domain, "prolongation needs gamma > 1/2");
  }

  /// Amplitude of channel i at radius r.
  double channel_value(std::size_t i, double r) const {
    const auto& c = data_[i];
    return std::pow(eps_, c.gamma - 0.5) * std::pow(r, -c.gamma) * c.amplitude;
  }

  /// Closed form (1 - eps^{2 gamma - 1}) / (2 gamma - 1) |sigma_gamma|^2.
  double channel_norm_squared(std::size_t i) const {
    const auto& c = data_[i];
    const double a = 2.0 * c.gamma - 1.0;
    return (1.0 - std::pow(eps_, a)) / a * c.amplitude * c.amplitude;
  }

  double norm_squared() const {
    double s = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) s += channel_norm_squared(i);
    return s;
  }

  double data_norm_squared() const {
    double s = 0.0;
    for (const auto& c : data_) s += c.amplitude * c.amplitude;
    return s;
  }

  /// Constant of the bound ||P_eps sigma||^2 <= C sum |sigma_gamma|^2.
  double bound_constant() const { return 1.0 / (n_ - 1.0); }

  std::size_t size() const { return data_.size(); }
  double eps() const { return eps_; }

 private:
  std::vector<ChannelDatum> data_;
  double eps_;
  int n_;
};

inline Prolongation prolong_P_eps(std::vector<ChannelDatum> data, double eps, int n) {
  return Prolongation(std::move(data), eps, n);
}

}  // namespace conespec
