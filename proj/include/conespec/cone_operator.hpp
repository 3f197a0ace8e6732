#pragma once

// Tangential operator A of the cone dr^2 + r^2 h over S^n.
//
// On sigma = (beta, alpha) (normal / tangential parts after the U map) A is
//   A = [[n/2 - P, -D0], [-D0, P - n/2]]
// with P the sphere degree and D0 = d + delta on S^n. Over one coexact
// eigenform eta (Delta eta = mu^2 eta) it splits into 2x2 blocks:
//
//   MINUS_HALF  v1 = (0, eta)  [deg q],  v4' = (d eta/mu, 0)  [deg q+2]
//   PLUS_HALF   v2 = (0, d eta/mu),      v3 = (eta, 0)        [both deg q+1]
//
// and the harmonic modes of S^n give four 1x1 EXCEPTIONAL blocks.

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "conespec/error.hpp"
#include "conespec/sphere_modes.hpp"

namespace conespec {

enum class BlockFamily { MinusHalf, PlusHalf, Exceptional };

/// Tangential (alpha) or normal (beta) component of a form on the cone.
enum class Slot { Alpha, Beta };

inline const char* to_string(BlockFamily f) {
  switch (f) {
    case BlockFamily::MinusHalf: return "MINUS_HALF";
    case BlockFamily::PlusHalf: return "PLUS_HALF";
    case BlockFamily::Exceptional: return "EXCEPTIONAL";
  }
  return "?";
}

struct BasisVector {
  Slot slot;
  int sphere_degree;
  int total_degree;
};

struct ABlock {
  SphereMode source;
  BlockFamily family = BlockFamily::Exceptional;
  std::vector<BasisVector> basis;
  Eigen::MatrixXd matrix;   // in the basis above
  Eigen::VectorXd gammas;   // descending: gamma_plus first
  Eigen::MatrixXd eigvecs;  // column j belongs to gammas(j)

  int size() const { return static_cast<int>(basis.size()); }

  bool touches_degree(int p) const {
    for (const auto& b : basis)
      if (b.total_degree == p) return true;
    return false;
  }

  std::string label() const {
    std::string s = to_string(family);
    s += "(q=" + std::to_string(source.q);
    if (source.level) s += ",k=" + std::to_string(*source.level);
    if (family == BlockFamily::Exceptional)
      s += basis[0].slot == Slot::Alpha ? ",alpha" : ",beta";
    return s + ")";
  }
};

namespace detail {

struct SymEig2 {
  double plus, minus;
  Eigen::Vector2d v_plus, v_minus;
};

// Closed-form eigensystem of [[a, b], [b, d]] (Jacobi rotation).
inline SymEig2 sym_eig2(double a, double b, double d) {
  const double mean = 0.5 * (a + d);
  const double radius = std::hypot(0.5 * (a - d), b);
  const double theta = 0.5 * std::atan2(2.0 * b, a - d);
  SymEig2 e;
  e.plus = mean + radius;
  e.minus = mean - radius;
  e.v_plus = Eigen::Vector2d(std::cos(theta), std::sin(theta));
  e.v_minus = Eigen::Vector2d(-std::sin(theta), std::cos(theta));
  return e;
}

inline ABlock make_2x2(const SphereMode& mode, BlockFamily family,
                       std::vector<BasisVector> basis, double a, double b,
                       double d) {
  ABlock blk;
  blk.source = mode;
  blk.family = family;
  blk.basis = std::move(basis);
  blk.matrix.resize(2, 2);
  blk.matrix << a, b, b, d;
  const auto e = sym_eig2(a, b, d);
  blk.gammas.resize(2);
  blk.gammas << e.plus, e.minus;
  blk.eigvecs.resize(2, 2);
  blk.eigvecs.col(0) = e.v_plus;
  blk.eigvecs.col(1) = e.v_minus;
  return blk;
}

inline ABlock make_1x1(const SphereMode& mode, BasisVector basis, double a) {
  ABlock blk;
  blk.source = mode;
  blk.family = BlockFamily::Exceptional;
  blk.basis = {basis};
  blk.matrix = Eigen::MatrixXd::Constant(1, 1, a);
  blk.gammas = Eigen::VectorXd::Constant(1, a);
  blk.eigvecs = Eigen::MatrixXd::Identity(1, 1);
  return blk;
}

}  // namespace detail

/// The +-1/2 +- sqrt(mu^2 + ((n-1)/2 - q)^2) values, as a reference.
inline double gamma_formula(int n, int q, double mu_sq, int outer_sign,
                            int inner_sign) {
  const double shift = 0.5 * (n - 1) - q;
  return 0.5 * outer_sign + inner_sign * std::sqrt(mu_sq + shift * shift);
}

/// Blocks of A generated by one sphere mode.
inline std::vector<ABlock> build_blocks(const SphereMode& mode) {
  const int n = mode.n;
  const int q = mode.q;
  const double half = 0.5 * n;
  std::vector<ABlock> out;
  if (mode.harmonic()) {
    // alpha-slot: A = P - n/2, beta-slot: A = n/2 - P, P the sphere degree.
    out.push_back(detail::make_1x1(mode, {Slot::Alpha, q, q}, q - half));
    out.push_back(detail::make_1x1(mode, {Slot::Beta, q, q + 1}, half - q));
    return out;
  }
  const double mu = std::sqrt(mode.mu_sq);
  out.push_back(detail::make_2x2(
      mode, BlockFamily::MinusHalf,
      {{Slot::Alpha, q, q}, {Slot::Beta, q + 1, q + 2}}, q - half, -mu,
      half - q - 1));
  out.push_back(detail::make_2x2(
      mode, BlockFamily::PlusHalf,
      {{Slot::Alpha, q + 1, q + 1}, {Slot::Beta, q, q + 1}}, q + 1 - half, -mu,
      half - q));
  return out;
}

struct GammaChannel {
  double gamma = 0.0;
  int degree = 0;
  long multiplicity = 1;
  ABlock block;
  int index = 0;  // column of block.eigvecs
  Eigen::VectorXd eigvec;
};

/// Channels (eigenvectors of A) with a component in total degree p, over all
/// sphere modes with mu^2 <= mu_sq_max.
inline std::vector<GammaChannel> gamma_channels(
    int n, int p, double mu_sq_max, const MultiplicityProvider& provider = {}) {
  require(p >= 0 && p <= n + 1, ErrorCode::Domain,
          "total degree p must lie in [0, n+1], got " + std::to_string(p));
  std::vector<GammaChannel> out;
  for (const auto& mode : enumerate_sphere_modes(n, mu_sq_max, provider)) {
    for (const auto& blk : build_blocks(mode)) {
      if (!blk.touches_degree(p)) continue;
      for (int j = 0; j < blk.size(); ++j) {
        out.push_back(GammaChannel{blk.gammas(j), p, mode.multiplicity, blk, j,
                                   blk.eigvecs.col(j)});
      }
    }
  }
  return out;
}

inline Eigen::MatrixXd spectral_projector(const ABlock& blk, bool negative) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(blk.size(), blk.size());
  for (int j = 0; j < blk.size(); ++j) {
    const bool neg = blk.gammas(j) < 0.0;
    if (neg == negative) P += blk.eigvecs.col(j) * blk.eigvecs.col(j).transpose();
  }
  return P;
}

inline Eigen::MatrixXd negative_projector(const ABlock& blk) {
  return spectral_projector(blk, true);
}
inline Eigen::MatrixXd positive_projector(const ABlock& blk) {
  return spectral_projector(blk, false);
}

/// APS spectral projectors Pi_{<0}, Pi_{>0} over an enumerated channel list.
class ApsProjector {
 public:
  explicit ApsProjector(std::vector<GammaChannel> channels)
      : channels_(std::move(channels)) {
    for (const auto& c : channels_) {
      require(c.gamma != 0.0, ErrorCode::Domain, "0 is not in Spec(A)");
    }
  }

  bool selects_negative(std::size_t i) const { return channels_[i].gamma < 0.0; }
  const std::vector<GammaChannel>& channels() const { return channels_; }

  /// Pi_{<0} applied to data given in the block basis of blk.
  Eigen::VectorXd negative(const ABlock& blk, const Eigen::VectorXd& x) const {
    return negative_projector(blk) * x;
  }
  Eigen::VectorXd positive(const ABlock& blk, const Eigen::VectorXd& x) const {
    return positive_projector(blk) * x;
  }

 private:
  std::vector<GammaChannel> channels_;
};

inline ApsProjector aps_projector(std::vector<GammaChannel> channels) {
  return ApsProjector(std::move(channels));
}

}  // namespace conespec
