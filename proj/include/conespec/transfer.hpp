#pragma once

// Secular-equation solver: Bessel transfer matrices across the segments of a
// profile, seam matching, and a sign-change scan of the normalized secular
// function F(k) = det(C S(k)), lambda = k^2.

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <algorithm>
#include <numbers>
#include <vector>

#include "conespec/bessel.hpp"
#include "conespec/radial_problem.hpp"

namespace conespec {

/// Solution basis of -u'' + gamma(gamma+1) u / r^2 = lambda u at r.
struct ChannelFundamental {
  RadialBasis basis;      // f regular at the tip (Friedrichs), g singular
  double nu = 0.0;        // |gamma + 1/2|
  double regular_exponent = 0.0;  // max(gamma+1, -gamma), > 1/2
};

inline ChannelFundamental channel_fundamental(double gamma, double lambda, double r) {
  require(lambda >= 0.0, ErrorCode::Domain, "negative lambda rejected");
  ChannelFundamental cf;
  cf.nu = std::abs(gamma + 0.5);
  cf.regular_exponent = std::max(gamma + 1.0, -gamma);
  cf.basis = radial_basis(cf.nu, lambda, r);
  return cf;
}

struct TransferOptions {
  double scan_refine = 1.0;   // multiplies the scan density
  double zero_tol = 1e-9;     // singular-value threshold for lambda = 0 nullity
  double touch_tol = 1e-12;   // |F| at a local minimum treated as a degenerate root
  double touch_nullity_tol = 1e-6;
};

namespace detail {

struct Station {
  int segment = 0;
  double radius = 0.0;
};

struct Sweep {
  std::vector<Station> stations;
  std::vector<Eigen::MatrixXd> states;   // orthonormal 2d x d per station
  std::vector<Eigen::MatrixXd> factors;  // states[j+1] * factors[j] = map_j states[j]
  Eigen::MatrixXd C;                     // end condition at the last station
};

class Secular {
 public:
  explicit Secular(const RadialProblem& prob) : prob_(prob), u_(prob.unit) {
    validate(prob);
    d_ = u_.dim();
    if (!prob.profile.start.is_tip()) start_space_ = boundary_space(u_, prob.profile.start.bc);
    if (!prob.profile.end.is_tip()) end_space_ = boundary_space(u_, prob.profile.end.bc);
    const auto& segs = prob.profile.segments;
    stations_.push_back({0, prob.profile.start.is_tip() ? segs[0].r_hi : segs[0].start_radius()});
    for (int i = 1; i < int(segs.size()); ++i) stations_.push_back({i, segs[i].start_radius()});
    if (!prob.profile.end.is_tip()) {
      const int last = int(segs.size()) - 1;
      if (stations_.back().radius != segs[last].end_radius())
        stations_.push_back({last, segs[last].end_radius()});
    }
  }

  int dim() const { return d_; }
  const RadialUnit& unit() const { return u_; }
  const RadialProblem& problem() const { return prob_; }

  /// Per-channel (value, derivative) basis at r.
  std::vector<RadialBasis> bases(double lambda, double r) const {
    std::vector<RadialBasis> b;
    for (int i = 0; i < d_; ++i) b.push_back(radial_basis(u_.channel_nu(i), lambda, r));
    return b;
  }

  /// Transfer (sigma, sigma') from r0 to r1 inside one segment.
  Eigen::MatrixXd transfer(double lambda, double r0, double r1) const {
    const auto b0 = bases(lambda, r0), b1 = bases(lambda, r1);
    Eigen::MatrixXd Tc = Eigen::MatrixXd::Zero(2 * d_, 2 * d_);
    for (int i = 0; i < d_; ++i) {
      Eigen::Matrix2d P1, P0inv;
      P1 << b1[i].f.u, b1[i].g.u, b1[i].f.du, b1[i].g.du;
      P0inv << b0[i].g.du, -b0[i].g.u, -b0[i].f.du, b0[i].f.u;
      P0inv /= b0[i].wronskian;
      const Eigen::Matrix2d t = P1 * P0inv;
      Tc(i, i) = t(0, 0);
      Tc(i, d_ + i) = t(0, 1);
      Tc(d_ + i, i) = t(1, 0);
      Tc(d_ + i, d_ + i) = t(1, 1);
    }
    const Eigen::MatrixXd E = block_e();
    return E * Tc * E.transpose();
  }

  Eigen::MatrixXd seam_map(double rho) const {
    const Eigen::MatrixXd R = u_.R.asDiagonal();
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(2 * d_, 2 * d_);
    S.topLeftCorner(d_, d_) = R;
    S.bottomLeftCorner(d_, d_) = -(R * u_.A + u_.A * R) / rho;
    S.bottomRightCorner(d_, d_) = -R;
    return S;
  }

  Eigen::MatrixXd initial_state(double lambda) const {
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(2 * d_, d_);
    const double r = stations_[0].radius;
    if (prob_.profile.start.is_tip()) {
      const auto b = bases(lambda, r);
      for (int i = 0; i < d_; ++i) {
        S.block(0, i, d_, 1) = u_.channel_vecs.col(i) * b[i].f.u;
        S.block(d_, i, d_, 1) = u_.channel_vecs.col(i) * b[i].f.du;
      }
      return S;
    }
    const auto& W = start_space_.W;
    const auto& Wp = start_space_.Wperp;
    int col = 0;
    for (int j = 0; j < W.cols(); ++j, ++col) {
      S.block(0, col, d_, 1) = W.col(j);
      S.block(d_, col, d_, 1) = -W * (W.transpose() * u_.A * W.col(j)) / r;
    }
    for (int j = 0; j < Wp.cols(); ++j, ++col) S.block(d_, col, d_, 1) = Wp.col(j);
    return S;
  }

  Eigen::MatrixXd end_condition(double lambda) const {
    const Station& s = stations_.back();
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(d_, 2 * d_);
    if (prob_.profile.end.is_tip()) {
      const auto b = bases(lambda, s.radius);
      for (int i = 0; i < d_; ++i) {
        const Eigen::VectorXd e = u_.channel_vecs.col(i);
        C.block(i, 0, 1, d_) = -b[i].f.du * e.transpose();
        C.block(i, d_, 1, d_) = b[i].f.u * e.transpose();
      }
    } else {
      const auto& W = end_space_.W;
      const auto& Wp = end_space_.Wperp;
      int row = 0;
      for (int j = 0; j < Wp.cols(); ++j, ++row) C.block(row, 0, 1, d_) = Wp.col(j).transpose();
      for (int j = 0; j < W.cols(); ++j, ++row) {
        C.block(row, 0, 1, d_) = W.col(j).transpose() * u_.A / s.radius;
        C.block(row, d_, 1, d_) = W.col(j).transpose();
      }
    }
    for (int i = 0; i < d_; ++i) {
      const double nrm = C.row(i).norm();
      if (nrm > 0.0) C.row(i) /= nrm;
    }
    return C;
  }

  /// Map from station j to station j+1.
  Eigen::MatrixXd station_map(double lambda, int j) const {
    const auto& segs = prob_.profile.segments;
    const Station a = stations_[j], b = stations_[j + 1];
    const Segment& sa = segs[a.segment];
    if (a.segment == b.segment) return transfer(lambda, a.radius, b.radius);
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(2 * d_, 2 * d_);
    if (a.radius != sa.end_radius()) M = transfer(lambda, a.radius, sa.end_radius());
    return seam_map(prob_.profile.seams[a.segment].radius) * M;
  }

  Sweep sweep(double lambda) const {
    Sweep sw;
    sw.stations = stations_;
    sw.states.push_back(orthonormalize(initial_state(lambda), nullptr));
    for (int j = 0; j + 1 < int(stations_.size()); ++j) {
      Eigen::MatrixXd f;
      sw.states.push_back(orthonormalize(station_map(lambda, j) * sw.states.back(), &f));
      sw.factors.push_back(f);
    }
    sw.C = end_condition(lambda);
    return sw;
  }

  double value(double lambda) const {
    const Sweep sw = sweep(lambda);
    return (sw.C * sw.states.back()).determinant();
  }

  const std::vector<Station>& stations() const { return stations_; }

 private:
  Eigen::MatrixXd block_e() const {
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(2 * d_, 2 * d_);
    E.topLeftCorner(d_, d_) = u_.channel_vecs;
    E.bottomRightCorner(d_, d_) = u_.channel_vecs;
    return E;
  }

  // QR with positive diagonal, so determinant signs are preserved.
  static Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& S, Eigen::MatrixXd* factor) {
    const int d = int(S.cols());
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(S);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(S.rows(), d);
    Eigen::MatrixXd Rf = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
    for (int i = 0; i < d; ++i) {
      if (Rf(i, i) < 0.0) {
        Q.col(i) *= -1.0;
        Rf.row(i) *= -1.0;
      }
    }
    if (factor) *factor = Rf;
    return Q;
  }

  const RadialProblem& prob_;
  RadialUnit u_;
  int d_ = 1;
  BoundarySpace start_space_, end_space_;
  std::vector<Station> stations_;
};

}  // namespace detail

/// Dimension of the lambda = 0 eigenspace (nullity of the secular matrix).

namespace detail {

inline int secular_nullity(const Secular& sec, double lambda, double tol) {
  const auto sw = sec.sweep(lambda);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sw.C * sw.states.back());
  int nullity = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) <= tol) ++nullity;
  return nullity;
}

}  // namespace detail

/// Dimension of the lambda = 0 eigenspace (nullity of the secular matrix).
inline int transfer_zero_modes(const RadialProblem& prob, double tol = 1e-9) {
  return detail::secular_nullity(detail::Secular(prob), 0.0, tol);
}

/// Positive eigenvalues below lambda_max plus the lambda = 0 multiplicity.
///
/// F(k) is sampled on a grid of spacing pi / (8 d L); sign changes are
/// bracketed and solved with TOMS 748. A sample whose |F| is a local minimum
/// without a sign change is minimized: a dip through zero yields two roots,
/// a touch of zero is a degenerate root whose multiplicity is the nullity of
/// the secular matrix (flagged as clustered).
inline EigList transfer_spectrum(const RadialProblem& prob, const TransferOptions& opt = {}) {
  detail::Secular sec(prob);
  EigList out;
  out.zero_count = detail::secular_nullity(sec, 0.0, opt.zero_tol);
  for (int i = 0; i < out.zero_count; ++i) {
    EigEntry e;
    tag_entry(e, prob.unit);
    out.entries.push_back(e);
  }
  const double L = prob.profile.length();
  const double k_max = std::sqrt(prob.lambda_max);
  const auto F = [&](double k) { return sec.value(k * k); };

  std::vector<double> ks, fs;
  const double dk = std::numbers::pi / (8.0 * sec.dim() * L * opt.scan_refine);
  for (double k = 1e-6 * std::min(k_max, std::numbers::pi / L);; k += dk) {
    ks.push_back(std::min(k, k_max));
    fs.push_back(F(ks.back()));
    if (k >= k_max) break;
  }

  std::vector<EigEntry> found;
  const auto add_root = [&](double lo, double hi, double flo, double fhi, bool clustered) {
    double a = lo, b = hi;
    if (flo != 0.0 && fhi != 0.0) {
      std::uintmax_t it = 200;
      auto r = boost::math::tools::toms748_solve(
          F, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(52), it);
      a = r.first;
      b = r.second;
    } else if (flo == 0.0) {
      b = lo;
    } else {
      a = hi;
    }
    const double k = 0.5 * (a + b);
    if (k >= k_max) return;
    EigEntry e;
    tag_entry(e, prob.unit);
    e.lambda = k * k;
    e.bracket_lo = a * a;
    e.bracket_hi = b * b;
    e.clustered = clustered;
    found.push_back(e);
  };

  for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
    if (fs[i] == 0.0 || (fs[i] < 0.0) != (fs[i + 1] < 0.0)) {
      add_root(ks[i], ks[i + 1], fs[i], fs[i + 1], false);
      continue;
    }
    if (i == 0) continue;
    const double s = fs[i] > 0.0 ? 1.0 : -1.0;
    if ((fs[i - 1] < 0.0) != (fs[i] < 0.0)) continue;
    if (!(std::abs(fs[i]) <= std::abs(fs[i - 1]) && std::abs(fs[i]) <= std::abs(fs[i + 1])))
      continue;
    std::uintmax_t it = 100;
    const auto m = boost::math::tools::brent_find_minima(
        [&](double k) { return s * F(k); }, ks[i - 1], ks[i + 1], 40, it);
    const double kmin = m.first, fmin = s * m.second;
    if ((fmin < 0.0) != (s < 0.0) && fmin != 0.0) {
      add_root(ks[i - 1], kmin, fs[i - 1], fmin, true);
      add_root(kmin, ks[i + 1], fmin, fs[i + 1], true);
    } else if (std::abs(fmin) <= opt.touch_tol) {
      const int mult = std::max(2, detail::secular_nullity(sec, kmin * kmin, opt.touch_nullity_tol));
      // the mult smallest singular values vanish linearly: V-shaped, so a
      // bracketing minimizer reaches full precision
      const auto sv = [&](double k) {
        const auto sw = sec.sweep(k * k);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(sw.C * sw.states.back());
        const auto& v = svd.singularValues();
        return v(v.size() - std::min<int>(mult, int(v.size())));
      };
      // golden section (Boost's minimizer stops at sqrt(eps))
      const double w = 1e-6 * std::max(1.0, kmin);
      const double g = 0.5 * (std::sqrt(5.0) - 1.0);
      double a = kmin - w, b = kmin + w;
      double c = b - g * (b - a), d = a + g * (b - a);
      double fc = sv(c), fd = sv(d);
      for (int j = 0; j < 100 && b - a > 4e-16 * b; ++j) {
        if (fc < fd) {
          b = d, d = c, fd = fc;
          c = b - g * (b - a), fc = sv(c);
        } else {
          a = c, c = d, fc = fd;
          d = a + g * (b - a), fd = sv(d);
        }
      }
      const double kref = 0.5 * (a + b);
      for (int j = 0; j < mult; ++j) add_root(kref, kref, 0.0, 0.0, true);
    }
  }
  std::sort(found.begin(), found.end(),
            [](const EigEntry& a, const EigEntry& b) { return a.lambda < b.lambda; });
  for (auto& e : found) out.entries.push_back(e);
  for (std::size_t i = 0; i < out.entries.size(); ++i) out.entries[i].index = int(i);
  return out;
}

/// Eigenfunction of a radial problem in unit coordinates, normalized by
/// sum_seg int |sigma|^2 dr = 1.
class RadialEigenfunction {
 public:
  struct SegmentData {
    // channel coefficients: u_i = a_i f_i + b_i g_i
    Eigen::VectorXd a, b;
  };

  /// `null_index` picks a vector of a degenerate eigenspace (0 = smallest
  /// singular value).
  RadialEigenfunction(const RadialProblem& prob, double lambda, int null_index = 0)
      : prob_(prob), lambda_(lambda) {
    detail::Secular sec(prob_);
    const auto sw = sec.sweep(lambda);
    const int d = sec.dim();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sw.C * sw.states.back(), Eigen::ComputeFullV);
    require(null_index >= 0 && null_index < d, ErrorCode::Domain, "null_index out of range");
    residual_ = svd.singularValues()(d - 1 - null_index);
    std::vector<Eigen::VectorXd> y(sw.states.size());
    std::vector<double> logs(sw.states.size(), 0.0);
    y.back() = svd.matrixV().col(d - 1 - null_index);
    for (int j = int(sw.states.size()) - 2; j >= 0; --j) {
      Eigen::VectorXd v = sw.factors[j].triangularView<Eigen::Upper>().solve(y[j + 1]);
      const double nv = v.norm();
      y[j] = v / nv;
      logs[j] = logs[j + 1] + std::log(nv);
    }
    const auto& segs = prob_.profile.segments;
    data_.resize(segs.size());
    std::vector<double> seg_log(segs.size(), 0.0);
    std::vector<bool> done(segs.size(), false);
    for (std::size_t j = 0; j < sw.stations.size(); ++j) {
      const auto& st = sw.stations[j];
      if (done[st.segment]) continue;
      done[st.segment] = true;
      const Eigen::VectorXd x = sw.states[j] * y[j];
      const auto b = sec.bases(lambda, st.radius);
      SegmentData sd;
      sd.a.resize(d);
      sd.b.resize(d);
      const Eigen::MatrixXd& E = sec.unit().channel_vecs;
      const Eigen::VectorXd u = E.transpose() * x.head(d);
      const Eigen::VectorXd du = E.transpose() * x.tail(d);
      for (int i = 0; i < d; ++i) {
        sd.a(i) = (b[i].g.du * u(i) - b[i].g.u * du(i)) / b[i].wronskian;
        sd.b(i) = (-b[i].f.du * u(i) + b[i].f.u * du(i)) / b[i].wronskian;
      }
      if (segs[st.segment].touches_zero()) sd.b.setZero();
      data_[st.segment] = sd;
      seg_log[st.segment] = logs[j];
    }
    const double ref = *std::max_element(seg_log.begin(), seg_log.end());
    for (std::size_t s = 0; s < segs.size(); ++s) {
      const double f = std::exp(seg_log[s] - ref);
      data_[s].a *= f;
      data_[s].b *= f;
    }
    const double nrm2 = norm_squared();
    const double scale = 1.0 / std::sqrt(nrm2);
    for (auto& sd : data_) {
      sd.a *= scale;
      sd.b *= scale;
    }
  }

  double lambda() const { return lambda_; }
  double secular_residual() const { return residual_; }
  const RadialProblem& problem() const { return prob_; }

  /// sigma(r) on segment s (unit coordinates).
  Eigen::VectorXd value(int s, double r) const { return eval(s, r, false); }
  Eigen::VectorXd derivative(int s, double r) const { return eval(s, r, true); }

  /// int |sigma|^2 dr over the whole profile.
  double norm_squared() const {
    double total = 0.0;
    for (int s = 0; s < int(prob_.profile.segments.size()); ++s) {
      const auto& seg = prob_.profile.segments[s];
      total += integrate(seg.r_lo, seg.r_hi, [&](double r) { return value(s, r).squaredNorm(); });
    }
    return total;
  }

  /// Composite Gauss-Legendre quadrature on [a, b], graded toward r = 0.
  template <class Fn>
  static double integrate(double a, double b, Fn&& fn, int pieces = 64) {
    static const double x[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                0.7966664774136267,  0.9602898564975363};
    static const double w[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                0.2223810344533745, 0.1012285362903763};
    double total = 0.0;
    for (int p = 0; p < pieces; ++p) {
      const double t0 = double(p) / pieces, t1 = double(p + 1) / pieces;
      const double lo = a + (b - a) * t0, hi = a + (b - a) * t1;
      const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      for (int q = 0; q < 8; ++q) total += w[q] * half * fn(mid + half * x[q]);
    }
    return total;
  }

 private:
  Eigen::VectorXd eval(int s, double r, bool deriv) const {
    const auto& u = prob_.unit;
    const int d = u.dim();
    Eigen::VectorXd ch(d);
    if (r <= 0.0) return Eigen::VectorXd::Zero(d);
    for (int i = 0; i < d; ++i) {
      const auto b = radial_basis(u.channel_nu(i), lambda_, r);
      const double gi = data_[s].b(i) == 0.0 ? 0.0 : (deriv ? b.g.du : b.g.u);
      ch(i) = data_[s].a(i) * (deriv ? b.f.du : b.f.u) + data_[s].b(i) * gi;
    }
    return u.channel_vecs * ch;
  }

  RadialProblem prob_;
  double lambda_ = 0.0;
  double residual_ = 0.0;
  std::vector<SegmentData> data_;
};

}  // namespace conespec
