#pragma once

// Banded symmetric generalized eigenproblem K x = lambda M x.
//
// Eigenvalues are located by Sylvester inertia of K - s M (LDL^T without
// pivoting) and polished by Rayleigh-quotient iteration inside the isolating
// interval.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "conespec/error.hpp"

namespace conespec {

/// Lower band of a symmetric matrix: entry (i, j), i >= j, i - j <= bw.
class BandedSym {
 public:
  BandedSym() = default;
  BandedSym(int n, int bw) : n_(n), bw_(bw), data_(std::size_t(n) * (bw + 1), 0.0) {}

  int size() const { return n_; }
  int bandwidth() const { return bw_; }

  double& at(int i, int j) {
    if (i < j) std::swap(i, j);
    return data_[std::size_t(j) * (bw_ + 1) + (i - j)];
  }
  double get(int i, int j) const {
    if (i < j) std::swap(i, j);
    if (i - j > bw_) return 0.0;
    return data_[std::size_t(j) * (bw_ + 1) + (i - j)];
  }
  void add(int i, int j, double v) {
    require(std::abs(i - j) <= bw_, ErrorCode::SolverFailure, "entry outside the band");
    at(i, j) += v;
  }

  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n_);
    for (int j = 0; j < n_; ++j) {
      y(j) += get(j, j) * x(j);
      for (int i = j + 1; i <= std::min(n_ - 1, j + bw_); ++i) {
        const double a = data_[std::size_t(j) * (bw_ + 1) + (i - j)];
        y(i) += a * x(j);
        y(j) += a * x(i);
      }
    }
    return y;
  }

  /// this - s * other (same band).
  BandedSym shifted(const BandedSym& other, double s) const {
    BandedSym out = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] -= s * other.data_[i];
    return out;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  friend class BandedLdlt;
  int n_ = 0;
  int bw_ = 0;
  std::vector<double> data_;
};

/// Unpivoted LDL^T of a banded symmetric matrix; exact pivots of zero are
/// nudged so that the inertia count stays defined.
class BandedLdlt {
 public:
  explicit BandedLdlt(const BandedSym& a) : f_(a) {
    const int n = f_.n_, bw = f_.bw_;
    const double tiny = std::max(f_.max_abs(), 1.0) * 1e-300;
    d_.resize(n);
    for (int j = 0; j < n; ++j) {
      double dj = f_.get(j, j);
      for (int k = std::max(0, j - bw); k < j; ++k) {
        const double l = f_.get(j, k);
        dj -= l * l * d_[k];
      }
      if (dj == 0.0) dj = tiny;
      d_[j] = dj;
      for (int i = j + 1; i <= std::min(n - 1, j + bw); ++i) {
        double v = f_.get(i, j);
        for (int k = std::max(0, i - bw); k < j; ++k) v -= f_.get(i, k) * f_.get(j, k) * d_[k];
        f_.at(i, j) = v / dj;
      }
    }
  }

  int negative_count() const {
    return int(std::count_if(d_.begin(), d_.end(), [](double v) { return v < 0.0; }));
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    const int n = f_.n_, bw = f_.bw_;
    Eigen::VectorXd x = b;
    for (int i = 0; i < n; ++i)
      for (int k = std::max(0, i - bw); k < i; ++k) x(i) -= f_.get(i, k) * x(k);
    for (int i = 0; i < n; ++i) x(i) /= d_[i];
    for (int i = n - 1; i >= 0; --i)
      for (int k = i + 1; k <= std::min(n - 1, i + bw); ++k) x(i) -= f_.get(k, i) * x(k);
    return x;
  }

 private:
  BandedSym f_;
  std::vector<double> d_;
};

/// Number of eigenvalues of (K, M) strictly below s (M positive definite).
inline int sturm_count(const BandedSym& K, const BandedSym& M, double s) {
  return BandedLdlt(K.shifted(M, s)).negative_count();
}

struct BandedEigen {
  std::vector<double> values;
};

namespace detail {

// Rayleigh-quotient polish of the single eigenvalue in (lo, hi).
inline double polish_simple(const BandedSym& K, const BandedSym& M, double lo, double hi,
                            double rel_tol) {
  double shift = 0.5 * (lo + hi);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(K.size());
  for (int i = 0; i < K.size(); ++i) x(i) += 0.37 * std::sin(1.3 * i);
  double rq = shift;
  for (int it = 0; it < 12; ++it) {
    BandedLdlt f(K.shifted(M, shift));
    Eigen::VectorXd y = f.solve(M.multiply(x));
    const double nrm = std::sqrt(std::abs(y.dot(M.multiply(y))));
    if (!(nrm > 0.0) || !std::isfinite(nrm)) break;
    x = y / nrm;
    const double next = x.dot(K.multiply(x));
    if (!(next > lo && next < hi)) break;
    const bool done = std::abs(next - rq) <= rel_tol * std::max(1.0, std::abs(next));
    rq = next;
    if (done && it > 0) return rq;
    shift = rq;
  }
  // fall back to plain bisection
  while (hi - lo > rel_tol * std::max(1.0, std::abs(hi))) {
    const double mid = 0.5 * (lo + hi);
    if (sturm_count(K, M, mid) >= 1 + sturm_count(K, M, lo)) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// All eigenvalues of (K, M) in [lo, hi), with multiplicity, ascending.
inline BandedEigen banded_eigenvalues(const BandedSym& K, const BandedSym& M, double lo,
                                      double hi, double rel_tol = 1e-13) {
  require(lo < hi, ErrorCode::Domain, "empty eigenvalue window");
  BandedEigen out;
  struct Interval {
    double a, b;
    int na, nb;
  };
  std::vector<Interval> stack{{lo, hi, sturm_count(K, M, lo), sturm_count(K, M, hi)}};
  std::vector<std::pair<double, int>> found;  // (value, multiplicity)
  const double isolate_tol = 1e-3;
  while (!stack.empty()) {
    Interval iv = stack.back();
    stack.pop_back();
    const int m = iv.nb - iv.na;
    if (m <= 0) continue;
    const double width = iv.b - iv.a;
    const double scale = std::max(1.0, std::max(std::abs(iv.a), std::abs(iv.b)));
    if (m == 1 && width <= isolate_tol * scale) {
      found.push_back({detail::polish_simple(K, M, iv.a, iv.b, rel_tol), 1});
      continue;
    }
    if (width <= rel_tol * scale) {
      found.push_back({0.5 * (iv.a + iv.b), m});  // cluster at working precision
      continue;
    }
    const double mid = 0.5 * (iv.a + iv.b);
    const int nm = sturm_count(K, M, mid);
    stack.push_back({iv.a, mid, iv.na, nm});
    stack.push_back({mid, iv.b, nm, iv.nb});
  }
  std::sort(found.begin(), found.end());
  for (const auto& [v, m] : found)
    for (int i = 0; i < m; ++i) out.values.push_back(v);
  return out;
}

}  // namespace conespec
