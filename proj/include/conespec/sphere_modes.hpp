#pragma once

// Spectrum of the Hodge Laplacian on coclosed forms of the round sphere S^n.
//
// Coexact q-eigenforms come in levels k >= 1 with eigenvalue
// mu^2 = (k+q)(k+n-q-1). The two harmonic forms (constants in degree 0, the
// volume form in degree n) are carried as separate HARMONIC modes.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "conespec/error.hpp"

namespace conespec {

struct SphereMode {
  int n = 2;
  int q = 0;
  std::optional<int> level;  // empty for the harmonic modes
  double mu_sq = 0.0;
  long multiplicity = 1;

  bool harmonic() const { return !level.has_value(); }
};

namespace detail {

inline void check_coexact_args(int n, int q, int k) {
  require(n >= 2, ErrorCode::Domain,
          "sphere dimension must be >= 2, got " + std::to_string(n));
  require(q >= 0 && q <= n - 1, ErrorCode::Domain,
          "coexact degree q must lie in [0, n-1], got q=" + std::to_string(q));
  require(k >= 1, ErrorCode::Domain,
          "level k must be >= 1, got k=" + std::to_string(k));
}

// Weyl dimension formula for the SO(N) irreducible with the given highest
// weight (length floor(N/2)).
inline double weyl_dimension(int N, const std::vector<double>& weight) {
  const int rank = N / 2;
  std::vector<double> rho(rank), shifted(rank);
  const bool odd = (N % 2) == 1;
  for (int i = 0; i < rank; ++i) {
    rho[i] = odd ? (rank - i) - 0.5 : double(rank - i - 1);
    shifted[i] = weight[i] + rho[i];
  }
  double dim = 1.0;
  for (int i = 0; i < rank; ++i) {
    for (int j = i + 1; j < rank; ++j) {
      dim *= (shifted[i] * shifted[i] - shifted[j] * shifted[j]) /
             (rho[i] * rho[i] - rho[j] * rho[j]);
    }
    if (odd) dim *= shifted[i] / rho[i];
  }
  return dim;
}

}  // namespace detail

/// mu^2 of the level-k coexact q-eigenforms on S^n.
inline double coexact_eigenvalue(int n, int q, int k) {
  detail::check_coexact_args(n, q, k);
  return double(k + q) * double(k + n - q - 1);
}

/// Multiplicity of coexact q-eigenforms on S^n via the SO(n+1) Weyl formula.
/// Coexact q-forms at level k carry the highest weight (k, 1^q, 0, ...); the
/// duality q <-> n-1-q (given by *d) folds the upper half onto the lower one.
inline long weyl_coexact_multiplicity(int n, int q, int k) {
  detail::check_coexact_args(n, q, k);
  const int qq = std::min(q, n - 1 - q);
  const int N = n + 1;
  const int rank = N / 2;
  std::vector<double> weight(rank, 0.0);
  weight[0] = k;
  for (int i = 1; i <= qq; ++i) weight[i] = 1.0;
  double dim = detail::weyl_dimension(N, weight);
  // For even N the weight with a nonzero last entry splits into the
  // self-dual and anti-self-dual pieces; both are coexact.
  if (N % 2 == 0 && qq + 1 == rank && rank > 1) dim *= 2.0;
  return std::lround(dim);
}

/// Source of coexact multiplicities. The default uses the Weyl formula; a
/// restricted provider can refuse (UNSUPPORTED) instead of guessing.
class MultiplicityProvider {
 public:
  using Hook = std::function<std::optional<long>(int n, int q, int k)>;

  MultiplicityProvider() : hook_(weyl_hook()), name_("weyl") {}
  MultiplicityProvider(Hook hook, std::string name)
      : hook_(std::move(hook)), name_(std::move(name)) {}

  static MultiplicityProvider weyl() { return {}; }

  /// Validated closed form 2k+1 for S^2 only; everything else is UNSUPPORTED.
  static MultiplicityProvider n2_only() {
    return {[](int n, int, int k) -> std::optional<long> {
              if (n != 2) return std::nullopt;
              return 2L * k + 1;
            },
            "n2_only"};
  }

  long operator()(int n, int q, int k) const {
    detail::check_coexact_args(n, q, k);
    auto m = hook_(n, q, k);
    if (!m) {
      throw Error(ErrorCode::Unsupported,
                  "multiplicity provider '" + name_ + "' does not cover (n=" +
                      std::to_string(n) + ", q=" + std::to_string(q) +
                      ", k=" + std::to_string(k) + ")");
    }
    require(*m > 0, ErrorCode::Domain, "multiplicity must be positive");
    return *m;
  }

  const std::string& name() const { return name_; }

 private:
  static Hook weyl_hook() {
    return [](int n, int q, int k) -> std::optional<long> {
      return weyl_coexact_multiplicity(n, q, k);
    };
  }

  Hook hook_;
  std::string name_;
};

inline long coexact_multiplicity(int n, int q, int k,
                                 const MultiplicityProvider& provider = {}) {
  return provider(n, q, k);
}

inline SphereMode harmonic_mode(int n, int q) {
  require(n >= 2, ErrorCode::Domain, "sphere dimension must be >= 2");
  require(q == 0 || q == n, ErrorCode::Domain,
          "harmonic forms on S^n exist only in degrees 0 and n");
  return SphereMode{n, q, std::nullopt, 0.0, 1};
}

inline SphereMode coexact_mode(int n, int q, int k,
                               const MultiplicityProvider& provider = {}) {
  return SphereMode{n, q, k, coexact_eigenvalue(n, q, k),
                    coexact_multiplicity(n, q, k, provider)};
}

/// All modes with mu^2 <= mu_sq_max, sorted by (q, mu^2).
inline std::vector<SphereMode> enumerate_sphere_modes(
    int n, double mu_sq_max, const MultiplicityProvider& provider = {}) {
  require(n >= 2, ErrorCode::Domain, "sphere dimension must be >= 2");
  require(mu_sq_max > 0.0, ErrorCode::Domain, "mu_sq_max must be positive");
  std::vector<SphereMode> modes;
  modes.push_back(harmonic_mode(n, 0));
  modes.push_back(harmonic_mode(n, n));
  for (int q = 0; q <= n - 1; ++q) {
    // mu^2 is increasing in k
    for (int k = 1; coexact_eigenvalue(n, q, k) <= mu_sq_max; ++k) {
      modes.push_back(coexact_mode(n, q, k, provider));
    }
  }
  std::stable_sort(modes.begin(), modes.end(),
                   [](const SphereMode& a, const SphereMode& b) {
                     return std::tie(a.q, a.mu_sq) < std::tie(b.q, b.mu_sq);
                   });
  return modes;
}

}  // namespace conespec
