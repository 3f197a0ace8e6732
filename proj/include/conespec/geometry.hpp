#pragma once

// Piecewise-conical radial profiles.
//
// A profile is a chain of segments traversed in arclength t. On each segment
// the metric is dt^2 + r(t)^2 h with |dr/dt| = 1; UP segments have r
// increasing with t, DOWN segments decreasing. Consecutive segments meet at
// equal radius with an orientation flip (a reflection seam).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "conespec/error.hpp"

namespace conespec {

enum class Orientation { Up, Down };

enum class SeamKind { RadialMax, RadialMin };

enum class BcKind { RegularTip, Absolute, Aps, DirichletLike };

inline const char* to_string(BcKind k) {
  switch (k) {
    case BcKind::RegularTip: return "REGULAR_TIP";
    case BcKind::Absolute: return "ABSOLUTE";
    case BcKind::Aps: return "APS";
    case BcKind::DirichletLike: return "DIRICHLET_LIKE";
  }
  return "?";
}

struct Segment {
  double r_lo = 0.0;
  double r_hi = 1.0;
  Orientation orientation = Orientation::Up;

  double length() const { return r_hi - r_lo; }
  double start_radius() const { return orientation == Orientation::Up ? r_lo : r_hi; }
  double end_radius() const { return orientation == Orientation::Up ? r_hi : r_lo; }
  bool touches_zero() const { return r_lo == 0.0; }
};

struct Seam {
  double radius = 0.0;
  SeamKind kind = SeamKind::RadialMax;
};

/// Chain endpoint: a cone tip (r = 0) or an exposed boundary sphere.
struct Endpoint {
  BcKind bc = BcKind::RegularTip;

  bool is_tip() const { return bc == BcKind::RegularTip; }
  static Endpoint tip() { return {BcKind::RegularTip}; }
  static Endpoint boundary(BcKind bc) { return {bc}; }
};

struct Profile {
  std::string id;
  std::vector<Segment> segments;
  std::vector<Seam> seams;  // seams[i] joins segments[i] and segments[i+1]
  Endpoint start = Endpoint::tip();
  Endpoint end = Endpoint::tip();

  double length() const {
    double L = 0.0;
    for (const auto& s : segments) L += s.length();
    return L;
  }

  double max_radius() const {
    double R = 0.0;
    for (const auto& s : segments) R = std::max(R, s.r_hi);
    return R;
  }

  double min_positive_radius() const {
    double r = max_radius();
    for (const auto& s : segments) {
      if (s.r_lo > 0.0) r = std::min(r, s.r_lo);
    }
    return r;
  }

  bool closed() const { return start.is_tip() && end.is_tip(); }
};

inline double sphere_volume(int n) {
  // vol(S^n) = 2 pi^{(n+1)/2} / Gamma((n+1)/2)
  return 2.0 * std::pow(std::numbers::pi, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1));
}

/// Riemannian volume of the (n+1)-manifold described by the profile.
inline double profile_volume(const Profile& prof, int n) {
  double v = 0.0;
  for (const auto& s : prof.segments) {
    v += (std::pow(s.r_hi, n + 1) - std::pow(s.r_lo, n + 1)) / (n + 1);
  }
  return sphere_volume(n) * v;
}

inline void validate(const Profile& prof) {
  const auto fail = [&](const std::string& msg) {
    throw Error(ErrorCode::InvalidProfile, "profile '" + prof.id + "': " + msg);
  };
  if (prof.segments.empty()) fail("no segments");
  if (prof.seams.size() + 1 != prof.segments.size()) fail("seam count mismatch");
  for (const auto& s : prof.segments) {
    if (!(s.r_lo >= 0.0 && s.r_hi > s.r_lo)) fail("segment radii must satisfy 0 <= r_lo < r_hi");
  }
  for (std::size_t i = 0; i + 1 < prof.segments.size(); ++i) {
    const auto& a = prof.segments[i];
    const auto& b = prof.segments[i + 1];
    const auto& seam = prof.seams[i];
    if (a.orientation == b.orientation) fail("adjacent segments must flip orientation");
    if (a.end_radius() != b.start_radius()) fail("adjacent segments must meet at equal radius");
    if (seam.radius != a.end_radius()) fail("seam radius does not match segments");
    if (!(seam.radius > 0.0)) fail("seam radii must be positive");
    const SeamKind expect =
        a.orientation == Orientation::Up ? SeamKind::RadialMax : SeamKind::RadialMin;
    if (seam.kind != expect) fail("seam kind inconsistent with orientations");
  }
  const auto& first = prof.segments.front();
  const auto& last = prof.segments.back();
  if (prof.start.is_tip() != (first.start_radius() == 0.0))
    fail("start is a tip iff the first segment starts at r = 0");
  if (prof.end.is_tip() != (last.end_radius() == 0.0))
    fail("end is a tip iff the last segment ends at r = 0");
}

inline Profile scale(const Profile& prof, double c) {
  require(c > 0.0, ErrorCode::Domain, "scale factor must be positive");
  Profile out = prof;
  for (auto& s : out.segments) {
    s.r_lo *= c;
    s.r_hi *= c;
  }
  for (auto& s : out.seams) s.radius *= c;
  return out;
}

/// Same manifold traversed in the opposite direction.
inline Profile reversed(const Profile& prof) {
  Profile out;
  out.id = prof.id;
  for (auto it = prof.segments.rbegin(); it != prof.segments.rend(); ++it) {
    Segment s = *it;
    s.orientation = s.orientation == Orientation::Up ? Orientation::Down : Orientation::Up;
    out.segments.push_back(s);
  }
  out.seams.assign(prof.seams.rbegin(), prof.seams.rend());
  out.start = prof.end;
  out.end = prof.start;
  return out;
}

namespace profiles {

/// Single cone [0, R] with one exposed boundary.
inline Profile cone(double R, BcKind end_bc = BcKind::Absolute) {
  require(R > 0.0, ErrorCode::Domain, "cone radius must be positive");
  require(end_bc != BcKind::RegularTip, ErrorCode::Domain, "cone end must be a boundary");
  Profile p;
  p.id = "cone(" + std::to_string(R) + ")";
  p.segments = {{0.0, R, Orientation::Up}};
  p.start = Endpoint::tip();
  p.end = Endpoint::boundary(end_bc);
  return p;
}

/// Double cone over S^n with equator radius R.
inline Profile spindle(double R) {
  require(R > 0.0, ErrorCode::Domain, "spindle radius must be positive");
  Profile p;
  p.id = "spindle(" + std::to_string(R) + ")";
  p.segments = {{0.0, R, Orientation::Up}, {0.0, R, Orientation::Down}};
  p.seams = {{R, SeamKind::RadialMax}};
  return p;
}

/// Spindle(R2) with the tip ball of radius `cut` removed; boundary at r = cut.
inline Profile truncated_spindle(double R2, double cut,
                                 BcKind bc = BcKind::Absolute) {
  require(cut > 0.0 && R2 > cut, ErrorCode::Domain,
          "truncated spindle needs 0 < cut < R2");
  require(bc != BcKind::RegularTip, ErrorCode::Domain, "cut must be a boundary");
  Profile p;
  p.id = "truncated_spindle(" + std::to_string(R2) + "," + std::to_string(cut) + ")";
  p.segments = {{cut, R2, Orientation::Up}, {0.0, R2, Orientation::Down}};
  p.seams = {{R2, SeamKind::RadialMax}};
  p.start = Endpoint::boundary(bc);
  p.end = Endpoint::tip();
  return p;
}

inline Profile annulus(double a, double b, BcKind bc_a = BcKind::Absolute,
                       BcKind bc_b = BcKind::Absolute) {
  require(a > 0.0 && b > a, ErrorCode::Domain, "annulus needs 0 < a < b");
  Profile p;
  p.id = "annulus(" + std::to_string(a) + "," + std::to_string(b) + ")";
  p.segments = {{a, b, Orientation::Up}};
  p.start = Endpoint::boundary(bc_a);
  p.end = Endpoint::boundary(bc_b);
  return p;
}

}  // namespace profiles

/// Length of the exact conical collar next to the first boundary endpoint.
inline double collar_length(const Profile& prof) {
  require(!prof.start.is_tip(), ErrorCode::InvalidProfile, "profile has no start boundary");
  return prof.segments.front().length();
}

enum class ModelKind { Cone, Spindle, TruncatedSpindle, Annulus };

struct ModelSpec {
  ModelKind kind = ModelKind::Spindle;
  double radius = 1.0;  // cone/spindle radius, R2 for truncated spindles, outer annulus radius
  double cut = 1.0;     // truncation radius or inner annulus radius
  BcKind boundary = BcKind::Absolute;
};

inline Profile build_profile(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::Cone: return profiles::cone(spec.radius, spec.boundary);
    case ModelKind::Spindle: return profiles::spindle(spec.radius);
    case ModelKind::TruncatedSpindle:
      return profiles::truncated_spindle(spec.radius, spec.cut, spec.boundary);
    case ModelKind::Annulus:
      return profiles::annulus(spec.cut, spec.radius, spec.boundary, spec.boundary);
  }
  throw Error(ErrorCode::Domain, "unknown model kind");
}

/// M_eps = (M1 - B(p0, eps)) glued to eps * M2(1) along the sphere of radius
/// eps. p0 is the start tip of m1; m2 must start with a boundary at r = 1.
/// The result starts at the far tip of eps*M2 and has a RADIAL_MIN seam at eps.
inline Profile connected_sum_profile(const Profile& m1, const Profile& m2, double eps) {
  validate(m1);
  validate(m2);
  require(m1.start.is_tip() && m1.segments.front().orientation == Orientation::Up,
          ErrorCode::InvalidProfile, "m1 must start with a tip on an UP segment");
  require(!m2.start.is_tip() && m2.segments.front().orientation == Orientation::Up &&
              m2.segments.front().r_lo == 1.0,
          ErrorCode::InvalidProfile, "m2 must start with a boundary at r = 1 on an UP segment");
  const double collar = m1.segments.front().r_hi;
  require(eps > 0.0 && eps < 0.5 * std::min(1.0, collar), ErrorCode::Domain,
          "eps must satisfy 0 < eps < min(1, R1)/2");

  Profile out = reversed(scale(m2, eps));
  out.id = "connected_sum(" + m1.id + "," + m2.id + ",eps=" + std::to_string(eps) + ")";
  out.end = m1.end;
  out.seams.push_back({eps, SeamKind::RadialMin});
  Segment first = m1.segments.front();
  first.r_lo = eps;
  out.segments.push_back(first);
  for (std::size_t i = 1; i < m1.segments.size(); ++i) {
    out.seams.push_back(m1.seams[i - 1]);
    out.segments.push_back(m1.segments[i]);
  }
  validate(out);
  return out;
}

/// Index of the gluing seam (RADIAL_MIN at radius eps) of a connected sum.
inline std::size_t gluing_seam(const Profile& meps, double eps) {
  for (std::size_t i = 0; i < meps.seams.size(); ++i) {
    if (meps.seams[i].kind == SeamKind::RadialMin &&
        std::abs(meps.seams[i].radius - eps) <= 1e-14 * std::max(1.0, eps))
      return i;
  }
  throw Error(ErrorCode::InvalidProfile, "no RADIAL_MIN seam at the gluing radius");
}

struct CoverProfiles {
  Profile u1;   // M1(eps)
  Profile u2;   // eps * (M2(1) u C_{1,2})
  Profile u12;  // eps * C_{1,2}
};

/// McGowan cover of a connected sum; exposed cuts carry ABSOLUTE conditions.
inline CoverProfiles cover_profiles(const Profile& meps, double eps) {
  validate(meps);
  const std::size_t g = gluing_seam(meps, eps);
  const Segment& m1_cone = meps.segments[g + 1];
  require(m1_cone.r_hi >= 2.0 * eps, ErrorCode::InvalidProfile,
          "M1 collar must reach radius 2 eps");

  CoverProfiles c;
  c.u1.id = "U1";
  c.u1.start = Endpoint::boundary(BcKind::Absolute);
  c.u1.end = meps.end;
  for (std::size_t i = g + 1; i < meps.segments.size(); ++i) {
    c.u1.segments.push_back(meps.segments[i]);
    if (i + 1 < meps.segments.size()) c.u1.seams.push_back(meps.seams[i]);
  }

  c.u2.id = "U2";
  c.u2.start = meps.start;
  c.u2.end = Endpoint::boundary(BcKind::Absolute);
  for (std::size_t i = 0; i <= g; ++i) {
    c.u2.segments.push_back(meps.segments[i]);
    c.u2.seams.push_back(meps.seams[i]);
  }
  c.u2.segments.push_back({eps, 2.0 * eps, Orientation::Up});

  c.u12 = profiles::annulus(eps, 2.0 * eps);
  c.u12.id = "U12";
  validate(c.u1);
  validate(c.u2);
  validate(c.u12);
  return c;
}

/// Dodziuk comparison: e^{-eta} g <= g' <= e^{eta} g moves lambda_k^p by at
/// most a factor e^{+-(n+2p) eta}.
inline std::pair<double, double> dodziuk_interval(double lambda, double eta, int n, int p) {
  require(lambda >= 0.0 && eta >= 0.0, ErrorCode::Domain,
          "dodziuk_interval needs lambda >= 0 and eta >= 0");
  const double f = std::exp(double(n + 2 * p) * eta);
  return {lambda / f, lambda * f};
}

}  // namespace conespec
