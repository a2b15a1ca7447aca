#ifndef WAVECAL_AMPLITUDES_HPP
#define WAVECAL_AMPLITUDES_HPP

#include <functional>

#include "wavecal/fourier.hpp"
#include "wavecal/norms.hpp"

namespace wavecal {

/// C^2 bump built from quintic smoothsteps: identically 1 on [0, plateau],
/// supported in (-eps, plateau + eps), exactly 0 outside. Exact plateau and
/// support endpoints matter: downstream support-disjointness is grid-exact.
struct Cutoff {
  double eps = 1.0;
  double plateau = 1.0;  // chi == 1 on [0, plateau]

  double operator()(double s) const {
    if (s <= -eps || s >= plateau + eps) return 0.0;
    if (s < 0.0) return smoothstep5((s + eps) / eps);
    if (s <= plateau) return 1.0;
    return smoothstep5((plateau + eps - s) / eps);
  }
  double support_lo() const { return -eps; }
  double support_hi() const { return plateau + eps; }
};

struct CutoffBuild {
  Cutoff chi;
  std::array<double, kMaxDim> x0{};
  double eps = 0.0;
};

/// Cutoff construction for the both-endpoint-restricted scenario:
/// eps = (T - Diam)/4, plateau [0, T + Diam], and x0 the boundary grid node
/// minimizing x.omega.
inline CutoffBuild cutoff_builder(const Grid& g, const Direction& omega) {
  double diam = g.diameter();
  if (!(g.T > diam)) throw Error("cutoff scenario requires T > Diam(Omega)");
  CutoffBuild out;
  out.eps = (g.T - diam) / 4.0;
  out.chi.eps = out.eps;
  out.chi.plateau = g.T + diam;
  double best = kInf;
  for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
    auto ix = g.sunflatten(sid);
    if (!g.on_spatial_boundary(ix)) continue;
    double v = 0.0;
    for (int a = 0; a < g.n; ++a) v += g.coord(ix[a]) * omega[a];
    if (v < best) {
      best = v;
      for (int a = 0; a < g.n; ++a) out.x0[a] = g.coord(ix[a]);
    }
  }
  return out;
}

enum class AmpProfile { Constant, Plane, CutoffOnly, CutoffPlane };

/// One transport-equation amplitude. The time argument used by both the
/// cutoff envelope and the plane modulation is s(t) = alpha*t + beta with
/// alpha = -(-1)^k, matching the characteristic family of its carrier phase.
struct Amplitude {
  AmpProfile profile = AmpProfile::Constant;
  int kind = 1;  // k in {1,2}; transport is  da/dt + (-1)^k omega.grad a = 0
  cplx coeff = cplx(1, 0);
  Freq xi;  // plane modulation frequency (must satisfy xi.(1,-omega) = 0)
  Cutoff chi;
  std::array<double, kMaxDim> x0{};
  Direction omega{};
  double beta = 0.0;      // time offset: s(t) = alpha*t + beta
  double time_warp = 1.0; // s(t) = alpha*warp*t + beta (grid-matched probes)

  int alpha() const { return kind == 1 ? +1 : -1; }

  cplx eval(const Grid& g, double t, const std::array<double, kMaxDim>& x) const {
    double s = alpha() * time_warp * t + beta;
    cplx v = coeff;
    if (profile == AmpProfile::CutoffOnly || profile == AmpProfile::CutoffPlane) {
      double rho = s;
      for (int a = 0; a < g.n; ++a) rho += (x[a] - x0[a]) * omega[a];
      v *= chi(rho);
    }
    if (profile == AmpProfile::Plane || profile == AmpProfile::CutoffPlane) {
      double ph = -(s * xi.t);
      for (int a = 0; a < g.n; ++a) ph -= x[a] * xi.x[a];
      v *= cplx(std::cos(ph), std::sin(ph));
    }
    return v;
  }
};

/// Sampled amplitude plus the transport metadata the invariants check.
struct AmplitudeField {
  ComplexField a;
  int kind = 1;
  Direction omega{};
  AmpProfile profile = AmpProfile::Constant;
};

/// Samples a closed-form transport-equation solution on the grid.
/// Profiles: constant c; plane (needs xi.(1,-omega)=0); cutoff variants of
/// the endpoint-restricted construction.
inline AmplitudeField transport_amplitude(const Grid& g, const Amplitude& spec) {
  if (spec.profile == AmpProfile::Plane || spec.profile == AmpProfile::CutoffPlane) {
    if (std::abs(spec.xi.plane_residual(g, spec.omega)) > 1e-12)
      throw Error("transport_amplitude: phase-compatibility violated, xi.(1,-omega) != 0");
  }
  AmplitudeField out;
  out.kind = spec.kind;
  out.omega = spec.omega;
  out.profile = spec.profile;
  out.a = ComplexField(g);
  std::array<double, kMaxDim> x{};
  for (int k = 0; k < g.nt; ++k) {
    double t = g.time(k);
    for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
      auto ix = g.sunflatten(sid);
      for (int a = 0; a < g.n; ++a) x[a] = g.coord(ix[a]);
      out.a.at(k, sid) = spec.eval(g, t, x);
    }
  }
  return out;
}

/// Centered-difference transport residual  da/dt + (-1)^k omega.grad a,
/// interior nodes only; the invariant bound is O(dx^2) times the profile's
/// third-derivative scale.
inline double transport_residual_l2(const AmplitudeField& af) {
  const Grid& g = af.a.grid;
  double s = 0.0;
  const double sgn = af.kind == 1 ? -1.0 : 1.0;  // (-1)^k
  for (int k = 1; k < g.nt - 1; ++k)
    for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
      auto ix = g.sunflatten(sid);
      if (g.on_spatial_boundary(ix)) continue;
      cplx dt = (af.a.at(k + 1, sid) - af.a.at(k - 1, sid)) / (2.0 * g.dt);
      cplx adv(0, 0);
      std::int64_t stride = 1;
      for (int a = g.n - 1; a >= 0; --a) {
        adv += af.omega[a] * (af.a.at(k, sid + stride) - af.a.at(k, sid - stride)) /
               (2.0 * g.dx);
        stride *= g.nx;
      }
      s += std::norm(dt + sgn * adv);
    }
  return std::sqrt(s * g.cell_volume() * g.dt);
}

}  // namespace wavecal

#endif
