#ifndef WAVECAL_POTENTIALS_HPP
#define WAVECAL_POTENTIALS_HPP

#include <functional>
#include <string>

#include "wavecal/amplitudes.hpp"
#include "wavecal/field.hpp"

namespace wavecal {

/// C^2 compact bump profile on [-1, 1], peak 1 at 0.
inline double bump_profile(double s) {
  double a = 1.0 - s * s;
  return a > 0.0 ? a * a * a : 0.0;
}

struct BumpSpec {
  double amplitude = 1.0;
  std::array<double, kMaxDim> center{};  // spatial center
  std::array<double, kMaxDim> width{};   // spatial half-widths
  double t_center = 0.0;
  double t_width = 0.0;  // <= 0 means constant in time
};

inline RealField sample_bump(const Grid& g, const BumpSpec& b) {
  RealField f(g);
  for (int k = 0; k < g.nt; ++k) {
    double t = g.time(k);
    double wt = b.t_width > 0 ? bump_profile((t - b.t_center) / b.t_width) : 1.0;
    if (wt == 0.0) continue;
    for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
      auto ix = g.sunflatten(sid);
      double v = b.amplitude * wt;
      for (int a = 0; a < g.n; ++a)
        v *= bump_profile((g.coord(ix[a]) - b.center[a]) / b.width[a]);
      f.at(k, sid) = v;
    }
  }
  return f;
}

inline BumpSpec centered_bump(const Grid& g, double amplitude, double rel_width,
                              double t_rel_width = -1.0) {
  BumpSpec b;
  b.amplitude = amplitude;
  for (int a = 0; a < g.n; ++a) {
    b.center[a] = 0.5 * g.L;
    b.width[a] = rel_width * g.L;
  }
  if (t_rel_width > 0) {
    b.t_center = 0.5 * g.T;
    b.t_width = t_rel_width * g.T;
  }
  return b;
}

/// Spatial bump carried by a wide plateau window in time: smooth, compactly
/// supported inside Q, slowly varying in t, so its spectrum concentrates
/// inside the cone |xi_t| <= |xi_x|. The default unknown for reconstruction
/// studies. `ramp_rel` is the fraction of T each temporal ramp occupies.
inline PotentialField cone_bump_potential(const Grid& g, double amplitude, double rel_width,
                                          double ramp_rel = 0.3) {
  RealField f(g);
  const double margin = 0.02 * g.T;
  Cutoff win;
  win.eps = ramp_rel * g.T;
  win.plateau = g.T - 2.0 * margin - 2.0 * win.eps;
  if (win.plateau <= 0) throw Error("cone bump: ramps exceed the window");
  const double shift = margin + win.eps;  // support is [margin, T - margin]
  for (int k = 0; k < g.nt; ++k) {
    double wt = win(g.time(k) - shift);
    if (wt == 0.0) continue;
    for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
      auto ix = g.sunflatten(sid);
      double v = amplitude * wt;
      for (int a = 0; a < g.n; ++a)
        v *= bump_profile((g.coord(ix[a]) - 0.5 * g.L) / (rel_width * g.L));
      f.at(k, sid) = v;
    }
  }
  return PotentialField(std::move(f), kInf, kInf);
}

/// t^(-1/4) * spatial bump, the sample at t = 0 regularized to half a step;
/// integrable in the declared mixed norm with p1 < 4.
inline PotentialField time_singular_potential(const Grid& g, double amplitude,
                                              double rel_width, double p1 = 2.5,
                                              double p2 = 4.0) {
  RealField f = sample_bump(g, centered_bump(g, amplitude, rel_width));
  for (int k = 0; k < g.nt; ++k) {
    double t = std::max(g.time(k), 0.5 * g.dt);
    double s = std::pow(t, -0.25);
    for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) f.at(k, sid) *= s;
  }
  return PotentialField(std::move(f), p1, p2);
}

/// |x - xc|^(-1/2) on a disk, switched off for t >= T/2. The center sits a
/// third of a cell off the lattice so no sample can hit the singularity.
inline PotentialField space_singular_potential(const Grid& g, double amplitude,
                                               double radius_rel = 0.3, double p2 = 3.0) {
  RealField f(g);
  std::array<double, kMaxDim> xc{};
  for (int a = 0; a < g.n; ++a) xc[a] = 0.5 * g.L + g.dx / 3.0;
  double radius = radius_rel * g.L;
  for (int k = 0; k < g.nt; ++k) {
    if (g.time(k) >= 0.5 * g.T) break;
    for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
      auto ix = g.sunflatten(sid);
      double r2 = 0.0;
      for (int a = 0; a < g.n; ++a) {
        double d = g.coord(ix[a]) - xc[a];
        r2 += d * d;
      }
      double r = std::sqrt(r2);
      if (r < radius) f.at(k, sid) = amplitude * std::pow(r, -0.5);
    }
  }
  return PotentialField(std::move(f), kInf, p2);
}

/// Cone-dominated reconstruction target: a wide smooth envelope modulated in
/// one spatial axis so the spectrum sits at moderate |xi_x| with a small
/// spatial mean (the slice sweep cannot see the purely temporal content of
/// the spatial-mean column), carried by the plateau time window.
inline PotentialField cone_probe_potential(const Grid& g, double amplitude,
                                           double rel_width = 0.45, double k0 = 4.2,
                                           double ramp_rel = 0.28) {
  RealField f(g);
  const double margin = 0.02 * g.T;
  Cutoff win;
  win.eps = ramp_rel * g.T;
  win.plateau = g.T - 2.0 * margin - 2.0 * win.eps;
  if (win.plateau <= 0) throw Error("cone probe: ramps exceed the window");
  const double shift = margin + win.eps;
  for (int k = 0; k < g.nt; ++k) {
    double wt = win(g.time(k) - shift);
    if (wt == 0.0) continue;
    for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
      auto ix = g.sunflatten(sid);
      double v = amplitude * wt;
      for (int a = 0; a < g.n; ++a)
        v *= bump_profile((g.coord(ix[a]) - 0.5 * g.L) / (rel_width * g.L));
      v *= std::cos(k0 * (g.coord(ix[0]) - 0.5 * g.L) / g.L * g.L);
      f.at(k, sid) = v;
    }
  }
  return PotentialField(std::move(f), kInf, kInf);
}

inline PotentialField zero_potential(const Grid& g) {
  return PotentialField(RealField(g), kInf, kInf);
}

inline PotentialField constant_potential(const Grid& g, double c) {
  return PotentialField(RealField(g, c), kInf, kInf);
}

inline PotentialField bump_potential(const Grid& g, double amplitude, double rel_width,
                                     double t_rel_width = 0.35, double p1 = kInf,
                                     double p2 = kInf) {
  return PotentialField(sample_bump(g, centered_bump(g, amplitude, rel_width, t_rel_width)),
                        p1, p2);
}

/// Separable Gaussian, for transform cross-checks (effectively compactly
/// supported at the box scale when sigma is small).
inline PotentialField gaussian_potential(const Grid& g, double amplitude, double sigma_x,
                                         double sigma_t) {
  RealField f(g);
  for (int k = 0; k < g.nt; ++k) {
    double t = g.time(k) - 0.5 * g.T;
    double wt = std::exp(-t * t / (2.0 * sigma_t * sigma_t));
    for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
      auto ix = g.sunflatten(sid);
      double v = amplitude * wt;
      for (int a = 0; a < g.n; ++a) {
        double d = g.coord(ix[a]) - 0.5 * g.L;
        v *= std::exp(-d * d / (2.0 * sigma_x * sigma_x));
      }
      f.at(k, sid) = v;
    }
  }
  return PotentialField(std::move(f), kInf, kInf);
}

}  // namespace wavecal

#endif
