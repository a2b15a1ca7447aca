#ifndef WAVECAL_SAMPLING_HPP
#define WAVECAL_SAMPLING_HPP

#include <map>
#include <set>
#include <tuple>
#include <vector>

#include "wavecal/fourier.hpp"

namespace wavecal {

struct PlanEntry {
  int omega_index = 0;
  Direction omega{};
  Freq xi;
};

struct SamplingPlan {
  std::vector<Direction> omegas;
  std::vector<PlanEntry> entries;
  double xi_max = 0.0;
  double coverage = 0.0;
  std::int64_t cone_bins = 0;
  std::int64_t cone_bins_hit = 0;
};

namespace plandetail {

inline std::array<double, 2> dual_steps(const Grid& g) {
  // bins of the 2x padded box used by the inversion
  double st = 2.0 * kPi / (2.0 * g.nt * g.dt);
  double sx = 2.0 * kPi / (2.0 * g.nx * g.dx);
  return {st, sx};
}

inline std::tuple<long, long, long> bin_of(const Grid& g, const Freq& xi) {
  auto steps = dual_steps(g);
  return {std::lround(xi.t / steps[0]), std::lround(xi.x[0] / steps[1]),
          std::lround(xi.x[1] / steps[1])};
}

}  // namespace plandetail

/// Directions on the circle (optionally restricted to an arc) and, per
/// direction, an in-plane lattice of frequencies on the hyperplane
/// xi.(1,-omega) = 0 up to |xi| <= xi_max. Exact duplicates shared between
/// hyperplanes are kept once. Coverage reports the fraction of padded-box
/// bins inside the cone |xi_t| <= |xi_x| (and the band) hit by the plan or
/// its conjugate mirror.
inline SamplingPlan sampling_plan(const Grid& g, int omega_count, double xi_max,
                                  double arc_center = 0.0, double arc_halfwidth = kPi,
                                  double oversample = 2.0, bool hermitian_prune = true) {
  if (g.n != 2) throw Error("sampling_plan: direction sweep implemented for n = 2");
  if (xi_max > kPi / g.dt || xi_max > kPi / g.dx)
    throw Error("sampling_plan: band exceeds Nyquist");
  if (omega_count < 1) throw Error("sampling_plan: need at least one direction");

  SamplingPlan plan;
  plan.xi_max = xi_max;
  auto steps = plandetail::dual_steps(g);
  const double sa = steps[0] / oversample;  // step along the (1, omega) direction
  const double sb = steps[1] / oversample;  // step along (0, omega_perp)

  std::set<std::tuple<long long, long long, long long>> seen;
  auto key_of = [](const Freq& xi) {
    auto q = [](double v) { return static_cast<long long>(std::llround(v * 1e9)); };
    return std::make_tuple(q(xi.t), q(xi.x[0]), q(xi.x[1]));
  };

  for (int i = 0; i < omega_count; ++i) {
    double theta;
    if (arc_halfwidth >= kPi) {
      theta = 2.0 * kPi * i / omega_count;
    } else {
      theta = arc_center - arc_halfwidth +
              (2.0 * arc_halfwidth) * (i + 0.5) / omega_count;
    }
    Direction omega = angle_direction(theta);
    plan.omegas.push_back(omega);
    int amax = static_cast<int>(std::floor(xi_max / (sa * std::sqrt(2.0))));
    int bmax = static_cast<int>(std::floor(xi_max / sb));
    for (int ai = -amax; ai <= amax; ++ai) {
      for (int bi = -bmax; bi <= bmax; ++bi) {
        double alpha = ai * sa, beta = bi * sb;
        Freq xi;
        xi.t = alpha;
        xi.x[0] = alpha * omega[0] - beta * omega[1];
        xi.x[1] = alpha * omega[1] + beta * omega[0];
        if (xi.norm(g.n) > xi_max) continue;
        if (hermitian_prune) {
          // a real target makes -xi redundant: the inversion completes the
          // lattice by conjugation
          bool neg = xi.t < -1e-12 ||
                     (std::abs(xi.t) <= 1e-12 &&
                      (xi.x[0] < -1e-12 ||
                       (std::abs(xi.x[0]) <= 1e-12 && xi.x[1] < -1e-12)));
          if (neg) continue;
        }
        if (!seen.insert(key_of(xi)).second) continue;
        PlanEntry e;
        e.omega_index = i;
        e.omega = omega;
        e.xi = xi;
        plan.entries.push_back(e);
      }
    }
  }

  // coverage of the cone lattice inside the band
  std::set<std::tuple<long, long, long>> hit;
  for (const PlanEntry& e : plan.entries) {
    auto b = plandetail::bin_of(g, e.xi);
    hit.insert(b);
    hit.insert({-std::get<0>(b), -std::get<1>(b), -std::get<2>(b)});
  }
  const long kt_max = static_cast<long>(std::floor(xi_max / steps[0]));
  const long kx_max = static_cast<long>(std::floor(xi_max / steps[1]));
  for (long kt = -kt_max; kt <= kt_max; ++kt)
    for (long k1 = -kx_max; k1 <= kx_max; ++k1)
      for (long k2 = -kx_max; k2 <= kx_max; ++k2) {
        double zt = kt * steps[0];
        double zx = std::hypot(k1 * steps[1], k2 * steps[1]);
        if (std::abs(zt) > zx) continue;  // outside the cone
        if (std::sqrt(zt * zt + zx * zx) > xi_max) continue;
        ++plan.cone_bins;
        if (hit.count({kt, k1, k2})) ++plan.cone_bins_hit;
      }
  plan.coverage =
      plan.cone_bins > 0 ? double(plan.cone_bins_hit) / double(plan.cone_bins) : 0.0;
  return plan;
}

}  // namespace wavecal

#endif
