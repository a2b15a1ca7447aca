#ifndef WAVECAL_FOURIER_HPP
#define WAVECAL_FOURIER_HPP

#include <array>

#include "wavecal/field.hpp"
#include "wavecal/norms.hpp"

namespace wavecal {

/// Space-time frequency (xi_t, xi_x); spatial components beyond n unused.
struct Freq {
  double t = 0.0;
  std::array<double, kMaxDim> x{};

  double norm(int n) const {
    double s = t * t;
    for (int a = 0; a < n; ++a) s += x[a] * x[a];
    return std::sqrt(s);
  }
  Freq negated(int n) const {
    Freq f;
    f.t = -t;
    for (int a = 0; a < n; ++a) f.x[a] = -x[a];
    return f;
  }
  /// Residual of the hyperplane condition xi . (1, -omega) = 0.
  double plane_residual(const Grid& g, const Direction& omega) const {
    double s = t;
    for (int a = 0; a < g.n; ++a) s -= x[a] * omega[a];
    return s;
  }
};

/// Brute-force Fourier transform of q extended by zero outside Q:
///   Fq(xi) = (2*pi)^(-(n+1)/2) * int_Q q(t,x) exp(-i (t,x).xi) dx dt
/// by trapezoid quadrature. Ground truth for every reconstruction test.
inline cplx fourier_oracle(const PotentialField& pf, const Freq& xi) {
  const Grid& g = pf.grid();
  if (std::abs(xi.t) > kPi / g.dt * (1.0 + 1e-12))
    throw Error("fourier_oracle: frequency out of band (time axis)");
  for (int a = 0; a < g.n; ++a)
    if (std::abs(xi.x[a]) > kPi / g.dx * (1.0 + 1e-12))
      throw Error("fourier_oracle: frequency out of band (spatial axis)");
  if (!pf.q.finite()) throw Error("fourier_oracle: non-finite potential");

  cplx s(0, 0);
  // phase factorizes over axes; precompute per-axis tables
  std::vector<cplx> pt(g.nt);
  for (int k = 0; k < g.nt; ++k) {
    double a = -xi.t * g.time(k);
    pt[k] = cplx(std::cos(a), std::sin(a)) * g.trap_weight_t(k);
  }
  std::vector<std::vector<cplx>> px(g.n, std::vector<cplx>(g.nx));
  for (int ax = 0; ax < g.n; ++ax)
    for (int i = 0; i < g.nx; ++i) {
      double a = -xi.x[ax] * g.coord(i);
      double w = (i == 0 || i == g.nx - 1) ? 0.5 : 1.0;
      px[ax][i] = cplx(std::cos(a), std::sin(a)) * w;
    }
  for (int k = 0; k < g.nt; ++k) {
    cplx st(0, 0);
    for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
      auto ix = g.sunflatten(sid);
      cplx ph = px[0][ix[0]];
      for (int ax = 1; ax < g.n; ++ax) ph *= px[ax][ix[ax]];
      st += pf.q.at(k, sid) * ph;
    }
    s += st * pt[k];
  }
  s *= g.cell_volume() * g.dt;
  return s * std::pow(2.0 * kPi, -0.5 * (g.n + 1));
}

}  // namespace wavecal

#endif
