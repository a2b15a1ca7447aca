#ifndef WAVECAL_NORMS_HPP
#define WAVECAL_NORMS_HPP

#include <algorithm>

#include "wavecal/field.hpp"

namespace wavecal {

/// Lattice L2 norm (uniform cell weight). This is the norm Parseval sees;
/// quadrature-flavored integrals use the *_trap variants below.
template <class T>
double l2_norm(const Field<T>& f) {
  double s = 0.0;
  for (const T& x : f.v) s += abs2(x);
  return std::sqrt(s * f.grid.cell_volume() * f.grid.dt);
}

template <class T>
double l2_norm(const Slice<T>& f) {
  double s = 0.0;
  for (const T& x : f.v) s += abs2(x);
  return std::sqrt(s * f.grid.cell_volume());
}

template <class T>
double linf_norm(const Field<T>& f) {
  double m = 0.0;
  for (const T& x : f.v) m = std::max(m, std::sqrt(abs2(x)));
  return m;
}

/// Trapezoid integral of a complex-valued sampled function over Q.
template <class T>
T integral_q_trap(const Field<T>& f) {
  const Grid& g = f.grid;
  T s{};
  for (int k = 0; k < g.nt; ++k) {
    double wt = g.trap_weight_t(k);
    for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
      double w = wt * g.trap_weight(g.sunflatten(sid));
      s += f.at(k, sid) * w;
    }
  }
  return s * (g.cell_volume() * g.dt);
}

template <class T>
double l2q_norm_trap(const Field<T>& f) {
  const Grid& g = f.grid;
  double s = 0.0;
  for (int k = 0; k < g.nt; ++k) {
    double wt = g.trap_weight_t(k);
    for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid)
      s += wt * g.trap_weight(g.sunflatten(sid)) * abs2(f.at(k, sid));
  }
  return std::sqrt(s * g.cell_volume() * g.dt);
}

template <class T>
double l2_slice_trap(const Slice<T>& f) {
  const Grid& g = f.grid;
  double s = 0.0;
  for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid)
    s += g.trap_weight(g.sunflatten(sid)) * abs2(f.at(sid));
  return std::sqrt(s * g.cell_volume());
}

namespace detail {

/// Second-order first derivative along a spatial axis; one-sided at walls.
template <class T>
T ddx(const Field<T>& f, int k, std::array<int, kMaxDim> ix, int axis) {
  const Grid& g = f.grid;
  const double h = g.dx;
  int i = ix[axis];
  auto val = [&](int j) {
    auto jx = ix;
    jx[axis] = j;
    return f.at(k, jx);
  };
  if (i == 0) return (val(0) * (-3.0) + val(1) * 4.0 - val(2)) / (2.0 * h);
  if (i == g.nx - 1)
    return (val(i) * 3.0 - val(i - 1) * 4.0 + val(i - 2)) / (2.0 * h);
  return (val(i + 1) - val(i - 1)) / (2.0 * h);
}

template <class T>
T ddt(const Field<T>& f, int k, std::int64_t sid) {
  const Grid& g = f.grid;
  const double h = g.dt;
  if (k == 0)
    return (f.at(0, sid) * (-3.0) + f.at(1, sid) * 4.0 - f.at(2, sid)) / (2.0 * h);
  if (k == g.nt - 1)
    return (f.at(k, sid) * 3.0 - f.at(k - 1, sid) * 4.0 + f.at(k - 2, sid)) / (2.0 * h);
  return (f.at(k + 1, sid) - f.at(k - 1, sid)) / (2.0 * h);
}

}  // namespace detail

/// Discrete field energy at time level k:
///   E(t) = int_Omega |du/dt|^2 + |grad u|^2 dx
/// with centered differences inside and one-sided second-order stencils at
/// the end levels and walls.
template <class T>
double energy(const Field<T>& u, int k) {
  const Grid& g = u.grid;
  if (k < 0 || k >= g.nt) throw Error("energy: time index out of range");
  double s = 0.0;
  for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
    auto ix = g.sunflatten(sid);
    double w = g.trap_weight(ix);
    double e = abs2(detail::ddt(u, k, sid));
    for (int a = 0; a < g.n; ++a) e += abs2(detail::ddx(u, k, ix, a));
    s += w * e;
  }
  if (!std::isfinite(s)) throw Error("energy: non-finite field");
  return s * g.cell_volume();
}

template <class T>
double max_energy_sqrt(const Field<T>& u) {
  double m = 0.0;
  for (int k = 0; k < u.grid.nt; ++k) m = std::max(m, std::sqrt(energy(u, k)));
  return m;
}

/// Spatial H1 norm of one time slice: (L2^2 + |grad|^2)^(1/2), used by the
/// remainder decay tables.
template <class T>
double h1_slice_norm(const Field<T>& u, int k) {
  const Grid& g = u.grid;
  double s = 0.0;
  for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
    auto ix = g.sunflatten(sid);
    double w = g.trap_weight(ix);
    double e = abs2(u.at(k, sid));
    for (int a = 0; a < g.n; ++a) e += abs2(detail::ddx(u, k, ix, a));
    s += w * e;
  }
  return std::sqrt(s * g.cell_volume());
}

template <class T>
double linf_l2_norm(const Field<T>& u) {
  double m = 0.0;
  for (int k = 0; k < u.grid.nt; ++k) m = std::max(m, l2_slice_trap(u.slice(k)));
  return m;
}

template <class T>
double linf_h1_norm(const Field<T>& u) {
  double m = 0.0;
  for (int k = 0; k < u.grid.nt; ++k) m = std::max(m, h1_slice_norm(u, k));
  return m;
}

/// H1(Q) norm over space-time (lattice weights), for the exponential-probe
/// remainder bounds.
template <class T>
double h1q_norm(const Field<T>& u) {
  const Grid& g = u.grid;
  double s = 0.0;
  for (int k = 0; k < g.nt; ++k)
    for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
      auto ix = g.sunflatten(sid);
      double e = abs2(u.at(k, sid)) + abs2(detail::ddt(u, k, sid));
      for (int a = 0; a < g.n; ++a) e += abs2(detail::ddx(u, k, ix, a));
      s += e;
    }
  return std::sqrt(s * g.cell_volume() * g.dt);
}

/// Mixed Lebesgue norm ||q||_{L^p1(0,T; L^p2(Omega))} by trapezoid quadrature;
/// infinite exponents fall back to the discrete max.
inline double mixed_norm(const PotentialField& pf) {
  const Grid& g = pf.grid();
  const RealField& q = pf.q;
  if (!q.finite()) throw Error("mixed_norm: field not integrable");
  std::vector<double> slice_norm(g.nt, 0.0);
  for (int k = 0; k < g.nt; ++k) {
    if (pf.p2 == kInf) {
      double m = 0.0;
      for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid)
        m = std::max(m, std::abs(q.at(k, sid)));
      slice_norm[k] = m;
    } else {
      double s = 0.0;
      for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid)
        s += g.trap_weight(g.sunflatten(sid)) * std::pow(std::abs(q.at(k, sid)), pf.p2);
      slice_norm[k] = std::pow(s * g.cell_volume(), 1.0 / pf.p2);
    }
  }
  if (pf.p1 == kInf) return *std::max_element(slice_norm.begin(), slice_norm.end());
  double s = 0.0;
  for (int k = 0; k < g.nt; ++k)
    s += g.trap_weight_t(k) * std::pow(slice_norm[k], pf.p1);
  double out = std::pow(s * g.dt, 1.0 / pf.p1);
  if (!std::isfinite(out)) throw Error("mixed_norm: field not integrable");
  return out;
}

}  // namespace wavecal

#endif
