#ifndef WAVECAL_CONJUGATED_HPP
#define WAVECAL_CONJUGATED_HPP

#include <array>

#include "wavecal/field.hpp"
#include "wavecal/norms.hpp"

namespace wavecal {

/// Exponential conjugation rates per axis: the operator below is the exact
/// discrete conjugation  exp(-phi) Box_h exp(+phi)  with
/// phi = sign * (rate_t * t + lambda * omega . x). Written with neighbor
/// ratio weights exp(+-rate*d) so no global exponential is ever formed.
struct ConjugationRates {
  double t = 0.0;                      // sign * rate_t
  std::array<double, kMaxDim> x{};     // sign * lambda * omega_a

  static ConjugationRates from_weight(const Grid& g, const WeightParams& wp,
                                      double rate_t_override = -1.0) {
    ConjugationRates r;
    double rt = rate_t_override > 0 ? rate_t_override : wp.lambda;
    r.t = wp.sign * rt;
    for (int a = 0; a < g.n; ++a) r.x[a] = wp.sign * wp.lambda * wp.omega[a];
    return r;
  }
  static ConjugationRates zero() { return ConjugationRates{}; }
};

namespace detail {

/// One conjugated second-difference along an axis, all rows (centered inside,
/// one-sided 4-point at the ends). `transpose` scatters instead of gathers,
/// giving the exact adjoint in the lattice inner product.
template <class T>
void axis_second_diff(const Grid& g, const T* in, T* out, int axis_nodes,
                      std::int64_t stride, std::int64_t lines, double spacing, double rate,
                      double sign, bool transpose) {
  const double h2 = spacing * spacing;
  const double wp = std::exp(rate * spacing);   // weight of the +1 neighbor
  const double wm = std::exp(-rate * spacing);  // weight of the -1 neighbor
  for (std::int64_t ln = 0; ln < lines; ++ln) {
    // base offset of this line: lines enumerate all indices with axis idx 0
    const std::int64_t base = (ln / stride) * (stride * axis_nodes) + (ln % stride);
    auto idx = [&](int i) { return base + i * stride; };
    if (!transpose) {
      for (int i = 0; i < axis_nodes; ++i) {
        T acc;
        if (i == 0) {
          acc = (2.0 * in[idx(0)] - 5.0 * wp * in[idx(1)] + 4.0 * wp * wp * in[idx(2)] -
                 wp * wp * wp * in[idx(3)]) /
                h2;
        } else if (i == axis_nodes - 1) {
          acc = (2.0 * in[idx(i)] - 5.0 * wm * in[idx(i - 1)] +
                 4.0 * wm * wm * in[idx(i - 2)] - wm * wm * wm * in[idx(i - 3)]) /
                h2;
        } else {
          acc = (wp * in[idx(i + 1)] - 2.0 * in[idx(i)] + wm * in[idx(i - 1)]) / h2;
        }
        out[idx(i)] += sign * acc;
      }
    } else {
      for (int i = 0; i < axis_nodes; ++i) {
        const T x = sign * in[idx(i)] / h2;
        if (i == 0) {
          out[idx(0)] += 2.0 * x;
          out[idx(1)] += -5.0 * wp * x;
          out[idx(2)] += 4.0 * wp * wp * x;
          out[idx(3)] += -wp * wp * wp * x;
        } else if (i == axis_nodes - 1) {
          out[idx(i)] += 2.0 * x;
          out[idx(i - 1)] += -5.0 * wm * x;
          out[idx(i - 2)] += 4.0 * wm * wm * x;
          out[idx(i - 3)] += -wm * wm * wm * x;
        } else {
          out[idx(i + 1)] += wp * x;
          out[idx(i)] += -2.0 * x;
          out[idx(i - 1)] += wm * x;
        }
      }
    }
  }
}

}  // namespace detail

/// Applies the conjugated wave operator
///   P w = exp(-phi) (d_tt - Lap) (exp(phi) w)
/// via ratio-weighted stencils (centered inside, one-sided at edges). With
/// zero rates this is the plain discrete d'Alembertian on all rows.
template <class T>
void conjugated_apply_rates(const Field<T>& w, const ConjugationRates& rates, Field<T>& out) {
  const Grid& g = w.grid;
  std::fill(out.v.begin(), out.v.end(), T{});
  const std::int64_t sp = g.spatial_points();
  // time axis: stride sp, lines = sp
  detail::axis_second_diff(g, w.v.data(), out.v.data(), g.nt, sp, sp, g.dt, rates.t, +1.0,
                           false);
  // spatial axes
  std::int64_t stride = 1;
  for (int a = g.n - 1; a >= 0; --a) {
    const std::int64_t lines = g.total_points() / g.nx;
    detail::axis_second_diff(g, w.v.data(), out.v.data(), g.nx, stride, lines, g.dx,
                             rates.x[a], -1.0, false);
    stride *= g.nx;
  }
}

template <class T>
void conjugated_apply_rates_adjoint(const Field<T>& w, const ConjugationRates& rates,
                                    Field<T>& out) {
  const Grid& g = w.grid;
  std::fill(out.v.begin(), out.v.end(), T{});
  const std::int64_t sp = g.spatial_points();
  detail::axis_second_diff(g, w.v.data(), out.v.data(), g.nt, sp, sp, g.dt, rates.t, +1.0,
                           true);
  std::int64_t stride = 1;
  for (int a = g.n - 1; a >= 0; --a) {
    const std::int64_t lines = g.total_points() / g.nx;
    detail::axis_second_diff(g, w.v.data(), out.v.data(), g.nx, stride, lines, g.dx,
                             rates.x[a], -1.0, true);
    stride *= g.nx;
  }
}

/// Conjugated operator with a single rate lambda on the phase t + x.omega,
/// the form the probe and Carleman studies quote. Equals
/// Box w + sign*2*lambda*(dw/dt - omega.grad w) up to O(lambda^3 dx^2).
inline ComplexField conjugated_apply(const ComplexField& w, const WeightParams& wp) {
  ComplexField out(w.grid);
  conjugated_apply_rates(w, ConjugationRates::from_weight(w.grid, wp), out);
  return out;
}

/// Matched discrete rate for the time direction: the rate r making
/// exp(r t + lambda x.omega) an exact kernel of the conjugated stencil,
///   (2 cosh(r dt) - 2)/dt^2 = sum_a (2 cosh(lambda omega_a dx) - 2)/dx^2.
inline double matched_exponential_rate(const Grid& g, const Direction& omega, double lambda) {
  double sx = 0.0;
  for (int a = 0; a < g.n; ++a)
    sx += (2.0 * std::cosh(lambda * omega[a] * g.dx) - 2.0) / (g.dx * g.dx);
  return std::acosh(1.0 + 0.5 * g.dt * g.dt * sx) / g.dt;
}

/// Matched discrete time frequency for an oscillating carrier with spatial
/// frequency vector X: st(E) = sx(X) makes exp(i(E t + X.x)) an exact kernel
/// of the plain d'Alembert stencil.
inline double matched_oscillating_rate(const Grid& g, const std::array<double, kMaxDim>& X) {
  double sx = 0.0;
  for (int a = 0; a < g.n; ++a)
    sx += (2.0 - 2.0 * std::cos(X[a] * g.dx)) / (g.dx * g.dx);
  double c = 1.0 - 0.5 * g.dt * g.dt * sx;
  if (c < -1.0) c = -1.0;
  return std::acos(c) / g.dt;
}

/// Interior residual of the discrete wave equation (Box_h + q)u = F using the
/// leapfrog's own centered stencils; the norm is over interior rows only.
template <class T>
double dalembert_interior_residual(const Field<T>& u, const RealField& qc, const Field<T>* F) {
  const Grid& g = u.grid;
  const double idt2 = 1.0 / (g.dt * g.dt);
  const double idx2 = 1.0 / (g.dx * g.dx);
  double s = 0.0;
  for (int k = 1; k < g.nt - 1; ++k)
    for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
      auto ix = g.sunflatten(sid);
      if (g.on_spatial_boundary(ix)) continue;
      T box = (u.at(k + 1, sid) - 2.0 * u.at(k, sid) + u.at(k - 1, sid)) * idt2;
      std::int64_t stride = 1;
      for (int a = g.n - 1; a >= 0; --a) {
        box -= (u.at(k, sid + stride) - 2.0 * u.at(k, sid) + u.at(k, sid - stride)) * idx2;
        stride *= g.nx;
      }
      T r = box + qc.at(k, sid) * u.at(k, sid);
      if (F) r -= F->at(k, sid);
      s += abs2(r);
    }
  return std::sqrt(s * g.cell_volume() * g.dt);
}

}  // namespace wavecal

#endif
