#ifndef WAVECAL_FIELD_HPP
#define WAVECAL_FIELD_HPP

#include <algorithm>
#include <vector>

#include "wavecal/common.hpp"
#include "wavecal/grid.hpp"

namespace wavecal {

/// Sampled values on one time slice (nx^n nodes, row-major).
template <class T>
struct Slice {
  Grid grid;
  std::vector<T> v;

  Slice() = default;
  explicit Slice(const Grid& g, T fill = T{}) : grid(g), v(g.spatial_points(), fill) {}

  T& at(std::int64_t id) { return v[id]; }
  const T& at(std::int64_t id) const { return v[id]; }
  T& at(const std::array<int, kMaxDim>& ix) { return v[grid.sindex(ix)]; }
  const T& at(const std::array<int, kMaxDim>& ix) const { return v[grid.sindex(ix)]; }

  bool finite() const { return all_finite(v); }
};

/// Sampled values on the full (t,x) grid; immutable by convention once an
/// operation returns it. Carrier for solutions, potentials, amplitudes and
/// remainders alike.
template <class T>
struct Field {
  Grid grid;
  std::vector<T> v;

  Field() = default;
  explicit Field(const Grid& g, T fill = T{}) : grid(g), v(g.total_points(), fill) {}

  std::int64_t index(int k, std::int64_t sid) const { return k * grid.spatial_points() + sid; }

  T& at(int k, std::int64_t sid) { return v[index(k, sid)]; }
  const T& at(int k, std::int64_t sid) const { return v[index(k, sid)]; }
  T& at(int k, const std::array<int, kMaxDim>& ix) { return v[index(k, grid.sindex(ix))]; }
  const T& at(int k, const std::array<int, kMaxDim>& ix) const {
    return v[index(k, grid.sindex(ix))];
  }

  Slice<T> slice(int k) const {
    Slice<T> s(grid);
    std::copy_n(v.begin() + k * grid.spatial_points(), grid.spatial_points(), s.v.begin());
    return s;
  }
  void set_slice(int k, const Slice<T>& s) {
    std::copy(s.v.begin(), s.v.end(), v.begin() + k * grid.spatial_points());
  }

  bool finite() const { return all_finite(v); }
};

using RealField = Field<double>;
using ComplexField = Field<cplx>;
using RealSlice = Slice<double>;
using ComplexSlice = Slice<cplx>;

template <class T>
Field<T>& operator+=(Field<T>& a, const Field<T>& b) {
  for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] += b.v[i];
  return a;
}
template <class T>
Field<T>& operator-=(Field<T>& a, const Field<T>& b) {
  for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] -= b.v[i];
  return a;
}
template <class T, class S>
Field<T>& operator*=(Field<T>& a, S s) {
  for (auto& x : a.v) x *= s;
  return a;
}

inline ComplexField to_complex(const RealField& f) {
  ComplexField c(f.grid);
  for (std::size_t i = 0; i < f.v.size(); ++i) c.v[i] = cplx(f.v[i], 0.0);
  return c;
}

inline RealField real_part(const ComplexField& f, double* max_imag = nullptr) {
  RealField r(f.grid);
  double mi = 0.0;
  for (std::size_t i = 0; i < f.v.size(); ++i) {
    r.v[i] = f.v[i].real();
    mi = std::max(mi, std::abs(f.v[i].imag()));
  }
  if (max_imag) *max_imag = mi;
  return r;
}

/// Integrability exponents and samples of the potential q on Q. Extension by
/// zero outside Q is implicit everywhere q enters a Fourier integral.
struct PotentialField {
  RealField q;
  double p1 = 2.0;
  double p2 = 2.0;

  PotentialField() = default;
  PotentialField(RealField f, double p1_, double p2_) : q(std::move(f)), p1(p1_), p2(p2_) {
    if (p1 < 1.0 || p2 < 1.0) throw Error("potential: exponents must be >= 1");
  }

  const Grid& grid() const { return q.grid; }
};

/// Exponential weight parameters for the conjugated operator and the
/// growing/decaying probe families.
struct WeightParams {
  Direction omega{};
  double lambda = 8.0;
  int sign = +1;  // sign of the weight exp(sign * lambda * (t + x.omega))

  static WeightParams make(const Grid& g, const Direction& omega, double lambda, int sign) {
    WeightParams w;
    w.omega = omega;
    w.lambda = lambda;
    w.sign = sign >= 0 ? +1 : -1;
    if (std::abs(dir_norm(g, omega) - 1.0) > 1e-12)
      throw Error("weight: omega must be a unit vector");
    if (!(lambda > 1.0)) throw Error("weight: lambda must exceed 1");
    return w;
  }
};

}  // namespace wavecal

#endif
