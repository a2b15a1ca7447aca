#ifndef WAVECAL_GRID_HPP
#define WAVECAL_GRID_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "wavecal/common.hpp"

namespace wavecal {

constexpr int kMaxDim = 3;

/// Uniform discretization of the space-time cylinder (0,T) x [0,L]^n.
/// Spatial axes carry nx nodes including both ends (dx = L/(nx-1)); time
/// carries nt levels (dt = T/(nt-1)). The leapfrog stencil needs
/// dt <= dx/sqrt(n), enforced at construction.
struct Grid {
  int n = 2;
  double L = 1.0;
  double T = 1.0;
  int nx = 0;
  int nt = 0;
  double dx = 0.0;
  double dt = 0.0;

  static Grid make(int n, double L, double T, int nx, int nt) {
    if (n < 1 || n > kMaxDim) throw Error("grid: spatial dimension must be 1..3");
    if (!(L > 0.0) || !(T > 0.0)) throw Error("grid: L and T must be positive");
    if (nx < 8 || nt < 8) throw Error("grid: nx and nt must be at least 8");
    Grid g;
    g.n = n;
    g.L = L;
    g.T = T;
    g.nx = nx;
    g.nt = nt;
    g.dx = L / (nx - 1);
    g.dt = T / (nt - 1);
    if (g.dt > g.dx / std::sqrt(double(n)) * (1.0 + 1e-12))
      throw Error("grid: CFL violated, dt=" + std::to_string(g.dt) + " exceeds dx/sqrt(n)=" +
                  std::to_string(g.dx / std::sqrt(double(n))));
    return g;
  }

  /// Picks the smallest 3-smooth nt satisfying the CFL bound (with a small
  /// safety slack) for the requested nx.
  static Grid with_cfl(int n, double L, double T, int nx, double cfl_fraction = 1.0) {
    double dx = L / (nx - 1);
    double dt_max = cfl_fraction * dx / std::sqrt(double(n));
    int nt = next_smooth23(static_cast<int>(std::ceil(T / dt_max)) + 1);
    return make(n, L, T, nx, nt);
  }

  double diameter() const { return L * std::sqrt(double(n)); }
  double cfl() const { return dt / dx; }

  double time(int k) const { return k * dt; }
  double coord(int i) const { return i * dx; }

  std::int64_t spatial_points() const {
    std::int64_t p = 1;
    for (int a = 0; a < n; ++a) p *= nx;
    return p;
  }
  std::int64_t total_points() const { return spatial_points() * nt; }

  /// Row-major spatial flattening, last axis fastest.
  std::int64_t sindex(const std::array<int, kMaxDim>& ix) const {
    std::int64_t id = 0;
    for (int a = 0; a < n; ++a) id = id * nx + ix[a];
    return id;
  }
  std::array<int, kMaxDim> sunflatten(std::int64_t id) const {
    std::array<int, kMaxDim> ix{};
    for (int a = n - 1; a >= 0; --a) {
      ix[a] = static_cast<int>(id % nx);
      id /= nx;
    }
    return ix;
  }

  bool on_spatial_boundary(const std::array<int, kMaxDim>& ix) const {
    for (int a = 0; a < n; ++a)
      if (ix[a] == 0 || ix[a] == nx - 1) return true;
    return false;
  }

  /// Trapezoid weight for one spatial node (product of per-axis 1 or 1/2).
  double trap_weight(const std::array<int, kMaxDim>& ix) const {
    double w = 1.0;
    for (int a = 0; a < n; ++a)
      if (ix[a] == 0 || ix[a] == nx - 1) w *= 0.5;
    return w;
  }
  double trap_weight_t(int k) const { return (k == 0 || k == nt - 1) ? 0.5 : 1.0; }

  double cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < n; ++a) v *= dx;
    return v;
  }

  bool same_shape(const Grid& o) const {
    return n == o.n && nx == o.nx && nt == o.nt && L == o.L && T == o.T;
  }
};

/// One face of the box boundary: normal along `axis`, pointing -e_axis for
/// side 0 and +e_axis for side 1. Face nodes are indexed by the remaining
/// axes, row-major.
struct Face {
  int axis = 0;
  int side = 0;

  double normal_component(int a) const {
    if (a != axis) return 0.0;
    return side == 0 ? -1.0 : 1.0;
  }
};

inline int face_count(const Grid& g) { return 2 * g.n; }
inline Face face_of(int f) { return Face{f / 2, f % 2}; }
inline int face_id(const Face& f) { return 2 * f.axis + f.side; }

/// Nodes per face = nx^(n-1).
inline std::int64_t face_nodes(const Grid& g) {
  std::int64_t p = 1;
  for (int a = 0; a < g.n - 1; ++a) p *= g.nx;
  return p;
}

/// Maps a face-local node index to the full spatial multi-index.
inline std::array<int, kMaxDim> face_node_to_spatial(const Grid& g, const Face& f,
                                                     std::int64_t node) {
  std::array<int, kMaxDim> ix{};
  for (int a = g.n - 1; a >= 0; --a) {
    if (a == f.axis) continue;
    ix[a] = static_cast<int>(node % g.nx);
    node /= g.nx;
  }
  ix[f.axis] = f.side == 0 ? 0 : g.nx - 1;
  return ix;
}

/// Trapezoid weight of a node within its face (over the n-1 face axes).
inline double face_trap_weight(const Grid& g, const Face& f,
                               const std::array<int, kMaxDim>& ix) {
  double w = 1.0;
  for (int a = 0; a < g.n; ++a) {
    if (a == f.axis) continue;
    if (ix[a] == 0 || ix[a] == g.nx - 1) w *= 0.5;
  }
  return w;
}

inline double face_cell_area(const Grid& g) {
  double v = 1.0;
  for (int a = 0; a < g.n - 1; ++a) v *= g.dx;
  return v;
}

/// Owning face of a boundary node: the boundary axis of lowest index, with
/// ties impossible (a node on two faces of one axis cannot happen for nx>1).
/// Corner nodes therefore belong to exactly one face for counting purposes.
inline int owning_face(const Grid& g, const std::array<int, kMaxDim>& ix) {
  for (int a = 0; a < g.n; ++a) {
    if (ix[a] == 0) return face_id(Face{a, 0});
    if (ix[a] == g.nx - 1) return face_id(Face{a, 1});
  }
  return -1;
}

using Direction = std::array<double, kMaxDim>;

inline Direction unit_direction(const Grid& g, std::initializer_list<double> comps) {
  Direction d{};
  int a = 0;
  for (double c : comps) {
    if (a >= g.n) break;
    d[a++] = c;
  }
  double nrm = 0.0;
  for (int i = 0; i < g.n; ++i) nrm += d[i] * d[i];
  nrm = std::sqrt(nrm);
  if (!(nrm > 0)) throw Error("direction: zero vector");
  for (int i = 0; i < g.n; ++i) d[i] /= nrm;
  return d;
}

inline Direction angle_direction(double theta) {
  Direction d{};
  d[0] = std::cos(theta);
  d[1] = std::sin(theta);
  return d;
}

inline double dot_dir(const Grid& g, const Direction& a, const Direction& b) {
  double s = 0.0;
  for (int i = 0; i < g.n; ++i) s += a[i] * b[i];
  return s;
}

inline double dir_norm(const Grid& g, const Direction& d) {
  return std::sqrt(dot_dir(g, d, d));
}

/// Phase coordinate t + x.omega at a grid node.
inline double phase_t_plus_xw(const Grid& g, int k, const std::array<int, kMaxDim>& ix,
                              const Direction& omega) {
  double s = g.time(k);
  for (int a = 0; a < g.n; ++a) s += g.coord(ix[a]) * omega[a];
  return s;
}

}  // namespace wavecal

#endif
