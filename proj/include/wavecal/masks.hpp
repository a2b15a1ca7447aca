#ifndef WAVECAL_MASKS_HPP
#define WAVECAL_MASKS_HPP

#include <vector>

#include "wavecal/field.hpp"

namespace wavecal {

/// Classification of the lateral boundary for a probing direction omega:
/// shadowed faces have nu.omega > eps, illuminated faces nu.omega <= eps.
/// V is the observation patch: all illuminated faces plus a margin of
/// `margin_cells` node layers on the remaining faces, measured from shared
/// edges. The margin width is a config knob; one cell by default.
struct BoundaryMask {
  Grid grid;
  Direction omega{};
  double eps = 0.0;
  int margin_cells = 1;
  std::vector<bool> face_shadowed;          // per face: nu.omega > eps
  std::vector<std::vector<bool>> v_member;  // per face, per face-node

  bool face_illuminated(int f) const { return !face_shadowed[f]; }

  bool in_v(int f, std::int64_t node) const { return v_member[f][node]; }

  /// Node-exact partition counts: every boundary node assigned to its owning
  /// face and counted once.
  void partition_counts(std::int64_t& plus, std::int64_t& minus) const {
    plus = minus = 0;
    const Grid& g = grid;
    for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
      auto ix = g.sunflatten(sid);
      int f = owning_face(g, ix);
      if (f < 0) continue;
      if (face_shadowed[f])
        ++plus;
      else
        ++minus;
    }
  }
};

inline BoundaryMask boundary_partition(const Grid& g, const Direction& omega, double eps,
                                       int margin_cells = 1) {
  if (std::abs(dir_norm(g, omega) - 1.0) > 1e-12)
    throw Error("boundary_partition: omega must be a unit vector");
  if (eps < 0.0) throw Error("boundary_partition: eps must be nonnegative");
  BoundaryMask m;
  m.grid = g;
  m.omega = omega;
  m.eps = eps;
  m.margin_cells = margin_cells;
  m.face_shadowed.resize(face_count(g));
  bool any_shadowed = false;
  for (int f = 0; f < face_count(g); ++f) {
    Face fc = face_of(f);
    double nu_dot = fc.normal_component(fc.axis) * omega[fc.axis];
    m.face_shadowed[f] = nu_dot > eps;
    any_shadowed = any_shadowed || m.face_shadowed[f];
  }
  if (!any_shadowed) throw Error("boundary_partition: empty shadowed set");

  // V: illuminated faces entirely, plus margin strips on shadowed faces next
  // to any corner they share with an illuminated face.
  m.v_member.resize(face_count(g));
  for (int f = 0; f < face_count(g); ++f) {
    m.v_member[f].assign(face_nodes(g), !m.face_shadowed[f]);
    if (!m.face_shadowed[f]) continue;
    Face fc = face_of(f);
    for (std::int64_t node = 0; node < face_nodes(g); ++node) {
      auto ix = face_node_to_spatial(g, fc, node);
      bool near = false;
      for (int a = 0; a < g.n && !near; ++a) {
        if (a == fc.axis) continue;
        int lo_face = face_id(Face{a, 0});
        int hi_face = face_id(Face{a, 1});
        if (!m.face_shadowed[lo_face] && ix[a] < margin_cells) near = true;
        if (!m.face_shadowed[hi_face] && ix[a] > g.nx - 1 - margin_cells) near = true;
      }
      if (near) m.v_member[f][node] = true;
    }
  }
  return m;
}

/// True when every illuminated face of `omega` (at threshold eps) lies inside
/// the observation patch of `mask`. Partial-data scenarios require this for
/// every probing direction they use.
inline bool mask_covers_illuminated(const BoundaryMask& mask, const Direction& omega,
                                    double eps = 0.0) {
  const Grid& g = mask.grid;
  for (int f = 0; f < face_count(g); ++f) {
    Face fc = face_of(f);
    double nu_dot = fc.normal_component(fc.axis) * omega[fc.axis];
    bool illuminated = nu_dot <= eps;
    if (!illuminated) continue;
    for (std::int64_t node = 0; node < face_nodes(g); ++node)
      if (!mask.v_member[f][node]) return false;
  }
  return true;
}

}  // namespace wavecal

#endif
