#ifndef WAVECAL_TRACES_HPP
#define WAVECAL_TRACES_HPP

#include <optional>
#include <string>
#include <vector>

#include "wavecal/masks.hpp"
#include "wavecal/wave_solver.hpp"

namespace wavecal {

/// The five data scenarios plus the unmasked bundle. Hidden components per
/// scenario:
///   C0   - u|t=0 (constrained to zero)
///   CT   - du/dt|t=T
///   C0T  - both of the above
///   CTV  - du/dt|t=T, and the Neumann trace outside the patch V
///   C0TV - u|t=0, du/dt|t=T, Neumann outside V
enum class Scenario { Full, C0, CT, C0T, CTV, C0TV };

inline const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::Full: return "FULL";
    case Scenario::C0: return "C0";
    case Scenario::CT: return "CT";
    case Scenario::C0T: return "C0T";
    case Scenario::CTV: return "CTV";
    case Scenario::C0TV: return "C0TV";
  }
  return "?";
}

inline Scenario scenario_from_name(const std::string& s) {
  if (s == "FULL") return Scenario::Full;
  if (s == "C0") return Scenario::C0;
  if (s == "CT") return Scenario::CT;
  if (s == "C0T") return Scenario::C0T;
  if (s == "CTV") return Scenario::CTV;
  if (s == "C0TV") return Scenario::C0TV;
  throw ConfigError("unknown scenario: " + s);
}

inline bool scenario_zero_initial(Scenario s) {
  return s == Scenario::C0 || s == Scenario::C0T || s == Scenario::C0TV;
}
inline bool scenario_hides_final_rate(Scenario s) {
  return s == Scenario::CT || s == Scenario::C0T || s == Scenario::CTV || s == Scenario::C0TV;
}
inline bool scenario_restricts_neumann(Scenario s) {
  return s == Scenario::CTV || s == Scenario::C0TV;
}

/// Neumann trace with per-node visibility. Masked nodes hold no value;
/// reading one is a hard error, so downstream code cannot silently consume
/// data a scenario does not provide. Each visible node carries the trace in
/// two discretizations: the exported second-order one-sided derivative, and
/// the first-difference flux (u_bnd - u_inner)/dx that the
/// summation-by-parts pairing consumes exactly.
template <class T>
struct NeumannTrace {
  Grid grid;
  std::vector<std::vector<T>> face;          // [face][k*fn + node]
  std::vector<std::vector<T>> flux_face;     // [face][k*fn + node]
  std::vector<std::vector<char>> present;    // [face][node]

  NeumannTrace() = default;
  explicit NeumannTrace(const Grid& g) : grid(g) {
    face.assign(face_count(g), std::vector<T>(g.nt * face_nodes(g), T{}));
    flux_face.assign(face_count(g), std::vector<T>(g.nt * face_nodes(g), T{}));
    present.assign(face_count(g), std::vector<char>(face_nodes(g), 1));
  }
  bool node_present(int f, std::int64_t node) const { return present[f][node] != 0; }
  const T& at(int f, int k, std::int64_t node) const {
    if (!node_present(f, node))
      throw MaskedTraceError("neumann trace masked on face " + std::to_string(f));
    return face[f][k * face_nodes(grid) + node];
  }
  const T& flux(int f, int k, std::int64_t node) const {
    if (!node_present(f, node))
      throw MaskedTraceError("neumann trace masked on face " + std::to_string(f));
    return flux_face[f][k * face_nodes(grid) + node];
  }
  T& raw(int f, int k, std::int64_t node) { return face[f][k * face_nodes(grid) + node]; }
  T& raw_flux(int f, int k, std::int64_t node) {
    return flux_face[f][k * face_nodes(grid) + node];
  }
};

/// The six boundary/endpoint observations with scenario masking. Hidden
/// traces are absent, not zero-filled.
template <class T>
struct TraceBundle {
  Grid grid;
  Scenario scenario = Scenario::Full;

  BoundaryData<T> dirichlet;
  std::optional<Slice<T>> initial_value;
  std::optional<Slice<T>> initial_rate;
  std::optional<NeumannTrace<T>> neumann;
  std::optional<Slice<T>> final_value;
  std::optional<Slice<T>> final_rate;
  // slice at T - dt; carried exactly when the final rate is visible (it
  // encodes the same endpoint information at grid level)
  std::optional<Slice<T>> final_penultimate;

  const Slice<T>& get_initial_value() const {
    if (!initial_value) throw MaskedTraceError("initial value trace masked");
    return *initial_value;
  }
  const Slice<T>& get_initial_rate() const {
    if (!initial_rate) throw MaskedTraceError("initial rate trace masked");
    return *initial_rate;
  }
  const NeumannTrace<T>& get_neumann() const {
    if (!neumann) throw MaskedTraceError("neumann trace masked");
    return *neumann;
  }
  const Slice<T>& get_final_value() const {
    if (!final_value) throw MaskedTraceError("final value trace masked");
    return *final_value;
  }
  const Slice<T>& get_final_rate() const {
    if (!final_rate) throw MaskedTraceError("final rate trace masked");
    return *final_rate;
  }
  const Slice<T>& get_final_penultimate() const {
    if (!final_penultimate) throw MaskedTraceError("final penultimate trace masked");
    return *final_penultimate;
  }
};

namespace detail {

/// First-difference outward flux (u_bnd - u_inner)/dx on a face.
template <class T>
T normal_flux(const Field<T>& u, int k, const Face& fc, std::int64_t node) {
  const Grid& g = u.grid;
  auto ix = face_node_to_spatial(g, fc, node);
  auto jx = ix;
  jx[fc.axis] = fc.side == 0 ? 1 : g.nx - 2;
  return (u.at(k, ix) - u.at(k, jx)) / g.dx;
}

/// One-sided second-order outward normal derivative on a face.
template <class T>
T normal_derivative(const Field<T>& u, int k, const Face& fc, std::int64_t node) {
  const Grid& g = u.grid;
  auto ix = face_node_to_spatial(g, fc, node);
  auto jx = ix;
  const double h = g.dx;
  if (fc.side == 0) {
    jx[fc.axis] = 0;
    T f0 = u.at(k, jx);
    jx[fc.axis] = 1;
    T f1 = u.at(k, jx);
    jx[fc.axis] = 2;
    T f2 = u.at(k, jx);
    // nu = -e_axis
    return (f0 * 3.0 - f1 * 4.0 + f2) / (2.0 * h);
  }
  jx[fc.axis] = g.nx - 1;
  T f0 = u.at(k, jx);
  jx[fc.axis] = g.nx - 2;
  T f1 = u.at(k, jx);
  jx[fc.axis] = g.nx - 3;
  T f2 = u.at(k, jx);
  return (f0 * 3.0 - f1 * 4.0 + f2) / (2.0 * h);
}

template <class T>
Slice<T> rate_slice(const Field<T>& u, bool at_final) {
  const Grid& g = u.grid;
  Slice<T> s(g);
  int k = at_final ? g.nt - 1 : 0;
  for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) s.at(sid) = ddt(u, k, sid);
  return s;
}

}  // namespace detail

/// Reads the six traces off a solved history and applies the scenario mask.
/// Partial-data scenarios need the observation mask that defines V.
template <class T>
TraceBundle<T> extract_traces(const Field<T>& u, Scenario scenario,
                              const BoundaryMask* mask = nullptr) {
  const Grid& g = u.grid;
  TraceBundle<T> tb;
  tb.grid = g;
  tb.scenario = scenario;

  if (scenario_zero_initial(scenario)) {
    double m0 = 0.0, mall = 0.0;
    for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid)
      m0 = std::max(m0, std::sqrt(abs2(u.at(0, sid))));
    for (const T& x : u.v) mall = std::max(mall, std::sqrt(abs2(x)));
    if (m0 > 1e-8 * std::max(1e-300, mall))
      throw Error("extract_traces: scenario violation, u(0) != 0");
  }
  if (scenario_restricts_neumann(scenario) && mask == nullptr)
    throw Error("extract_traces: scenario needs an observation mask");

  tb.dirichlet = BoundaryData<T>(g);
  for (int f = 0; f < face_count(g); ++f) {
    Face fc = face_of(f);
    for (int k = 0; k < g.nt; ++k)
      for (std::int64_t node = 0; node < face_nodes(g); ++node)
        tb.dirichlet.at(f, k, node) = u.at(k, face_node_to_spatial(g, fc, node));
  }

  if (!scenario_zero_initial(scenario)) tb.initial_value = u.slice(0);
  tb.initial_rate = detail::rate_slice(u, false);

  NeumannTrace<T> nm(g);
  for (int f = 0; f < face_count(g); ++f) {
    Face fc = face_of(f);
    for (std::int64_t node = 0; node < face_nodes(g); ++node) {
      bool keep = !scenario_restricts_neumann(scenario) || mask->in_v(f, node);
      nm.present[f][node] = keep ? 1 : 0;
      if (!keep) continue;
      for (int k = 0; k < g.nt; ++k) {
        nm.raw(f, k, node) = detail::normal_derivative(u, k, fc, node);
        nm.raw_flux(f, k, node) = detail::normal_flux(u, k, fc, node);
      }
    }
  }
  tb.neumann = std::move(nm);

  tb.final_value = u.slice(g.nt - 1);
  if (!scenario_hides_final_rate(scenario)) {
    tb.final_rate = detail::rate_slice(u, true);
    tb.final_penultimate = u.slice(g.nt - 2);
  }
  return tb;
}

}  // namespace wavecal

#endif
