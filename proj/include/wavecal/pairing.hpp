#ifndef WAVECAL_PAIRING_HPP
#define WAVECAL_PAIRING_HPP

#include "wavecal/data_record.hpp"
#include "wavecal/exp_probe.hpp"

namespace wavecal {

/// Boundary/endpoint evaluation of the volume pairing  int_Q q u2 u1 from
/// trace differences. The terms are assembled in summation-by-parts form,
/// which makes the identity exact for the discrete fields:
///   lateral         ~ - int_Sigma  dnu(u) u1        (first-difference flux)
///   final_kinetic   ~ + int_Omega  dt(u)(T) u1(T)   (discrete Wronskian)
///   final_potential ~ - int_Omega  u(T) dt(u1)(T)
/// where u is the background-minus-measured difference field.
struct PairingResult {
  Direction omega{};
  Freq xi;
  double lambda = 0.0;
  Scenario scenario = Scenario::Full;
  ProbeFamily family = ProbeFamily::Oscillating;
  bool zero_init = false;
  int dim = 2;

  cplx value{};
  cplx lateral{};
  cplx final_kinetic{};
  cplx final_potential{};
  bool dropped_lateral_outside_patch = false;
  bool dropped_final_kinetic = false;
};

/// Background traces a pairing consumes; computed once per record and shared
/// across the slice-frequency sweep.
struct BackgroundTraces {
  TraceBundle<cplx> traces;
};

inline BackgroundTraces background_solve(const PotentialField& q1, const DataRecord& rec) {
  WaveField<cplx> v = solve_ibvp(q1, rec.prescribed);
  BackgroundTraces bg;
  bg.traces = extract_traces(v.u, Scenario::Full);
  return bg;
}

namespace pairdetail {

inline void check_tau0_match(const DataRecord& rec, const SolveInputs<cplx>& tau0) {
  const Grid& g = rec.grid;
  double scale = std::max(1.0, rec.prescribed.data_scale(g));
  double gap = 0.0;
  for (std::size_t i = 0; i < tau0.v0.v.size(); ++i)
    gap = std::max(gap, std::abs(tau0.v0.v[i] - rec.prescribed.v0.v[i]));
  for (std::size_t i = 0; i < tau0.v1.v.size(); ++i)
    gap = std::max(gap, std::abs(tau0.v1.v[i] - rec.prescribed.v1.v[i]));
  for (int f = 0; f < face_count(g); ++f)
    for (std::size_t i = 0; i < tau0.g.face[f].size(); ++i)
      gap = std::max(gap, std::abs(tau0.g.face[f][i] - rec.prescribed.g.face[f][i]));
  if (gap > 1e-8 * scale) throw Error("green_pairing: probe/record inconsistency");
}

}  // namespace pairdetail

/// Evaluates the pairing for one record and one background-side probe.
/// Terms a scenario cannot measure are dropped only when either the probe
/// anchoring certifies them zero or the exponential weight suppresses them;
/// otherwise the combination is rejected.
inline PairingResult green_pairing(const DataRecord& rec,
                                   const SolveInputs<cplx>& probe_in_tau0,
                                   const GOProbe& probe_out, const BackgroundTraces& bg) {
  const Grid& g = rec.grid;
  pairdetail::check_tau0_match(rec, probe_in_tau0);

  PairingResult pr;
  pr.dim = g.n;
  pr.omega = probe_out.omega;
  pr.xi = probe_out.xi;
  pr.lambda = probe_out.lambda;
  pr.scenario = rec.scenario;
  pr.family = probe_out.family;
  pr.zero_init = probe_out.zero_init;

  const ComplexField& u1 = probe_out.u;
  const std::int64_t sp = g.spatial_points();
  const double dV = g.cell_volume();

  // lateral term: - sum over faces of dx^(n-1) dt * flux(u) * u1|face,
  // inner time rows and inner transverse nodes (the exact telescoped form)
  const bool restricted = scenario_restricts_neumann(rec.scenario);
  const auto& rec_nm = rec.outputs.get_neumann();
  const auto& bg_nm = bg.traces.get_neumann();
  cplx lateral(0, 0);
  const double face_meas = face_cell_area(g) * g.dt;
  for (int f = 0; f < face_count(g); ++f) {
    Face fc = face_of(f);
    for (std::int64_t node = 0; node < face_nodes(g); ++node) {
      auto ix = face_node_to_spatial(g, fc, node);
      bool transverse_interior = true;
      for (int a = 0; a < g.n; ++a) {
        if (a == fc.axis) continue;
        if (ix[a] == 0 || ix[a] == g.nx - 1) transverse_interior = false;
      }
      if (!transverse_interior) continue;
      if (!rec_nm.node_present(f, node)) {
        if (!restricted) throw Error("green_pairing: scenario cannot support this pairing");
        pr.dropped_lateral_outside_patch = true;
        continue;
      }
      cplx acc(0, 0);
      for (int k = 1; k < g.nt - 1; ++k) {
        cplx du_flux = bg_nm.flux(f, k, node) - rec_nm.flux(f, k, node);
        acc += du_flux * u1.at(k, ix);
      }
      lateral -= acc * face_meas;
    }
  }
  pr.lateral = lateral;

  // endpoint terms: discrete Wronskian at the top,
  //   (dV/dt) sum_x [ u^K u1^{K-1} - u^{K-1} u1^K ],  K = nt-1
  // split symmetrically so the reported halves track the continuum
  // kinetic/potential terms
  const int K = g.nt - 1;
  const Slice<cplx>& rec_fv = rec.outputs.get_final_value();
  const Slice<cplx>& bg_fv = bg.traces.get_final_value();
  if (rec.outputs.final_penultimate.has_value()) {
    const Slice<cplx>& rec_pen = rec.outputs.get_final_penultimate();
    const Slice<cplx>& bg_pen = bg.traces.get_final_penultimate();
    cplx kin(0, 0), pot(0, 0);
    for (std::int64_t sid = 0; sid < sp; ++sid) {
      cplx uK = bg_fv.at(sid) - rec_fv.at(sid);
      cplx uKm = bg_pen.at(sid) - rec_pen.at(sid);
      cplx p1K = u1.at(K, sid), p1Km = u1.at(K - 1, sid);
      kin += (uK - uKm) * (p1K + p1Km);
      pot -= (p1K - p1Km) * (uK + uKm);
    }
    pr.final_kinetic = kin * (0.5 * dV / g.dt);
    pr.final_potential = pot * (0.5 * dV / g.dt);
  } else {
    // the u^{K-1} u1^K half is unavailable; it is zero when the probe
    // anchors at T and weight-suppressed for the exponential family
    double u1T_max = 0, u1_max = linf_norm(u1);
    for (std::int64_t sid = 0; sid < sp; ++sid)
      u1T_max = std::max(u1T_max, std::abs(u1.at(K, sid)));
    bool certified = u1T_max <= 1e-8 * u1_max;
    if (!certified && probe_out.family != ProbeFamily::Exponential)
      throw Error("green_pairing: scenario cannot support this pairing");
    if (!certified) pr.dropped_final_kinetic = true;
    cplx acc(0, 0);
    for (std::int64_t sid = 0; sid < sp; ++sid)
      acc += (bg_fv.at(sid) - rec_fv.at(sid)) * u1.at(K - 1, sid);
    // u1^{K-1} ~ -dt * dt(u1)(T) here, so this half carries the potential
    // term of the pairing
    pr.final_potential = acc * (dV / g.dt);
    pr.final_kinetic = cplx(0, 0);
  }

  pr.value = pr.lateral + pr.final_kinetic + pr.final_potential;
  if (!is_finite(pr.value)) throw Error("green_pairing: non-finite value");
  return pr;
}

inline PairingResult green_pairing(const DataRecord& rec, const PotentialField& q1,
                                   const SolveInputs<cplx>& probe_in_tau0,
                                   const GOProbe& probe_out) {
  BackgroundTraces bg = background_solve(q1, rec);
  return green_pairing(rec, probe_in_tau0, probe_out, bg);
}

/// Normalization mapping a pairing value onto the transform estimate; the
/// conventions per probe family are frozen here and documented in the
/// README table.
inline cplx fourier_sample(const PairingResult& pr, Scenario scenario) {
  if (pr.scenario != scenario) throw Error("fourier_sample: scenario/probe mismatch");
  const int n = pr.dim;
  switch (scenario) {
    case Scenario::C0:
    case Scenario::CT:
    case Scenario::C0T:
      if (pr.family != ProbeFamily::Oscillating)
        throw Error("fourier_sample: scenario/probe mismatch");
      return pr.value / std::pow(2.0 * kPi, double(n + 1));
    case Scenario::CTV:
    case Scenario::C0TV:
      if (pr.family != ProbeFamily::Exponential)
        throw Error("fourier_sample: scenario/probe mismatch");
      return pr.value / std::pow(2.0 * kPi, 0.5 * (n + 1));
    default:
      throw Error("fourier_sample: scenario/probe mismatch");
  }
}

}  // namespace wavecal

#endif
