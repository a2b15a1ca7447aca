#include <doctest.h>

#include "wavecal/exp_probe.hpp"
#include "wavecal/go_probe.hpp"
#include "wavecal/potentials.hpp"

using namespace wavecal;

namespace {

Grid probe_grid(int nx = 32, double T = 2.0) { return Grid::with_cfl(2, 1.0, T, nx); }

Freq plane_freq(const Grid& g, const Direction& omega, double s1, double s2) {
  // xi = s1 * (1, omega) + s2 * (0, omega_perp), always on the hyperplane
  Freq xi;
  xi.t = s1;
  xi.x[0] = s1 * omega[0] - s2 * omega[1];
  xi.x[1] = s1 * omega[1] + s2 * omega[0];
  return xi;
}

}  // namespace

TEST_CASE("transport amplitudes: constant, plane, cutoff") {
  Grid g = probe_grid(24);
  Direction omega = unit_direction(g, {0.6, 0.8});

  Amplitude c;
  c.profile = AmpProfile::Constant;
  c.kind = 1;
  c.omega = omega;
  AmplitudeField ac = transport_amplitude(g, c);
  CHECK(transport_residual_l2(ac) == 0.0);

  Amplitude p;
  p.profile = AmpProfile::Plane;
  p.kind = 2;
  p.omega = omega;
  p.coeff = cplx(std::pow(2 * kPi, 1.5), 0);
  p.xi = Freq{};  // xi = 0: constant (2 pi)^((n+1)/2)
  AmplitudeField ap = transport_amplitude(g, p);
  CHECK(std::abs(ap.a.at(3, 5) - cplx(std::pow(2 * kPi, 1.5), 0)) < 1e-12);

  // plane with xi off the hyperplane is rejected
  Amplitude bad = p;
  bad.xi.t = 1.0;
  CHECK_THROWS_AS(transport_amplitude(g, bad), Error);

  // on-plane modulation has O(dx^2)-scale centered residual
  Amplitude p2 = p;
  p2.kind = 1;
  p2.xi = plane_freq(g, omega, 2.0, 3.0);
  AmplitudeField ap2 = transport_amplitude(g, p2);
  double rel = transport_residual_l2(ap2) / l2_norm(ap2.a);
  CHECK(rel < 20.0 * g.dx * g.dx);

  // cutoff profile: function of the characteristic variable, small residual
  CutoffBuild cb = cutoff_builder(g, omega);
  Amplitude ch;
  ch.profile = AmpProfile::CutoffOnly;
  ch.kind = 1;
  ch.omega = omega;
  ch.chi = cb.chi;
  ch.x0 = cb.x0;
  AmplitudeField ach = transport_amplitude(g, ch);
  CHECK(transport_residual_l2(ach) / l2_norm(ach.a) < 20.0 * g.dx * g.dx);
}

TEST_CASE("cutoff builder geometry") {
  // T = Diam + 4 gives eps = 1
  double diam = std::sqrt(2.0);
  Grid g = Grid::with_cfl(2, 1.0, diam + 4.0, 16);
  Direction omega = unit_direction(g, {1.0, 0.0});
  CutoffBuild cb = cutoff_builder(g, omega);
  CHECK(cb.eps == doctest::Approx(1.0));
  // plateau: exactly 1 on [0, T + Diam]
  CHECK(cb.chi(0.0) == 1.0);
  CHECK(cb.chi(0.5 * (g.T + diam)) == 1.0);
  CHECK(cb.chi(g.T + diam) == 1.0);
  CHECK(cb.chi(-1.0001) == 0.0);
  CHECK(cb.chi(g.T + diam + 1.0001) == 0.0);
  // x0 minimizes x.omega over the boundary: the x1 = 0 face
  CHECK(cb.x0[0] == doctest::Approx(0.0));

  Grid short_g = Grid::with_cfl(2, 1.0, 1.2, 16);
  CHECK_THROWS_WITH_AS(cutoff_builder(short_g, omega),
                       "cutoff scenario requires T > Diam(Omega)", Error);
}

TEST_CASE("cutoff amplitude supports are grid-exactly disjoint") {
  double diam = std::sqrt(2.0);
  Grid g = Grid::with_cfl(2, 1.0, diam + 4.0, 16);
  Direction omega = unit_direction(g, {0.6, 0.8});
  Freq xi = plane_freq(g, omega, 1.0, 2.0);
  OscSpec u1 = osc_spec_cutoff_pair(g, omega, xi, TimeAnchor::TT, -1, true);
  OscSpec u2 = osc_spec_cutoff_pair(g, omega, xi, TimeAnchor::T0, +1, false);
  AmplitudeField a12 = transport_amplitude(g, u1.amps[1]);
  AmplitudeField a22 = transport_amplitude(g, u2.amps[1]);
  cplx dot(0, 0);
  double prod_max = 0.0;
  for (std::size_t i = 0; i < a12.a.v.size(); ++i) {
    dot += a12.a.v[i] * a22.a.v[i];
    prod_max = std::max(prod_max, std::abs(a12.a.v[i] * a22.a.v[i]));
  }
  CHECK(prod_max == 0.0);
  CHECK(std::abs(dot) == 0.0);
  // sanity: neither amplitude is identically zero
  CHECK(l2_norm(a12.a) > 0.0);
  CHECK(l2_norm(a22.a) > 0.0);
}

TEST_CASE("oscillating probe: zero potential, constant amplitudes") {
  Grid g = probe_grid(24);
  PotentialField q = zero_potential(g);
  Direction omega = unit_direction(g, {1.0, 0.0});
  OscSpec spec = osc_spec_two_const(g, omega, TimeAnchor::T0, +1);
  GOProbe p = build_oscillating_probe(q, omega, 8.0, Freq{}, spec, TimeAnchor::T0);
  // matched carriers solve the stencil exactly: source and remainder are
  // roundoff-level
  CHECK(linf_norm(p.remainder) < 1e-9 * linf_norm(p.u));
  CHECK(p.residual_l2 < 1e-9 * p.residual_scale);
  // anchored endpoint vanishes identically
  double u0 = 0;
  for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid)
    u0 = std::max(u0, std::abs(p.u.at(0, sid)));
  CHECK(u0 < 1e-12);
}

TEST_CASE("oscillating probe solves the discrete equation with potential") {
  Grid g = probe_grid(32);
  PotentialField q = bump_potential(g, 2.5, 0.3, 0.35);
  q.p1 = kInf;
  q.p2 = kInf;
  Direction omega = angle_direction(0.4);
  Freq xi = plane_freq(g, omega, 1.5, -2.0);
  GOProbe p = build_oscillating_probe(q, omega, 16.0, xi, osc_spec_plane(g, omega, xi, -1),
                                      TimeAnchor::TT);
  CHECK(p.residual_l2 < 1e-8 * p.residual_scale);
  CHECK(linf_norm(p.remainder) > 0.0);
  // anchor: remainder vanishes at t = T, so u(T) equals the principal part
  double dT = 0;
  for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid)
    dT = std::max(dT, std::abs(p.remainder.at(g.nt - 1, sid)));
  CHECK(dT == 0.0);

  // hypothesis guard
  PotentialField qp = bump_potential(g, 1.0, 0.3);
  qp.p1 = 1.5;
  CHECK_THROWS_AS(
      build_oscillating_probe(qp, omega, 8.0, xi, osc_spec_plane(g, omega, xi, -1),
                              TimeAnchor::TT),
      Error);
}

TEST_CASE("t0-anchored probes vanish at the initial time") {
  Grid g = probe_grid(24);
  PotentialField q = bump_potential(g, 2.0, 0.3, 0.3);
  q.p1 = kInf;
  q.p2 = kInf;
  Direction omega = angle_direction(1.1);
  OscSpec spec = osc_spec_two_const(g, omega, TimeAnchor::T0, +1);
  GOProbe p = build_oscillating_probe(q, omega, 12.0, Freq{}, spec, TimeAnchor::T0);
  double u0 = 0, umax = linf_norm(p.u);
  for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid)
    u0 = std::max(u0, std::abs(p.u.at(0, sid)));
  CHECK(u0 <= 1e-8 * umax);
  // and its tau0 data reproduce the probe through the true solve
  SolveInputs<cplx> tau0 = probe_tau0(p);
  WaveField<cplx> sol = solve_ibvp(q, tau0);
  double dmax = 0;
  for (std::size_t i = 0; i < sol.u.v.size(); ++i)
    dmax = std::max(dmax, std::abs(sol.u.v[i] - p.u.v[i]));
  CHECK(dmax < 1e-9 * umax);
}

TEST_CASE("remainder decay study") {
  Grid g = probe_grid(32);
  PotentialField q = bump_potential(g, 2.5, 0.3, 0.35);
  q.p1 = kInf;
  q.p2 = kInf;
  Direction omega = unit_direction(g, {1.0, 0.0});
  Freq xi = plane_freq(g, omega, 1.0, 1.5);
  DecayTable tab = remainder_decay_study(q, omega, xi, {8, 16, 32, 64});
  CHECK(tab.pass);
  CHECK(tab.rows.back().linf_l2 <= 0.5 * tab.rows.front().linf_l2);
  CHECK(tab.rows.back().linf_h1 <= 2.0 * tab.rows.front().linf_h1);

  PotentialField qz = zero_potential(g);
  // zero potential: plane-amplitude source is almost pure curvature; the
  // remainder still decays
  DecayTable tz = remainder_decay_study(qz, omega, xi, {8, 16, 32, 64});
  CHECK(tz.pass);

  CHECK_THROWS_AS(remainder_decay_study(q, omega, xi, {8, 16}), Error);
  CHECK_THROWS_AS(remainder_decay_study(q, omega, xi, {8, 16, 12, 64}), Error);
}

TEST_CASE("singular-in-time potential keeps the decay mechanism") {
  Grid g = probe_grid(32);
  PotentialField q = time_singular_potential(g, 1.5, 0.35, 2.5, 4.0);
  Direction omega = unit_direction(g, {1.0, 0.0});
  Freq xi = plane_freq(g, omega, 1.0, 1.0);
  DecayTable tab = remainder_decay_study(q, omega, xi, {8, 16, 32, 64});
  CHECK(tab.pass);
}
