#include <doctest.h>

#include <random>

#include "wavecal/data_record.hpp"
#include "wavecal/potentials.hpp"

using namespace wavecal;

namespace {

RealField standing_mode(const Grid& g) {
  RealField u(g);
  double w = std::sqrt(2.0) * kPi;
  for (int k = 0; k < g.nt; ++k) {
    double ct = std::cos(w * g.time(k));
    for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
      auto ix = g.sunflatten(sid);
      u.at(k, sid) = std::sin(kPi * g.coord(ix[0])) * std::sin(kPi * g.coord(ix[1])) * ct;
    }
  }
  return u;
}

double rel_l2_err(const RealField& a, const RealField& b) {
  RealField d = a;
  d -= b;
  return l2q_norm_trap(d) / l2q_norm_trap(b);
}

/// Smooth manufactured solution vanishing on the lateral boundary.
struct Manufactured {
  double wt = 1.3 * kPi, ph = 0.3;
  double f(double t, double x, double y) const {
    return std::sin(wt * t + ph) * std::sin(kPi * x) * std::sin(2.0 * kPi * y);
  }
  double dtt(double t, double x, double y) const { return -wt * wt * f(t, x, y); }
  double lap(double t, double x, double y) const {
    return -(kPi * kPi + 4.0 * kPi * kPi) * f(t, x, y);
  }
  double dt(double t, double x, double y) const {
    return wt * std::cos(wt * t + ph) * std::sin(kPi * x) * std::sin(2.0 * kPi * y);
  }
};

double manufactured_error(int nx) {
  Grid g = Grid::with_cfl(2, 1.0, 1.0, nx);
  PotentialField q = bump_potential(g, 3.0, 0.3, 0.4);
  Manufactured ms;
  RealField ustar(g);
  SolveInputs<double> in = SolveInputs<double>::zero(g);
  in.forcing = RealField(g);
  in.has_forcing = true;
  for (int k = 0; k < g.nt; ++k)
    for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
      auto ix = g.sunflatten(sid);
      double t = g.time(k), x = g.coord(ix[0]), y = g.coord(ix[1]);
      ustar.at(k, sid) = ms.f(t, x, y);
      in.forcing.at(k, sid) = ms.dtt(t, x, y) - ms.lap(t, x, y) + q.q.at(k, sid) * ms.f(t, x, y);
    }
  for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
    auto ix = g.sunflatten(sid);
    in.v0.at(sid) = ms.f(0.0, g.coord(ix[0]), g.coord(ix[1]));
    in.v1.at(sid) = ms.dt(0.0, g.coord(ix[0]), g.coord(ix[1]));
  }
  WaveField<double> sol = solve_ibvp(q, in);
  return rel_l2_err(sol.u, ustar);
}

}  // namespace

TEST_CASE("free wave standing mode") {
  Grid g = Grid::with_cfl(2, 1.0, 1.0, 48);
  PotentialField q = zero_potential(g);
  SolveInputs<double> in = SolveInputs<double>::zero(g);
  for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
    auto ix = g.sunflatten(sid);
    in.v0.at(sid) = std::sin(kPi * g.coord(ix[0])) * std::sin(kPi * g.coord(ix[1]));
  }
  WaveField<double> sol = solve_ibvp(q, in);
  CHECK(rel_l2_err(sol.u, standing_mode(g)) < 0.02);

  // energy conservation of the free wave
  double e0 = energy(sol.u, 0);
  double drift = 0.0;
  for (int k = 0; k < g.nt; ++k)
    drift = std::max(drift, std::abs(energy(sol.u, k) - e0) / e0);
  CHECK(drift <= 0.02);
}

TEST_CASE("zero data gives the zero solution") {
  Grid g = Grid::with_cfl(2, 1.0, 1.0, 24);
  PotentialField q = bump_potential(g, 2.0, 0.3);
  WaveField<double> sol = solve_ibvp(q, SolveInputs<double>::zero(g));
  CHECK(linf_norm(sol.u) == 0.0);
}

TEST_CASE("polynomial manufactured solution is reproduced to roundoff") {
  // u* = t^2 x(1-x) y(1-y): the stencil is exact on this polynomial
  Grid g = Grid::with_cfl(2, 1.0, 1.0, 24);
  PotentialField q = bump_potential(g, 2.0, 0.3);
  RealField ustar(g);
  SolveInputs<double> in = SolveInputs<double>::zero(g);
  in.forcing = RealField(g);
  in.has_forcing = true;
  for (int k = 0; k < g.nt; ++k)
    for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
      auto ix = g.sunflatten(sid);
      double t = g.time(k), x = g.coord(ix[0]), y = g.coord(ix[1]);
      double X = x * (1 - x) * y * (1 - y);
      ustar.at(k, sid) = t * t * X;
      in.forcing.at(k, sid) =
          2.0 * X + t * t * (2.0 * y * (1 - y) + 2.0 * x * (1 - x)) + q.q.at(k, sid) * t * t * X;
    }
  WaveField<double> sol = solve_ibvp(q, in);
  CHECK(rel_l2_err(sol.u, ustar) < 1e-9);
}

TEST_CASE("manufactured convergence is second order") {
  double e1 = manufactured_error(24);
  double e2 = manufactured_error(48);
  double ratio = e1 / e2;
  CHECK(ratio > 3.0);
  CHECK(ratio < 5.2);
}

TEST_CASE("solver is linear in its inputs") {
  Grid g = Grid::with_cfl(2, 1.0, 1.0, 16);
  PotentialField q = bump_potential(g, 1.5, 0.3);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-1, 1);
  auto random_inputs = [&]() {
    SolveInputs<double> in = SolveInputs<double>::zero(g);
    in.forcing = RealField(g);
    in.has_forcing = true;
    for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
      auto ix = g.sunflatten(sid);
      if (!g.on_spatial_boundary(ix)) {
        in.v0.at(sid) = u(rng);
        in.v1.at(sid) = u(rng);
      }
    }
    for (auto& x : in.forcing.v) x = u(rng);
    return in;
  };
  SolveInputs<double> a = random_inputs(), b = random_inputs();
  double al = 0.7, be = -1.3;
  SolveInputs<double> ab = SolveInputs<double>::zero(g);
  ab.forcing = RealField(g);
  ab.has_forcing = true;
  for (std::size_t i = 0; i < ab.v0.v.size(); ++i) {
    ab.v0.v[i] = al * a.v0.v[i] + be * b.v0.v[i];
    ab.v1.v[i] = al * a.v1.v[i] + be * b.v1.v[i];
  }
  for (std::size_t i = 0; i < ab.forcing.v.size(); ++i)
    ab.forcing.v[i] = al * a.forcing.v[i] + be * b.forcing.v[i];
  RealField ua = solve_ibvp(q, a).u, ub = solve_ibvp(q, b).u, uab = solve_ibvp(q, ab).u;
  double err = 0.0, scale = linf_norm(uab);
  for (std::size_t i = 0; i < uab.v.size(); ++i)
    err = std::max(err, std::abs(uab.v[i] - al * ua.v[i] - be * ub.v[i]));
  CHECK(err < 1e-10 * std::max(1.0, scale));
}

TEST_CASE("causal against anti-causal source reciprocity") {
  Grid g = Grid::with_cfl(2, 1.0, 1.0, 32);
  PotentialField q = bump_potential(g, 2.0, 0.3);
  // sources compactly supported in time, away from both endpoints
  BumpSpec s1 = centered_bump(g, 1.0, 0.25, 0.2);
  s1.center[0] = 0.35;
  s1.t_center = 0.4 * g.T;
  BumpSpec s2 = centered_bump(g, 1.0, 0.2, 0.2);
  s2.center[1] = 0.6;
  s2.t_center = 0.6 * g.T;
  SolveInputs<double> in1 = SolveInputs<double>::zero(g);
  in1.forcing = sample_bump(g, s1);
  in1.has_forcing = true;
  SolveInputs<double> in2 = SolveInputs<double>::zero(g);
  in2.forcing = sample_bump(g, s2);
  in2.has_forcing = true;
  RealField u = solve_ibvp(q, in1).u;          // causal
  RealField w = solve_ibvp_reverse(q, in2).u;  // anti-causal
  double f1w = 0, f2u = 0;
  for (std::size_t i = 0; i < u.v.size(); ++i) {
    f1w += in1.forcing.v[i] * w.v[i];
    f2u += in2.forcing.v[i] * u.v[i];
  }
  CHECK(f1w == doctest::Approx(f2u).epsilon(1e-6));
}

TEST_CASE("instability detection") {
  Grid g = Grid::with_cfl(2, 1.0, 2.0, 16);
  PotentialField q = constant_potential(g, -5000.0);
  q.p1 = kInf;
  q.p2 = kInf;
  SolveInputs<double> in = SolveInputs<double>::zero(g);
  for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
    auto ix = g.sunflatten(sid);
    if (!g.on_spatial_boundary(ix)) in.v0.at(sid) = 1.0;
  }
  CHECK_THROWS_WITH_AS(solve_ibvp(q, in), "solve_ibvp: instability", Error);
}

TEST_CASE("corner incompatibility is rejected") {
  Grid g = Grid::with_cfl(2, 1.0, 1.0, 16);
  PotentialField q = zero_potential(g);
  SolveInputs<double> in = SolveInputs<double>::zero(g);
  for (int k = 0; k < g.nt; ++k)
    for (std::int64_t node = 0; node < face_nodes(g); ++node) in.g.at(0, k, node) = 1.0;
  CHECK_THROWS_AS(solve_ibvp(q, in), Error);
}

TEST_CASE("singular potentials stay stable and certified") {
  Grid g = Grid::with_cfl(2, 1.0, 1.0, 32);
  SolveInputs<double> in = SolveInputs<double>::zero(g);
  for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
    auto ix = g.sunflatten(sid);
    in.v0.at(sid) = std::sin(kPi * g.coord(ix[0])) * std::sin(kPi * g.coord(ix[1]));
    in.v1.at(sid) = 0.3 * std::sin(2 * kPi * g.coord(ix[0])) * std::sin(kPi * g.coord(ix[1]));
  }
  for (const PotentialField& q :
       {time_singular_potential(g, 2.0, 0.35), space_singular_potential(g, 1.0, 0.3)}) {
    WaveField<double> sol = solve_ibvp(q, in);
    CHECK(sol.u.finite());
    EnergyCertificate cert = energy_certificate(sol, q, in, 50.0);
    CHECK(cert.pass);
    CHECK(cert.ratio < 50.0);
  }
}

TEST_CASE("energy certificate on constant potentials") {
  Grid g = Grid::with_cfl(2, 1.0, 1.0, 32);
  SolveInputs<double> in = SolveInputs<double>::zero(g);
  for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
    auto ix = g.sunflatten(sid);
    in.v0.at(sid) = std::sin(kPi * g.coord(ix[0])) * std::sin(kPi * g.coord(ix[1]));
  }
  PotentialField q5 = constant_potential(g, 5.0);
  WaveField<double> sol = solve_ibvp(q5, in);
  EnergyCertificate cert = energy_certificate(sol, q5, in, 50.0);
  CHECK(cert.pass);

  SolveInputs<double> bad = in;
  for (int k = 0; k < g.nt; ++k)
    for (std::int64_t node = 0; node < face_nodes(g); ++node) bad.g.at(1, k, node) = 0.5;
  // non-homogeneous lateral data is outside the certificate's contract
  CHECK_THROWS_AS(energy_certificate(sol, q5, bad, 50.0), Error);
}

TEST_CASE("clamp is logged for singular samples") {
  Grid g = Grid::with_cfl(2, 1.0, 1.0, 48);
  PotentialField q = space_singular_potential(g, 4.0, 0.3);
  std::int64_t clamped = 0;
  double cap = 0;
  RealField qc = clamped_potential(q, &clamped, &cap);
  CHECK(cap > 0.0);
  CHECK(clamped > 0);
  CHECK(linf_norm(qc) <= cap * (1 + 1e-12));
  // clamped fraction is tiny
  CHECK(double(clamped) / double(q.q.v.size()) < 1e-3);
}

TEST_CASE("trace extraction basics") {
  Grid g = Grid::with_cfl(2, 1.0, 1.0, 24);
  RealField zero(g);
  TraceBundle<double> tz = extract_traces(zero, Scenario::Full);
  CHECK(l2_slice_trap(tz.get_final_value()) == 0.0);
  CHECK(tz.get_neumann().at(0, 3, 4) == 0.0);

  // u = t: unit initial rate, zero normal derivative
  RealField lin(g);
  for (int k = 0; k < g.nt; ++k)
    for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) lin.at(k, sid) = g.time(k);
  TraceBundle<double> tl = extract_traces(lin, Scenario::Full);
  CHECK(tl.get_initial_rate().at(5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(tl.get_neumann().at(2, g.nt / 2, 3)) < 1e-12);

  // standing mode: normal derivative on the x=0 face
  Grid g2 = Grid::with_cfl(2, 1.0, 1.0, 64);
  RealField sm = standing_mode(g2);
  TraceBundle<double> ts = extract_traces(sm, Scenario::Full);
  Face left{0, 0};
  double w = std::sqrt(2.0) * kPi;
  double err = 0, scale = 0;
  for (int k = 0; k < g2.nt; ++k)
    for (std::int64_t node = 1; node + 1 < face_nodes(g2); ++node) {
      auto ix = face_node_to_spatial(g2, left, node);
      double expect = -kPi * std::sin(kPi * g2.coord(ix[1])) * std::cos(w * g2.time(k));
      double got = ts.get_neumann().at(face_id(left), k, node);
      err = std::max(err, std::abs(got - expect));
      scale = std::max(scale, std::abs(expect));
    }
  CHECK(err / scale < 0.02);
}

TEST_CASE("scenario masks hide exactly the advertised traces") {
  Grid g = Grid::with_cfl(2, 1.0, 1.0, 16);
  PotentialField q = zero_potential(g);
  SolveInputs<double> in = SolveInputs<double>::zero(g);
  for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
    auto ix = g.sunflatten(sid);
    if (!g.on_spatial_boundary(ix)) in.v1.at(sid) = 1.0;  // keeps u(0) = 0
  }
  RealField u = solve_ibvp(q, in).u;
  BoundaryMask mask = boundary_partition(g, unit_direction(g, {1.0, 0.0}), 0.0);

  TraceBundle<double> c0 = extract_traces(u, Scenario::C0);
  CHECK_THROWS_AS(c0.get_initial_value(), MaskedTraceError);
  CHECK_NOTHROW(c0.get_final_rate());
  CHECK_NOTHROW(c0.get_neumann().at(0, 1, 1));

  TraceBundle<double> ct = extract_traces(u, Scenario::CT);
  CHECK_THROWS_AS(ct.get_final_rate(), MaskedTraceError);
  CHECK_NOTHROW(ct.get_initial_value());

  TraceBundle<double> c0t = extract_traces(u, Scenario::C0T);
  CHECK_THROWS_AS(c0t.get_initial_value(), MaskedTraceError);
  CHECK_THROWS_AS(c0t.get_final_rate(), MaskedTraceError);

  TraceBundle<double> ctv = extract_traces(u, Scenario::CTV, &mask);
  CHECK_THROWS_AS(ctv.get_final_rate(), MaskedTraceError);
  int shadowed = face_id(Face{0, 1});
  // reading the masked part of the shadowed face fails, the patch reads fine
  CHECK_THROWS_AS(ctv.get_neumann().at(shadowed, 2, face_nodes(g) / 2), MaskedTraceError);
  CHECK_NOTHROW(ctv.get_neumann().at(face_id(Face{0, 0}), 2, 1));

  TraceBundle<double> c0tv = extract_traces(u, Scenario::C0TV, &mask);
  CHECK_THROWS_AS(c0tv.get_initial_value(), MaskedTraceError);
  CHECK_THROWS_AS(c0tv.get_final_rate(), MaskedTraceError);
  CHECK_THROWS_AS(c0tv.get_neumann().at(shadowed, 2, face_nodes(g) / 2), MaskedTraceError);

  // scenario violation: nonzero initial value under a zero-initial scenario
  RealField bad(g, 1.0);
  CHECK_THROWS_AS(extract_traces(bad, Scenario::C0), Error);
}

TEST_CASE("synthesize_data and record round trip") {
  Grid g = Grid::with_cfl(2, 1.0, 1.0, 16);
  PotentialField q = bump_potential(g, 2.0, 0.3);
  SolveInputs<cplx> in = SolveInputs<cplx>::zero(g);
  for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
    auto ix = g.sunflatten(sid);
    if (!g.on_spatial_boundary(ix))
      in.v1.at(sid) = cplx(std::sin(kPi * g.coord(ix[0])), 0.3);
  }
  BoundaryMask mask = boundary_partition(g, unit_direction(g, {1.0, 0.0}), 0.0);
  DataRecord rec = synthesize_data(q, in, Scenario::CTV, &mask);
  CHECK(rec.source_id.size() == 16);

  std::string dir = "/tmp/wavecal_rec_test";
  save_record(rec, dir);
  DataRecord back = load_record(dir);
  CHECK(back.scenario == rec.scenario);
  CHECK(back.source_id == rec.source_id);
  double dmax = 0;
  for (std::size_t i = 0; i < rec.prescribed.v1.v.size(); ++i)
    dmax = std::max(dmax, std::abs(rec.prescribed.v1.v[i] - back.prescribed.v1.v[i]));
  CHECK(dmax == 0.0);  // bit-exact payload
  CHECK(std::abs(rec.outputs.get_final_value().at(7) - back.outputs.get_final_value().at(7)) ==
        0.0);
  CHECK_THROWS_AS(back.outputs.get_final_rate(), MaskedTraceError);
  // masked nodes stay masked through the round trip
  int shadowed = face_id(Face{0, 1});
  CHECK_THROWS_AS(back.outputs.get_neumann().at(shadowed, 1, face_nodes(g) / 2),
                  MaskedTraceError);

  // zero-initial scenarios reject nonzero v0
  SolveInputs<cplx> nz = in;
  nz.v0 = Slice<cplx>(g, cplx(0.5, 0));
  CHECK_THROWS_AS(synthesize_data(q, nz, Scenario::C0), Error);
}

TEST_CASE("records ignore potential changes outside the numerical light cone") {
  Grid g = Grid::with_cfl(2, 1.0, 0.5, 24);  // short horizon
  // data localized near the lower-left corner
  SolveInputs<cplx> in = SolveInputs<cplx>::zero(g);
  BumpSpec s = centered_bump(g, 1.0, 0.12);
  s.center = {0.2, 0.2, 0.0};
  RealField b = sample_bump(g, s);
  for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid)
    in.v1.at(sid) = cplx(b.at(0, sid), 0.0);

  PotentialField qa = bump_potential(g, 2.0, 0.08);
  PotentialField qb = qa;
  // mutate far corner, outside the cone of the data support
  for (int k = 0; k < g.nt; ++k)
    for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
      auto ix = g.sunflatten(sid);
      if (g.coord(ix[0]) > 0.85 && g.coord(ix[1]) > 0.85) qb.q.at(k, sid) += 7.0;
    }
  DataRecord ra = synthesize_data(qa, in, Scenario::C0);
  DataRecord rb = synthesize_data(qb, in, Scenario::C0);
  double dmax = 0;
  for (std::size_t i = 0; i < ra.outputs.get_final_value().v.size(); ++i)
    dmax = std::max(dmax, std::abs(ra.outputs.get_final_value().v[i] -
                                   rb.outputs.get_final_value().v[i]));
  for (int f = 0; f < face_count(g); ++f)
    for (int k = 0; k < g.nt; ++k)
      for (std::int64_t node = 0; node < face_nodes(g); ++node)
        dmax = std::max(dmax, std::abs(ra.outputs.get_neumann().at(f, k, node) -
                                       rb.outputs.get_neumann().at(f, k, node)));
  CHECK(dmax == 0.0);
  CHECK(ra.source_id != rb.source_id);
}

TEST_CASE("batch map returns results in input order") {
  Grid g = Grid::with_cfl(2, 1.0, 1.0, 16);
  PotentialField q = zero_potential(g);
  std::vector<SolveInputs<double>> batch;
  for (int j = 0; j < 5; ++j) {
    SolveInputs<double> in = SolveInputs<double>::zero(g);
    for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
      auto ix = g.sunflatten(sid);
      if (!g.on_spatial_boundary(ix)) in.v1.at(sid) = double(j + 1);
    }
    batch.push_back(in);
  }
  auto sols = solve_batch(q, batch, 2);
  for (int j = 0; j < 5; ++j) {
    double expect = double(j + 1);
    // u ~ t * v1 early on
    CHECK(sols[j].u.at(1, g.sindex({g.nx / 2, g.nx / 2, 0})) ==
          doctest::Approx(expect * g.dt).epsilon(1e-6));
  }
}
