#include <doctest.h>

#include <random>

#include "wavecal/fourier.hpp"
#include "wavecal/masks.hpp"
#include "wavecal/norms.hpp"
#include "wavecal/potentials.hpp"
#include "wavecal/sobolev.hpp"

using namespace wavecal;

namespace {

Grid small_grid(int nx = 24, double T = 1.0, double L = 1.0) {
  return Grid::with_cfl(2, L, T, nx);
}

}  // namespace

TEST_CASE("grid invariants") {
  Grid g = Grid::make(2, 1.0, 1.0, 16, 32);
  CHECK(g.dx == doctest::Approx(1.0 / 15));
  CHECK(g.diameter() == doctest::Approx(std::sqrt(2.0)));
  CHECK(g.diameter() > 0.0);
  CHECK_THROWS_AS(Grid::make(2, 1.0, 1.0, 16, 8), Error);   // CFL
  CHECK_THROWS_AS(Grid::make(2, 1.0, 1.0, 4, 64), Error);   // nx too small
  Grid gc = Grid::with_cfl(2, 1.0, 2.0, 48);
  CHECK(gc.dt <= gc.dx / std::sqrt(2.0) * (1 + 1e-12));
  CHECK(is_smooth23(gc.nt));
}

TEST_CASE("fft roundtrip and parseval") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int n : {8, 48, 96, 27, 10}) {  // last one exercises bluestein
    std::vector<cplx> x(n), y;
    for (auto& v : x) v = cplx(u(rng), u(rng));
    y = x;
    fftdetail::fft_1d(y.data(), n, false);
    double sum_t = 0, sum_f = 0;
    for (int i = 0; i < n; ++i) sum_t += std::norm(x[i]);
    for (int i = 0; i < n; ++i) sum_f += std::norm(y[i]);
    CHECK(sum_f == doctest::Approx(n * sum_t).epsilon(1e-10));
    fftdetail::fft_1d(y.data(), n, true);
    for (int i = 0; i < n; ++i) CHECK(std::abs(y[i] - x[i]) < 1e-10);
  }
  // known DFT: single mode
  int n = 48;
  std::vector<cplx> x(n);
  for (int i = 0; i < n; ++i) {
    double a = 2.0 * kPi * 5 * i / n;
    x[i] = cplx(std::cos(a), std::sin(a));
  }
  fftdetail::fft_1d(x.data(), n, false);
  for (int k = 0; k < n; ++k) {
    double expect = (k == 5) ? n : 0.0;
    CHECK(std::abs(x[k] - cplx(expect, 0)) < 1e-9);
  }
}

TEST_CASE("mixed norm basics") {
  Grid g = small_grid(32);
  CHECK(mixed_norm(zero_potential(g)) == doctest::Approx(0.0));
  // unit constant on unit measure box, p1 = p2 = 2
  PotentialField one(RealField(g, 1.0), 2.0, 2.0);
  CHECK(mixed_norm(one) == doctest::Approx(1.0).epsilon(1e-12));
  // non-finite rejected
  PotentialField bad = zero_potential(g);
  bad.q.v[10] = kInf;
  CHECK_THROWS_WITH_AS(mixed_norm(bad), "mixed_norm: field not integrable", Error);
}

TEST_CASE("mixed norm radial singular potential vs analytic value") {
  // |x - xc|^(-1/2) over the disk r < R: int = 4 pi sqrt(R); p2 = 3 gives
  // (int r^(-3/2) r dr dtheta)^(1/3) per slice, constant over half the times.
  Grid g = Grid::with_cfl(2, 1.0, 1.0, 128);
  double R = 0.3;
  PotentialField pf = space_singular_potential(g, 1.0, R, 3.0);
  pf.p1 = kInf;
  double slice = std::pow(4.0 * kPi * std::sqrt(R), 1.0 / 3.0);
  CHECK(mixed_norm(pf) == doctest::Approx(slice).epsilon(0.02));
}

TEST_CASE("mixed norm triangle inequality on random pairs") {
  Grid g = small_grid(16);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_real_distribution<double> pe(1.0, 4.0);
  for (int trial = 0; trial < 100; ++trial) {
    double p1 = pe(rng), p2 = pe(rng);
    RealField a(g), b(g);
    for (auto& x : a.v) x = u(rng);
    for (auto& x : b.v) x = u(rng);
    RealField c = a;
    c += b;
    double na = mixed_norm(PotentialField(a, p1, p2));
    double nb = mixed_norm(PotentialField(b, p1, p2));
    double nc = mixed_norm(PotentialField(c, p1, p2));
    CHECK(nc <= na + nb + 1e-10);
  }
}

TEST_CASE("energy of analytic standing profile") {
  // u = sin(pi x1) sin(pi t) sqrt(2)/pi on the unit square: E(t) = 1 for all t
  Grid g = Grid::with_cfl(2, 1.0, 1.0, 128);
  RealField u(g);
  for (int k = 0; k < g.nt; ++k) {
    double ft = std::sin(kPi * g.time(k)) * std::sqrt(2.0) / kPi;
    for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
      auto ix = g.sunflatten(sid);
      u.at(k, sid) = ft * std::sin(kPi * g.coord(ix[0]));
    }
  }
  CHECK(energy(u, 0) == doctest::Approx(1.0).epsilon(0.01));
  CHECK(energy(u, g.nt / 2) == doctest::Approx(1.0).epsilon(0.01));
  RealField z(g);
  CHECK(energy(z, 0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(energy(z, g.nt), Error);
}

TEST_CASE("sobolev lambda norm: parseval at m = 0") {
  Grid g = small_grid(24);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  ComplexField f(g);
  for (auto& v : f.v) v = cplx(u(rng), u(rng));
  double l2 = l2_norm(f);
  for (auto pad : {BoxPadding::Pad2x, BoxPadding::AsPeriodic}) {
    double s = sobolev_lambda_norm(f, 0.0, 5.0, SobolevMode::SpaceTime, pad);
    CHECK(s == doctest::Approx(l2).epsilon(1e-10));
  }
  double s = sobolev_lambda_norm(f, 0.0, 5.0, SobolevMode::SpaceOnly, BoxPadding::Pad2x);
  CHECK(s == doctest::Approx(l2).epsilon(1e-10));
}

TEST_CASE("sobolev lambda norm: single lattice mode diagonal") {
  Grid g = small_grid(24);
  // pure mode of the field's own periodic box
  int kt = 3, k1 = 2, k2 = 5;
  double zt = 2.0 * kPi * kt / (g.nt * g.dt);
  double z1 = 2.0 * kPi * k1 / (g.nx * g.dx);
  double z2 = 2.0 * kPi * k2 / (g.nx * g.dx);
  ComplexField f(g);
  for (int k = 0; k < g.nt; ++k)
    for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
      auto ix = g.sunflatten(sid);
      double ph = zt * g.time(k) + z1 * g.coord(ix[0]) + z2 * g.coord(ix[1]);
      f.at(k, sid) = cplx(std::cos(ph), std::sin(ph));
    }
  double lambda = 10.0;
  double k2norm = zt * zt + z1 * z1 + z2 * z2;
  double expect = l2_norm(f) * std::pow(k2norm + lambda * lambda, -0.5);
  double got = sobolev_lambda_norm(f, -1.0, lambda, SobolevMode::SpaceTime,
                                   BoxPadding::AsPeriodic);
  CHECK(got == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("sobolev lambda norm: large-lambda asymptote and monotonicity") {
  Grid g = small_grid(16);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  ComplexField f(g);
  // smooth-ish bump so the asymptote kicks in early
  for (int k = 0; k < g.nt; ++k)
    for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
      auto ix = g.sunflatten(sid);
      f.at(k, sid) = bump_profile((g.coord(ix[0]) - 0.5) / 0.3) *
                     bump_profile((g.coord(ix[1]) - 0.5) / 0.3) *
                     bump_profile((g.time(k) - 0.5) / 0.3);
    }
  double lambda = 1e3;
  double got = sobolev_lambda_norm(f, -1.0, lambda);
  CHECK(got == doctest::Approx(l2_norm(f) / lambda).epsilon(0.01));
  // monotone: decreasing in lambda for m < 0, increasing for m > 0
  double lo_m_neg = sobolev_lambda_norm(f, -1.0, 4.0);
  double hi_m_neg = sobolev_lambda_norm(f, -1.0, 16.0);
  CHECK(hi_m_neg < lo_m_neg);
  double lo_m_pos = sobolev_lambda_norm(f, 1.0, 4.0);
  double hi_m_pos = sobolev_lambda_norm(f, 1.0, 16.0);
  CHECK(hi_m_pos > lo_m_pos);
}

TEST_CASE("fourier oracle: zero, mean, gaussian, symmetry") {
  Grid g = Grid::with_cfl(2, 1.0, 1.0, 48);
  CHECK(std::abs(fourier_oracle(zero_potential(g), Freq{})) == 0.0);

  PotentialField pf = gaussian_potential(g, 1.0, 0.08, 0.08);
  // zero frequency = normalized mean
  cplx at0 = fourier_oracle(pf, Freq{});
  cplx mean = integral_q_trap(to_complex(pf.q)) * std::pow(2 * kPi, -1.5);
  CHECK(std::abs(at0 - mean) < 1e-14);

  // separable gaussian: product of 1-d transforms
  Freq xi;
  xi.t = 4.0;
  xi.x = {7.0, -3.0, 0.0};
  auto g1d = [](double sigma, double center, double z) {
    double mag = sigma * std::sqrt(2.0 * kPi) * std::exp(-0.5 * sigma * sigma * z * z);
    return cplx(mag * std::cos(z * center), -mag * std::sin(z * center));
  };
  cplx expect = g1d(0.08, 0.5, xi.t) * g1d(0.08, 0.5, xi.x[0]) * g1d(0.08, 0.5, xi.x[1]) *
                std::pow(2 * kPi, -1.5);
  cplx got = fourier_oracle(pf, xi);
  CHECK(std::abs(got - expect) < 1e-4);

  // conjugate symmetry for real q
  cplx neg = fourier_oracle(pf, xi.negated(g.n));
  CHECK(std::abs(neg - std::conj(got)) < 1e-12);

  Freq out_of_band;
  out_of_band.t = 2.0 * kPi / g.dt;
  CHECK_THROWS_AS(fourier_oracle(pf, out_of_band), Error);
}

TEST_CASE("boundary partition on the unit square") {
  Grid g = small_grid(24);
  Direction omega = unit_direction(g, {1.0, 0.0});
  BoundaryMask m = boundary_partition(g, omega, 0.0);
  // right face (axis 0, side 1) is the only shadowed one
  CHECK(m.face_shadowed[face_id(Face{0, 1})]);
  CHECK_FALSE(m.face_shadowed[face_id(Face{0, 0})]);
  CHECK_FALSE(m.face_shadowed[face_id(Face{1, 0})]);
  CHECK_FALSE(m.face_shadowed[face_id(Face{1, 1})]);

  // same partition at eps = 0.5 (face normals give nu.omega in {-1,0,1})
  BoundaryMask m2 = boundary_partition(g, omega, 0.5);
  for (int f = 0; f < face_count(g); ++f) CHECK(m.face_shadowed[f] == m2.face_shadowed[f]);

  // node-exact partition of the boundary
  std::int64_t plus = 0, minus = 0, total = 0;
  m.partition_counts(plus, minus);
  for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid)
    if (g.on_spatial_boundary(g.sunflatten(sid))) ++total;
  CHECK(plus + minus == total);

  // eps beyond max nu.omega leaves nothing shadowed
  CHECK_THROWS_WITH_AS(boundary_partition(g, omega, 1.5),
                       "boundary_partition: empty shadowed set", Error);

  // V contains every illuminated face
  CHECK(mask_covers_illuminated(m, omega));
  // and a tilted direction with the same illuminated set is covered too
  Direction tilted = unit_direction(g, {1.0, 0.2});
  CHECK(mask_covers_illuminated(m, tilted));
}

TEST_CASE("boundary partition node-exactness across directions") {
  Grid g = small_grid(16);
  std::int64_t total = 0;
  for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid)
    if (g.on_spatial_boundary(g.sunflatten(sid))) ++total;
  for (double th : {0.1, 0.7, 1.9, 3.0, 4.5, 5.9}) {
    BoundaryMask m = boundary_partition(g, angle_direction(th), 0.0);
    std::int64_t plus = 0, minus = 0;
    m.partition_counts(plus, minus);
    CHECK(plus + minus == total);
  }
}
