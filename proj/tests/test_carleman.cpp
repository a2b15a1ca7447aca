#include <doctest.h>

#include "wavecal/carleman.hpp"

using namespace wavecal;

namespace {

Grid carl_grid(int nx = 24, double T = 1.5) { return Grid::with_cfl(2, 1.0, T, nx); }

}  // namespace

TEST_CASE("interior ratio study without potential") {
  Grid g = carl_grid();
  Direction omega = angle_direction(0.6);
  TestFunctionCorpus corpus = make_interior_corpus(g, 6, 101);
  std::vector<double> lambdas = {8, 16, 32, 64};
  CarlemanReport rep = check_interior(corpus, g, omega, lambdas, nullptr, +1, 3.0, "c44");
  CHECK(rep.pass);
  CHECK(rep.band <= 3.0);
  for (double m : rep.max_ratio) CHECK(m > 0.0);
  for (const auto& r : rep.rows) {
    if (!r.skipped) {
      CHECK(std::isfinite(r.ratio));
      CHECK_FALSE(r.violation);
    }
  }
}

TEST_CASE("interior ratio study absorbs a potential") {
  Grid g = carl_grid();
  Direction omega = angle_direction(2.3);
  TestFunctionCorpus corpus = make_interior_corpus(g, 5, 55);
  std::vector<double> lambdas = {8, 16, 32, 64};
  PotentialField q = space_singular_potential(g, 1.0, 0.3, 3.5);
  CarlemanReport with_q = check_interior(corpus, g, omega, lambdas, &q, +1, 3.0, "c45");
  CHECK(with_q.pass);
  // the q-perturbation washes out as lambda grows
  CarlemanReport no_q = check_interior(corpus, g, omega, lambdas, nullptr, +1, 3.0, "c44");
  double gap_lo = std::abs(with_q.max_ratio.front() - no_q.max_ratio.front());
  double gap_hi = std::abs(with_q.max_ratio.back() - no_q.max_ratio.back());
  CHECK(gap_hi <= gap_lo + 1e-12);

  // opposite conjugation branch
  CarlemanReport neg = check_interior(corpus, g, omega, lambdas, &q, -1, 3.0, "l45");
  CHECK(neg.pass);
}

TEST_CASE("zero field is skipped, not a violation") {
  Grid g = carl_grid(16);
  TestFunctionCorpus corpus;
  corpus.fields.push_back(ComplexField(g));
  CarlemanReport rep =
      check_interior(corpus, g, angle_direction(0.0), {8, 16, 32, 64}, nullptr, +1, 3.0);
  for (const auto& r : rep.rows) {
    CHECK(r.skipped);
    CHECK_FALSE(r.violation);
  }
}

TEST_CASE("spatial-metric ratio studies") {
  Grid g = carl_grid();
  Direction omega = angle_direction(1.0);
  TestFunctionCorpus corpus = make_spatial_corpus(g, 5, 77);
  std::vector<double> lambdas = {8, 16, 32, 64};
  PotentialField q = bump_potential(g, 2.0, 0.3, 0.3);
  CarlemanReport c56 = check_spatial(corpus, g, omega, lambdas, &q, false, 3.0, "c56");
  CHECK(c56.pass);
  CarlemanReport c58 = check_spatial(corpus, g, omega, lambdas, nullptr, true, 3.0, "c58");
  CHECK(c58.pass);

  // corpus violating the trace conditions is rejected
  TestFunctionCorpus bad;
  bad.fields.push_back(ComplexField(g, cplx(1, 0)));
  CHECK_THROWS_AS(check_spatial(bad, g, omega, lambdas, nullptr, false), Error);
}

TEST_CASE("boundary estimate on driven solves") {
  Grid g = carl_grid(24);
  Direction omega = angle_direction(0.4);
  PotentialField q = bump_potential(g, 2.0, 0.3, 0.3);
  BumpSpec bs = centered_bump(g, 1.0, 0.25, 0.25);
  SolveInputs<double> in = SolveInputs<double>::zero(g);
  in.forcing = sample_bump(g, bs);
  in.has_forcing = true;
  WaveField<double> sol = solve_ibvp(q, in);

  BoundaryCheck c16 = check_boundary(sol.u, q, omega, 16.0);
  CHECK(std::isfinite(c16.ratio));
  CHECK(c16.ratio > 0.0);
  CHECK(c16.terms.lhs() > 0.0);
  CHECK(c16.terms.rhs() > 0.0);
  // doubling lambda cannot grow the ratio by more than 2x
  BoundaryCheck c32 = check_boundary(sol.u, q, omega, 32.0);
  CHECK(c32.ratio <= 2.0 * c16.ratio);

  // all seven integrals finite and nonnegative
  for (double v : {c16.terms.final_rate, c16.terms.shadow_neumann, c16.terms.interior,
                   c16.terms.source, c16.terms.final_value, c16.terms.final_grad,
                   c16.terms.lit_neumann}) {
    CHECK(std::isfinite(v));
    CHECK(v >= 0.0);
  }

  // zero field: both sides vanish
  RealField zero(g);
  BoundaryCheck cz = check_boundary(zero, q, omega, 16.0);
  CHECK(cz.terms.lhs() == 0.0);
  CHECK(cz.terms.rhs() == 0.0);

  // nonzero trace rejected
  RealField bad(g, 1.0);
  CHECK_THROWS_AS(check_boundary(bad, q, omega, 16.0), Error);
}

TEST_CASE("boundary weights stay ranged at large lambda") {
  Grid g = carl_grid(16);
  Direction omega = angle_direction(3.6);  // negative components stress the range
  PotentialField q = zero_potential(g);
  BumpSpec bs = centered_bump(g, 1.0, 0.3, 0.3);
  SolveInputs<double> in = SolveInputs<double>::zero(g);
  in.forcing = sample_bump(g, bs);
  in.has_forcing = true;
  WaveField<double> sol = solve_ibvp(q, in);
  BoundaryCheck c = check_boundary(sol.u, q, omega, 64.0);
  CHECK(std::isfinite(c.terms.lhs()));
  CHECK(std::isfinite(c.terms.rhs()));
  CHECK(c.terms.rhs() > 0.0);
  CHECK(std::isfinite(c.ratio));
}
