#ifndef WAVECAL_EXP_PROBE_HPP
#define WAVECAL_EXP_PROBE_HPP

#include "wavecal/remainder_ls.hpp"

namespace wavecal {

namespace expdetail {

/// Envelope time frequency matched to the conjugated stencil so the
/// transport part of the symbol vanishes at the envelope's own frequency.
inline double matched_envelope_freq(const Grid& g, const Direction& omega, double lambda,
                                    double rate_t, const Freq& xi) {
  double sx = 0.0;
  for (int a = 0; a < g.n; ++a)
    sx += std::sinh(lambda * omega[a] * g.dx) * std::sin(xi.x[a] * g.dx) / (g.dx * g.dx);
  double denom = std::sinh(rate_t * g.dt) / (g.dt * g.dt);
  double s = sx / denom;  // = sin(xi_hat_t * dt)
  if (std::abs(s) >= 1.0) throw Error("exp probe: envelope frequency beyond grid range");
  return std::asin(s) / g.dt;
}

inline ComplexField sample_plane(const Grid& g, double xt, const Freq& xi) {
  ComplexField f(g);
  for (int k = 0; k < g.nt; ++k) {
    double pt = -xt * g.time(k);
    for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
      auto ix = g.sunflatten(sid);
      double ph = pt;
      for (int a = 0; a < g.n; ++a) ph -= xi.x[a] * g.coord(ix[a]);
      f.at(k, sid) = cplx(std::cos(ph), std::sin(ph));
    }
  }
  return f;
}

inline double weight_phase(const Grid& g, const Direction& omega, double rate_t,
                           double lambda, int k, const std::array<int, kMaxDim>& ix) {
  double ph = rate_t * g.time(k);
  for (int a = 0; a < g.n; ++a) ph += lambda * omega[a] * g.coord(ix[a]);
  return ph;
}

}  // namespace expdetail

/// Exponentially decaying probe  u = exp(-(r t + lambda x.omega)) (env + w)
/// with env = exp(-i (t,x).xi_hat), xi on the hyperplane xi.(1,-omega) = 0.
/// The remainder solves the conjugated least-squares problem with source
/// F = -(P + q) env formed discretely, so the assembled field satisfies the
/// discrete wave equation up to the reported CG residual.
inline GOProbe build_decaying_probe(const PotentialField& q1, const Direction& omega,
                                    double lambda, const Freq& xi, double lambda_min = 8.0,
                                    const RemainderOptions& base_opts = RemainderOptions{}) {
  const Grid& g = q1.grid();
  if (std::abs(xi.plane_residual(g, omega)) > 1e-12)
    throw Error("build_decaying_probe: xi.(1,-omega) != 0");
  if (!(lambda >= lambda_min)) throw Error("build_decaying_probe: lambda below lambda_min");

  GOProbe probe;
  probe.family = ProbeFamily::Exponential;
  probe.omega = omega;
  probe.lambda = lambda;
  probe.xi = xi;
  probe.has_xi = true;
  probe.weight_sign = -1;
  probe.rate_t = matched_exponential_rate(g, omega, lambda);

  WeightParams wp = WeightParams::make(g, omega, lambda, -1);
  RemainderOptions opts = base_opts;
  opts.rate_t = probe.rate_t;
  ConjugationRates rates = ConjugationRates::from_weight(g, wp, probe.rate_t);

  double xt_hat = expdetail::matched_envelope_freq(g, omega, lambda, probe.rate_t, xi);
  ComplexField env = expdetail::sample_plane(g, xt_hat, xi);

  std::int64_t clamped = 0;
  double cap = 0;
  RealField qc = clamped_potential(q1, &clamped, &cap);

  ConjugatedSource src;
  src.params = wp;
  src.F = ComplexField(g);
  conjugated_apply_rates(env, rates, src.F);
  for (std::size_t i = 0; i < src.F.v.size(); ++i)
    src.F.v[i] = -(src.F.v[i] + qc.v[i] * env.v[i]);

  probe.w = build_remainder(q1, wp, src, RemainderConstraint::None, &probe.cg, opts);

  probe.principal = ComplexField(g);
  probe.u = ComplexField(g);
  probe.remainder = ComplexField(g);
  for (int k = 0; k < g.nt; ++k)
    for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
      auto ix = g.sunflatten(sid);
      double e = std::exp(-expdetail::weight_phase(g, omega, probe.rate_t, lambda, k, ix));
      probe.principal.at(k, sid) = e * env.at(k, sid);
      probe.remainder.at(k, sid) = e * probe.w.at(k, sid);
      probe.u.at(k, sid) = probe.principal.at(k, sid) + probe.remainder.at(k, sid);
    }
  probe.residual_l2 = dalembert_interior_residual<cplx>(probe.u, qc, nullptr);
  probe.residual_scale = l2_norm(probe.u);
  return probe;
}

/// Exponentially growing probe  u = exp(r t + lambda x.omega) (1 + w), or the
/// zero-initial-trace variant
///   u = exp(r t + lambda x.omega)(1 + w) - exp(-r t + lambda x.omega)
/// whose two carriers cancel at t = 0; w then carries w(0,.) = 0 as a hard
/// constraint and the least squares runs in the per-slice spatial metric.
inline GOProbe build_growing_probe(const PotentialField& q2, const Direction& omega,
                                   double lambda, bool zero_init, double lambda_min = 8.0,
                                   const RemainderOptions& base_opts = RemainderOptions{}) {
  const Grid& g = q2.grid();
  if (!(lambda >= lambda_min)) throw Error("build_growing_probe: lambda below lambda_min");

  GOProbe probe;
  probe.family = ProbeFamily::Exponential;
  probe.anchor = TimeAnchor::T0;
  probe.omega = omega;
  probe.lambda = lambda;
  probe.has_xi = false;
  probe.weight_sign = +1;
  probe.zero_init = zero_init;
  probe.rate_t = matched_exponential_rate(g, omega, lambda);

  WeightParams wp = WeightParams::make(g, omega, lambda, +1);
  RemainderOptions opts = base_opts;
  opts.rate_t = probe.rate_t;
  ConjugationRates rates = ConjugationRates::from_weight(g, wp, probe.rate_t);

  std::int64_t clamped = 0;
  double cap = 0;
  RealField qc = clamped_potential(q2, &clamped, &cap);

  // F = -(P + q) 1            (growing)
  // F = -(P + q)(1 - exp(-2 r t))   (zero-initial variant, conjugated form)
  ComplexField env(g, cplx(1, 0));
  ConjugatedSource src;
  src.params = wp;
  src.F = ComplexField(g);
  conjugated_apply_rates(env, rates, src.F);
  for (std::size_t i = 0; i < src.F.v.size(); ++i)
    src.F.v[i] = -(src.F.v[i] + qc.v[i]);
  if (zero_init) {
    ComplexField refl(g);
    for (int k = 0; k < g.nt; ++k) {
      double e = std::exp(-2.0 * probe.rate_t * g.time(k));
      for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) refl.at(k, sid) = e;
    }
    ComplexField Pr(g);
    conjugated_apply_rates(refl, rates, Pr);
    for (std::size_t i = 0; i < src.F.v.size(); ++i)
      src.F.v[i] += Pr.v[i] + qc.v[i] * refl.v[i];
  }

  probe.w = build_remainder(q2, wp, src,
                            zero_init ? RemainderConstraint::ZeroInitialTrace
                                      : RemainderConstraint::None,
                            &probe.cg, opts);

  probe.principal = ComplexField(g);
  probe.u = ComplexField(g);
  probe.remainder = ComplexField(g);
  for (int k = 0; k < g.nt; ++k)
    for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
      auto ix = g.sunflatten(sid);
      double ph = expdetail::weight_phase(g, omega, probe.rate_t, lambda, k, ix);
      double e = std::exp(ph);
      cplx principal = e;
      if (zero_init) principal -= std::exp(ph - 2.0 * probe.rate_t * g.time(k));
      probe.principal.at(k, sid) = principal;
      probe.remainder.at(k, sid) = e * probe.w.at(k, sid);
      probe.u.at(k, sid) = principal + probe.remainder.at(k, sid);
    }
  probe.residual_l2 = dalembert_interior_residual<cplx>(probe.u, qc, nullptr);
  probe.residual_scale = l2_norm(probe.u);
  return probe;
}

/// Data-solve inputs reproducing an exponential probe, mirroring the
/// oscillating helper: the start rate is made leapfrog-consistent.
inline SolveInputs<cplx> exp_probe_tau0(const GOProbe& probe) {
  return probe_tau0(probe);
}

}  // namespace wavecal

#endif
