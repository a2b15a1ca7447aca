#ifndef WAVECAL_REMAINDER_LS_HPP
#define WAVECAL_REMAINDER_LS_HPP

#include "wavecal/conjugated.hpp"
#include "wavecal/go_probe.hpp"
#include "wavecal/sobolev.hpp"

namespace wavecal {

/// Right-hand side of a conjugated remainder equation P w + q w = F.
struct ConjugatedSource {
  ComplexField F;
  WeightParams params;
};

enum class RemainderConstraint { None, ZeroInitialTrace };

struct RemainderOptions {
  double mu_scale = 1e-8;   // Tikhonov weight mu = mu_scale * lambda^2
  int max_iterations = 500;
  double tolerance = 1e-6;  // relative residual target on the normal equations
  double rate_t = -1.0;     // matched time rate; < 0 means use lambda
};

namespace lsdetail {

/// Diagonal spectral preconditioner: inverse of the constant-coefficient
/// normal-operator symbol |S|^2 w_B + mu on the 2x padded box.
class Preconditioner {
 public:
  Preconditioner(const Grid& g, const ConjugationRates& rates, double lambda, double mu,
                 SobolevMode mode)
      : box_(PadBox::make(g, SobolevMode::SpaceTime, BoxPadding::Pad2x)) {
    inv_.resize(box_.total());
    std::vector<int> idx(box_.dims.size(), 0);
    for (std::int64_t off = 0; off < box_.total(); ++off) {
      cplx S(0, 0);
      double zt = box_.freq(0, idx[0]);
      S += (2.0 * std::cosh(cplx(rates.t * g.dt, zt * g.dt)) - 2.0) / (g.dt * g.dt);
      double wden = lambda * lambda;
      for (std::size_t a = 1; a < box_.dims.size(); ++a) {
        double zx = box_.freq(static_cast<int>(a), idx[a]);
        S -= (2.0 * std::cosh(cplx(rates.x[a - 1] * g.dx, zx * g.dx)) - 2.0) /
             (g.dx * g.dx);
        wden += zx * zx;
      }
      if (mode == SobolevMode::SpaceTime) wden += zt * zt;
      inv_[off] = 1.0 / (std::norm(S) / wden + mu);
      for (int a = static_cast<int>(box_.dims.size()) - 1; a >= 0; --a) {
        if (++idx[a] < box_.dims[a]) break;
        idx[a] = 0;
      }
    }
  }

  void apply(const ComplexField& in, ComplexField& out) const {
    detail::pad_into(in, box_, buf_);
    fft_nd(buf_, box_.dims, false);
    for (std::int64_t i = 0; i < box_.total(); ++i) buf_[i] *= inv_[i];
    fft_nd(buf_, box_.dims, true);
    detail::restrict_from_c(buf_, box_, out);
  }

 private:
  PadBox box_;
  std::vector<double> inv_;
  mutable std::vector<cplx> buf_;
};

inline cplx dot(const ComplexField& a, const ComplexField& b) {
  cplx s(0, 0);
  for (std::size_t i = 0; i < a.v.size(); ++i) s += std::conj(a.v[i]) * b.v[i];
  return s;
}

inline void project_zero_initial(ComplexField& f) {
  const std::int64_t sp = f.grid.spatial_points();
  for (std::int64_t sid = 0; sid < sp; ++sid) f.v[sid] = cplx(0, 0);
}

/// Residual rows on the outermost shell (time endpoints and the spatial
/// boundary) use one-sided stencils whose consistency degrades like
/// lambda^4 h^2 on exponential carriers; the least squares fits the
/// equation on the centered rows only.
inline void mask_boundary_shell(ComplexField& f) {
  const Grid& g = f.grid;
  const std::int64_t sp = g.spatial_points();
  for (std::int64_t sid = 0; sid < sp; ++sid) {
    f.v[sid] = cplx(0, 0);
    f.v[static_cast<std::int64_t>(g.nt - 1) * sp + sid] = cplx(0, 0);
  }
  for (std::int64_t sid = 0; sid < sp; ++sid) {
    if (!g.on_spatial_boundary(g.sunflatten(sid))) continue;
    for (int k = 0; k < g.nt; ++k) f.v[static_cast<std::int64_t>(k) * sp + sid] = cplx(0, 0);
  }
}

}  // namespace lsdetail

/// Tikhonov-regularized least squares for the conjugated remainder:
///   minimize |P w + q w - F|^2 in the H^{-1}_lambda metric + mu |w|^2
/// by preconditioned CG on the normal equations. The H^{-1}_lambda Gram
/// operator is applied spectrally on the padded box (space-time metric for
/// unconstrained remainders, per-slice spatial metric for the zero-initial
/// variant). The constraint w(0,.) = 0 is eliminated exactly by projection.
inline ComplexField build_remainder(const PotentialField& q, const WeightParams& params,
                                    const ConjugatedSource& source,
                                    RemainderConstraint constraint, CgStats* stats = nullptr,
                                    const RemainderOptions& opts = RemainderOptions{}) {
  const Grid& g = q.grid();
  const double lambda = params.lambda;
  const double mu = opts.mu_scale * lambda * lambda;
  const SobolevMode mode = constraint == RemainderConstraint::ZeroInitialTrace
                               ? SobolevMode::SpaceOnly
                               : SobolevMode::SpaceTime;
  ConjugationRates rates = ConjugationRates::from_weight(g, params, opts.rate_t);

  std::int64_t clamped = 0;
  double cap = 0;
  RealField qc = clamped_potential(q, &clamped, &cap);

  SpectralWeight B(g, -1.0, lambda, mode);
  lsdetail::Preconditioner M(g, rates, lambda, mu, mode);
  const bool constrained = constraint == RemainderConstraint::ZeroInitialTrace;

  ComplexField t1(g), t2(g);
  auto apply_A = [&](const ComplexField& w, ComplexField& out) {
    conjugated_apply_rates(w, rates, out);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] += qc.v[i] * w.v[i];
  };
  auto apply_At = [&](const ComplexField& r, ComplexField& out) {
    conjugated_apply_rates_adjoint(r, rates, out);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] += qc.v[i] * r.v[i];
  };
  auto apply_N = [&](const ComplexField& w, ComplexField& out) {
    apply_A(w, t1);
    lsdetail::mask_boundary_shell(t1);
    B.apply(t1, t2);
    lsdetail::mask_boundary_shell(t2);
    apply_At(t2, out);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] += mu * w.v[i];
    if (constrained) lsdetail::project_zero_initial(out);
  };

  // b = A^T M B M F
  ComplexField b(g);
  t1 = source.F;
  lsdetail::mask_boundary_shell(t1);
  B.apply(t1, t2);
  lsdetail::mask_boundary_shell(t2);
  apply_At(t2, b);
  if (constrained) lsdetail::project_zero_initial(b);

  ComplexField x(g), r = b, z(g), p(g), Np(g);
  double bnorm = std::sqrt(std::abs(lsdetail::dot(b, b)));
  CgStats cg;
  if (bnorm == 0.0) {
    if (stats) *stats = cg;
    return x;
  }
  M.apply(r, z);
  if (constrained) lsdetail::project_zero_initial(z);
  p = z;
  double rz = lsdetail::dot(r, z).real();
  double rel = 1.0;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    apply_N(p, Np);
    double pNp = lsdetail::dot(p, Np).real();
    if (!(pNp > 0)) break;  // numerical loss of definiteness
    double alpha = rz / pNp;
    for (std::size_t i = 0; i < x.v.size(); ++i) x.v[i] += alpha * p.v[i];
    for (std::size_t i = 0; i < r.v.size(); ++i) r.v[i] -= alpha * Np.v[i];
    rel = std::sqrt(std::abs(lsdetail::dot(r, r))) / bnorm;
    if (rel <= opts.tolerance) {
      ++it;
      break;
    }
    M.apply(r, z);
    if (constrained) lsdetail::project_zero_initial(z);
    double rz_new = lsdetail::dot(r, z).real();
    double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < p.v.size(); ++i) p.v[i] = z.v[i] + beta * p.v[i];
  }
  cg.iterations = it;
  cg.relative_residual = rel;
  cg.converged = rel <= opts.tolerance;
  if (stats) *stats = cg;
  if (!cg.converged && rel > 1e-2)
    throw Error("remainder construction failed: CG residual " + std::to_string(rel));
  return x;
}

}  // namespace wavecal

#endif
