#ifndef WAVECAL_INVERT_HPP
#define WAVECAL_INVERT_HPP

#include <map>

#include "wavecal/sampling.hpp"
#include "wavecal/sobolev.hpp"

namespace wavecal {

struct SliceSample {
  Freq xi;       // plan frequency on the hyperplane
  Freq xi_eff;   // node the estimate actually approximates (grid dispersion)
  cplx value{};
  double lambda = 0.0;
  int omega_index = 0;
};

/// Estimated transform values on the hyperplane cone, with the lambda used
/// per sample. The band limit bounds every stored frequency.
struct FourierSliceSet {
  std::vector<SliceSample> samples;
  double xi_max = 0.0;

  void add(const Freq& xi, cplx value, double lambda, int omega_index) {
    samples.push_back(SliceSample{xi, xi, value, lambda, omega_index});
  }
  void add_eff(const Freq& xi, const Freq& xi_eff, cplx value, double lambda,
               int omega_index) {
    samples.push_back(SliceSample{xi, xi_eff, value, lambda, omega_index});
  }
};

struct InvertResult {
  RealField q_est;
  double imag_residue = 0.0;
  bool imag_warning = false;
  std::int64_t bins_filled = 0;
  std::int64_t duplicate_hits = 0;
};

/// Grids the samples onto the padded-box frequency lattice (nearest bin,
/// duplicates averaged, conjugate mirror enforced for a real target),
/// zero-fills everything unsampled and inverts. The imaginary residue of
/// the restriction is discarded; residues beyond 1e-6 of scale raise the
/// warning flag.
inline InvertResult invert(const FourierSliceSet& set, const Grid& g) {
  if (set.samples.empty()) throw Error("invert: empty sample set");
  PadBox box = PadBox::make(g, SobolevMode::SpaceTime, BoxPadding::Pad2x);
  auto steps = plandetail::dual_steps(g);

  std::vector<cplx> acc(box.total(), cplx(0, 0));
  std::vector<double> cnt(box.total(), 0.0);
  auto fold = [&](long k, int axis) {
    int d = box.dims[axis];
    long m = ((k % d) + d) % d;
    return static_cast<std::int64_t>(m);
  };
  auto deposit = [&](long kt, long k1, long k2, cplx v) {
    if (std::abs(kt) >= box.dims[0] / 2 || std::abs(k1) >= box.dims[1] / 2 ||
        std::abs(k2) >= box.dims[2] / 2)
      return;
    std::int64_t off = (fold(kt, 0) * box.dims[1] + fold(k1, 1)) * box.dims[2] + fold(k2, 2);
    acc[off] += v;
    cnt[off] += 1.0;
  };
  for (const SliceSample& s : set.samples) {
    long kt = std::lround(s.xi_eff.t / steps[0]);
    long k1 = std::lround(s.xi_eff.x[0] / steps[1]);
    long k2 = std::lround(s.xi_eff.x[1] / steps[1]);
    // demodulate to the cylinder center so the gridded transform varies on
    // the scale of the support half-width rather than the center offset
    double phase = s.xi_eff.t * 0.5 * g.T;
    for (int a = 0; a < g.n; ++a) phase += s.xi_eff.x[a] * 0.5 * g.L;
    cplx v = s.value * cplx(std::cos(phase), std::sin(phase));
    deposit(kt, k1, k2, v);
    deposit(-kt, -k1, -k2, std::conj(v));
  }

  InvertResult out;
  const double dv = g.cell_volume() * g.dt;
  const double scale = std::pow(2.0 * kPi, 0.5 * (g.n + 1)) / dv;
  std::int64_t filled = 0, dups = 0;
  std::vector<int> idx(box.dims.size(), 0);
  for (std::int64_t i = 0; i < box.total(); ++i) {
    if (cnt[i] > 0) {
      // undo the center demodulation at the bin frequency
      double phase = -box.freq(0, idx[0]) * 0.5 * g.T;
      for (std::size_t a = 1; a < box.dims.size(); ++a)
        phase -= box.freq(static_cast<int>(a), idx[a]) * 0.5 * g.L;
      acc[i] *= cplx(std::cos(phase), std::sin(phase)) * (scale / cnt[i]);
      ++filled;
      if (cnt[i] > 1) ++dups;
    } else {
      // keep walking the index counter in step with i
    }
    for (int a = static_cast<int>(box.dims.size()) - 1; a >= 0; --a) {
      if (++idx[a] < box.dims[a]) break;
      idx[a] = 0;
    }
  }
  out.bins_filled = filled;
  out.duplicate_hits = dups;

  fft_nd(acc, box.dims, true);
  ComplexField qc(g);
  detail::restrict_from_c(acc, box, qc);
  double max_abs = linf_norm(qc);
  out.q_est = real_part(qc, &out.imag_residue);
  out.imag_warning = out.imag_residue > 1e-6 * std::max(1e-300, max_abs);
  return out;
}

/// Restriction of a sampled potential to the cone-and-band region the slice
/// sweep can reach: the irreducible floor of any reconstruction from these
/// samples.
inline RealField cone_band_project(const RealField& q, double xi_max) {
  const Grid& g = q.grid;
  PadBox box = PadBox::make(g, SobolevMode::SpaceTime, BoxPadding::Pad2x);
  std::vector<cplx> buf;
  detail::pad_into(to_complex(q), box, buf);
  fft_nd(buf, box.dims, false);
  std::vector<int> idx(box.dims.size(), 0);
  for (std::int64_t off = 0; off < box.total(); ++off) {
    double zt = box.freq(0, idx[0]);
    double zx = 0.0;
    for (std::size_t a = 1; a < box.dims.size(); ++a) {
      double z = box.freq(static_cast<int>(a), idx[a]);
      zx += z * z;
    }
    zx = std::sqrt(zx);
    bool keep = std::abs(zt) <= zx && std::sqrt(zt * zt + zx * zx) <= xi_max;
    if (!keep) buf[off] = cplx(0, 0);
    for (int a = static_cast<int>(box.dims.size()) - 1; a >= 0; --a) {
      if (++idx[a] < box.dims[a]) break;
      idx[a] = 0;
    }
  }
  fft_nd(buf, box.dims, true);
  ComplexField qc(g);
  detail::restrict_from_c(buf, box, qc);
  return real_part(qc);
}

/// Smoothly tapered variant: multiplier 1 deep inside the cone-and-band
/// region, rolled off to 0 at its edge, so the filtered field stays sharply
/// localized and survives restriction to Q essentially band-limited.
inline RealField cone_band_mollify(const RealField& q, double xi_max,
                                   double band_knee = 0.7, double cone_knee = 0.75) {
  const Grid& g = q.grid;
  PadBox box = PadBox::make(g, SobolevMode::SpaceTime, BoxPadding::Pad2x);
  std::vector<cplx> buf;
  detail::pad_into(to_complex(q), box, buf);
  fft_nd(buf, box.dims, false);
  std::vector<int> idx(box.dims.size(), 0);
  for (std::int64_t off = 0; off < box.total(); ++off) {
    double zt = box.freq(0, idx[0]);
    double zx = 0.0;
    for (std::size_t a = 1; a < box.dims.size(); ++a) {
      double z = box.freq(static_cast<int>(a), idx[a]);
      zx += z * z;
    }
    zx = std::sqrt(zx);
    double r = std::sqrt(zt * zt + zx * zx);
    double wband = 1.0 - smoothstep5((r / xi_max - band_knee) / (1.0 - band_knee));
    double c = std::abs(zt) / std::max(zx, 1e-12);
    double wcone = r == 0.0 ? 1.0 : 1.0 - smoothstep5((c - cone_knee) / (1.0 - cone_knee));
    buf[off] *= wband * wcone;
    for (int a = static_cast<int>(box.dims.size()) - 1; a >= 0; --a) {
      if (++idx[a] < box.dims[a]) break;
      idx[a] = 0;
    }
  }
  fft_nd(buf, box.dims, true);
  ComplexField qc(g);
  detail::restrict_from_c(buf, box, qc);
  return real_part(qc);
}

/// Potential whose spectrum is confined to the reachable cone-and-band
/// region, built by mollifying a base field with the smooth roll-off. The
/// natural ground truth for end-to-end reconstruction studies.
inline PotentialField cone_band_target(const PotentialField& base, double xi_limit) {
  return PotentialField(cone_band_mollify(base.q, xi_limit), base.p1, base.p2);
}

}  // namespace wavecal

#endif
