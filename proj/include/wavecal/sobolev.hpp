#ifndef WAVECAL_SOBOLEV_HPP
#define WAVECAL_SOBOLEV_HPP

#include <vector>

#include "wavecal/fft.hpp"
#include "wavecal/field.hpp"

namespace wavecal {

enum class SobolevMode { SpaceTime, SpaceOnly };
enum class BoxPadding { Pad2x, AsPeriodic };

/// Periodic box hosting zero-extended fields for spectral work. Time is axis
/// 0. With Pad2x every transformed axis doubles its node count, which keeps
/// the periodization error of compactly supported fields negligible.
struct PadBox {
  std::vector<int> dims;       // per-axis node counts, time first
  std::vector<double> spacing; // per-axis spacings
  std::vector<bool> transformed;
  Grid grid;

  static PadBox make(const Grid& g, SobolevMode mode, BoxPadding pad) {
    PadBox b;
    b.grid = g;
    const bool p2 = pad == BoxPadding::Pad2x;
    b.dims.push_back(mode == SobolevMode::SpaceTime && p2 ? 2 * g.nt : g.nt);
    b.spacing.push_back(g.dt);
    b.transformed.push_back(mode == SobolevMode::SpaceTime);
    for (int a = 0; a < g.n; ++a) {
      b.dims.push_back(p2 ? 2 * g.nx : g.nx);
      b.spacing.push_back(g.dx);
      b.transformed.push_back(true);
    }
    return b;
  }

  std::int64_t total() const {
    std::int64_t t = 1;
    for (int d : dims) t *= d;
    return t;
  }

  /// Angular frequency of bin k along an axis (negative branch wrapped).
  double freq(int axis, int k) const {
    int d = dims[axis];
    int kk = k <= d / 2 ? k : k - d;
    return 2.0 * kPi * kk / (d * spacing[axis]);
  }

  std::vector<int> transform_dims() const { return dims; }
};

namespace detail {

template <class T>
void pad_into(const Field<T>& f, const PadBox& box, std::vector<cplx>& buf) {
  buf.assign(box.total(), cplx(0, 0));
  const Grid& g = f.grid;
  // spatial strides inside the box (time first, last spatial axis fastest)
  std::int64_t sp_stride = 1;
  std::vector<std::int64_t> strides(g.n + 1, 1);
  for (int a = g.n; a >= 1; --a) {
    strides[a] = sp_stride;
    sp_stride *= box.dims[a];
  }
  strides[0] = sp_stride;
  for (int k = 0; k < g.nt; ++k) {
    for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
      auto ix = g.sunflatten(sid);
      std::int64_t off = k * strides[0];
      for (int a = 0; a < g.n; ++a) off += ix[a] * strides[a + 1];
      buf[off] = cplx(f.at(k, sid));
    }
  }
}

inline void restrict_from_c(const std::vector<cplx>& buf, const PadBox& box, ComplexField& f) {
  const Grid& g = f.grid;
  std::int64_t sp_stride = 1;
  std::vector<std::int64_t> strides(g.n + 1, 1);
  for (int a = g.n; a >= 1; --a) {
    strides[a] = sp_stride;
    sp_stride *= box.dims[a];
  }
  strides[0] = sp_stride;
  for (int k = 0; k < g.nt; ++k)
    for (std::int64_t sid = 0; sid < g.spatial_points(); ++sid) {
      auto ix = g.sunflatten(sid);
      std::int64_t off = k * strides[0];
      for (int a = 0; a < g.n; ++a) off += ix[a] * strides[a + 1];
      f.at(k, sid) = buf[off];
    }
}

}  // namespace detail

/// Weighted Sobolev norm with spectral weight (|zeta|^2 + lambda^2)^(m/2).
/// SpaceTime applies the weight over all frequencies of the padded box;
/// SpaceOnly weights the spatial frequencies slice by slice and sums over t.
/// AsPeriodic treats the field's own box as the periodic domain (exact for
/// pure lattice modes, used by diagnostics and tests).
inline double sobolev_lambda_norm(const ComplexField& f, double m, double lambda,
                                  SobolevMode mode = SobolevMode::SpaceTime,
                                  BoxPadding pad = BoxPadding::Pad2x) {
  if (!(lambda > 0)) throw Error("sobolev: lambda must be positive");
  if (!f.finite()) throw Error("sobolev: non-finite field");
  const Grid& g = f.grid;
  PadBox box = PadBox::make(g, mode, pad);
  std::vector<cplx> buf;
  detail::pad_into(f, box, buf);

  if (mode == SobolevMode::SpaceTime) {
    fft_nd(buf, box.dims, false);
    const double cell = g.cell_volume() * g.dt / static_cast<double>(box.total());
    double s = 0.0;
    std::vector<int> idx(box.dims.size(), 0);
    for (std::int64_t off = 0; off < box.total(); ++off) {
      double z2 = lambda * lambda;
      for (std::size_t a = 0; a < box.dims.size(); ++a) {
        double zq = box.freq(static_cast<int>(a), idx[a]);
        z2 += zq * zq;
      }
      s += std::pow(z2, m) * std::norm(buf[off]);
      for (int a = static_cast<int>(box.dims.size()) - 1; a >= 0; --a) {
        if (++idx[a] < box.dims[a]) break;
        idx[a] = 0;
      }
    }
    return std::sqrt(s * cell);
  }

  // SpaceOnly: spatial transform per slice, then plain time sum.
  std::vector<int> sdims(box.dims.begin() + 1, box.dims.end());
  std::int64_t sp_total = 1;
  for (int d : sdims) sp_total *= d;
  const double cell_x = g.cell_volume() / static_cast<double>(sp_total);
  double s = 0.0;
  for (int k = 0; k < g.nt; ++k) {
    cplx* slice = buf.data() + static_cast<std::int64_t>(k) * sp_total;
    fft_nd(slice, sdims, false);
    std::vector<int> idx(sdims.size(), 0);
    for (std::int64_t off = 0; off < sp_total; ++off) {
      double z2 = lambda * lambda;
      for (std::size_t a = 0; a < sdims.size(); ++a) {
        double zq = box.freq(static_cast<int>(a) + 1, idx[a]);
        z2 += zq * zq;
      }
      s += std::pow(z2, m) * std::norm(slice[off]);
      for (int a = static_cast<int>(sdims.size()) - 1; a >= 0; --a) {
        if (++idx[a] < sdims[a]) break;
        idx[a] = 0;
      }
    }
  }
  return std::sqrt(s * cell_x * g.dt);
}

inline double sobolev_lambda_norm(const RealField& f, double m, double lambda,
                                  SobolevMode mode = SobolevMode::SpaceTime,
                                  BoxPadding pad = BoxPadding::Pad2x) {
  return sobolev_lambda_norm(to_complex(f), m, lambda, mode, pad);
}

/// Applies the spectral multiplier (|zeta|^2 + lambda^2)^m through the padded
/// box and restricts back to Q. Self-adjoint and positive on the lattice
/// inner product; the m = -1 case realizes the H^{-1}_lambda Gram operator
/// used by the least-squares remainder construction.
class SpectralWeight {
 public:
  SpectralWeight(const Grid& g, double m, double lambda, SobolevMode mode)
      : box_(PadBox::make(g, mode, BoxPadding::Pad2x)), mode_(mode) {
    weight_.resize(box_.total());
    std::vector<int> idx(box_.dims.size(), 0);
    for (std::int64_t off = 0; off < box_.total(); ++off) {
      double z2 = lambda * lambda;
      for (std::size_t a = 0; a < box_.dims.size(); ++a) {
        if (mode == SobolevMode::SpaceOnly && a == 0) continue;
        double zq = box_.freq(static_cast<int>(a), idx[a]);
        z2 += zq * zq;
      }
      weight_[off] = std::pow(z2, m);
      for (int a = static_cast<int>(box_.dims.size()) - 1; a >= 0; --a) {
        if (++idx[a] < box_.dims[a]) break;
        idx[a] = 0;
      }
    }
  }

  void apply(const ComplexField& in, ComplexField& out) const {
    detail::pad_into(in, box_, buf_);
    if (mode_ == SobolevMode::SpaceTime) {
      fft_nd(buf_, box_.dims, false);
      for (std::int64_t i = 0; i < box_.total(); ++i) buf_[i] *= weight_[i];
      fft_nd(buf_, box_.dims, true);
    } else {
      std::vector<int> sdims(box_.dims.begin() + 1, box_.dims.end());
      std::int64_t sp_total = 1;
      for (int d : sdims) sp_total *= d;
      for (int k = 0; k < box_.dims[0]; ++k) {
        cplx* slice = buf_.data() + static_cast<std::int64_t>(k) * sp_total;
        fft_nd(slice, sdims, false);
        for (std::int64_t off = 0; off < sp_total; ++off)
          slice[off] *= weight_[static_cast<std::int64_t>(k) * sp_total + off];
        fft_nd(slice, sdims, true);
      }
    }
    detail::restrict_from_c(buf_, box_, out);
  }

  const PadBox& box() const { return box_; }

 private:
  PadBox box_;
  SobolevMode mode_;
  std::vector<double> weight_;
  mutable std::vector<cplx> buf_;
};

}  // namespace wavecal

#endif
