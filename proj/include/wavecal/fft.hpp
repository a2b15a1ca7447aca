#ifndef WAVECAL_FFT_HPP
#define WAVECAL_FFT_HPP

#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "wavecal/common.hpp"

namespace wavecal {
namespace fftdetail {

struct Plan {
  int n = 0;
  std::vector<cplx> roots_fwd;  // exp(-2*pi*i j/n)
  std::vector<cplx> roots_inv;  // exp(+2*pi*i j/n)
  std::vector<int> bitrev;      // populated for powers of two
};

inline std::shared_ptr<const Plan> get_plan_locked(int n) {
  static std::mutex mu;
  static std::unordered_map<int, std::shared_ptr<const Plan>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto p = std::make_shared<Plan>();
  p->n = n;
  p->roots_fwd.resize(n);
  p->roots_inv.resize(n);
  for (int j = 0; j < n; ++j) {
    double ang = 2.0 * kPi * j / n;
    p->roots_fwd[j] = cplx(std::cos(ang), -std::sin(ang));
    p->roots_inv[j] = cplx(std::cos(ang), std::sin(ang));
  }
  if ((n & (n - 1)) == 0) {
    p->bitrev.resize(n);
    int lg = 0;
    while ((1 << lg) < n) ++lg;
    for (int i = 0; i < n; ++i) {
      int r = 0;
      for (int b = 0; b < lg; ++b)
        if (i & (1 << b)) r |= 1 << (lg - 1 - b);
      p->bitrev[i] = r;
    }
  }
  cache.emplace(n, p);
  return p;
}

/// Thread-local front cache so hot loops avoid the mutex.
inline const Plan* get_plan(int n) {
  thread_local std::unordered_map<int, std::shared_ptr<const Plan>> local;
  auto it = local.find(n);
  if (it != local.end()) return it->second.get();
  auto p = get_plan_locked(n);
  local.emplace(n, p);
  return p.get();
}

inline void fft_pow2(cplx* x, int n, const Plan& plan, bool inverse) {
  const auto& rev = plan.bitrev;
  for (int i = 0; i < n; ++i)
    if (i < rev[i]) std::swap(x[i], x[rev[i]]);
  const auto& roots = inverse ? plan.roots_inv : plan.roots_fwd;
  for (int len = 2; len <= n; len <<= 1) {
    int step = n / len;
    int half = len >> 1;
    for (int start = 0; start < n; start += len) {
      for (int j = 0; j < half; ++j) {
        cplx u = x[start + j];
        cplx v = x[start + j + half] * roots[j * step];
        x[start + j] = u + v;
        x[start + j + half] = u - v;
      }
    }
  }
}

/// Recursive mixed-radix (factors 2 and 3) decimation in time with in-place
/// butterflies; `rootstep` maps local twiddle exponents onto the top-level
/// root table (indices stay below nfull, no reduction needed).
inline void fft_mixed_rec(const cplx* in, std::int64_t istride, cplx* out, int n, int rootstep,
                          const cplx* roots, int nfull, bool inverse) {
  if (n == 1) {
    out[0] = in[0];
    return;
  }
  if ((n & (n - 1)) == 0) {
    // power-of-two tail: gather the decimated line and run the iterative path
    for (int j = 0; j < n; ++j) out[j] = in[j * istride];
    fft_pow2(out, n, *get_plan(n), inverse);
    return;
  }
  const int p = (n % 3 == 0) ? 3 : 2;
  const int m = n / p;
  for (int r = 0; r < p; ++r)
    fft_mixed_rec(in + r * istride, istride * p, out + r * m, m, rootstep * p, roots, nfull,
                  inverse);
  if (p == 2) {
    for (int j = 0; j < m; ++j) {
      cplx a = out[j];
      cplx b = out[m + j] * roots[static_cast<std::int64_t>(j) * rootstep];
      out[j] = a + b;
      out[m + j] = a - b;
    }
  } else {
    const cplx w3 = inverse ? cplx(-0.5, std::sqrt(3.0) / 2.0)
                            : cplx(-0.5, -std::sqrt(3.0) / 2.0);
    const cplx w3b = std::conj(w3);
    for (int j = 0; j < m; ++j) {
      std::int64_t e1 = static_cast<std::int64_t>(j) * rootstep;
      std::int64_t e2 = 2 * e1;
      if (e2 >= nfull) e2 -= nfull;
      cplx a = out[j];
      cplx b = out[m + j] * roots[e1];
      cplx c = out[2 * m + j] * roots[e2];
      out[j] = a + b + c;
      out[m + j] = a + w3 * b + w3b * c;
      out[2 * m + j] = a + w3b * b + w3 * c;
    }
  }
}

void fft_1d(cplx* x, int n, bool inverse);  // forward declaration for bluestein

/// Chirp-z fallback for lengths with prime factors other than 2 and 3.
inline void fft_bluestein(cplx* x, int n, bool inverse) {
  int m = 1;
  while (m < 2 * n - 1) m <<= 1;
  std::vector<cplx> a(m, cplx(0, 0)), b(m, cplx(0, 0)), chirp(n);
  const double sgn = inverse ? 1.0 : -1.0;
  for (int j = 0; j < n; ++j) {
    // exponent j^2/2 reduced mod n to keep the angle well conditioned
    std::int64_t e = (static_cast<std::int64_t>(j) * j) % (2 * n);
    double ang = sgn * kPi * e / n;
    chirp[j] = cplx(std::cos(ang), std::sin(ang));
  }
  for (int j = 0; j < n; ++j) a[j] = x[j] * chirp[j];
  b[0] = cplx(1, 0);
  for (int j = 1; j < n; ++j) b[j] = b[m - j] = std::conj(chirp[j]);
  fft_1d(a.data(), m, false);
  fft_1d(b.data(), m, false);
  for (int j = 0; j < m; ++j) a[j] *= b[j];
  fft_1d(a.data(), m, true);
  for (int j = 0; j < n; ++j) x[j] = a[j] * chirp[j];
}

/// Unnormalized forward DFT (sum with exp(-2*pi*i jk/n)); the inverse carries
/// the 1/n factor so fft(ifft(x)) == x.
inline void fft_1d(cplx* x, int n, bool inverse) {
  if (n <= 1) return;
  const Plan* plan = get_plan(n);
  if ((n & (n - 1)) == 0) {
    fft_pow2(x, n, *plan, inverse);
  } else if (is_smooth23(n)) {
    thread_local std::vector<cplx> out;
    if (static_cast<int>(out.size()) < n) out.resize(n);
    const cplx* roots = inverse ? plan->roots_inv.data() : plan->roots_fwd.data();
    fft_mixed_rec(x, 1, out.data(), n, 1, roots, n, inverse);
    for (int i = 0; i < n; ++i) x[i] = out[i];
  } else {
    fft_bluestein(x, n, inverse);
  }
  if (inverse) {
    const double s = 1.0 / n;
    for (int i = 0; i < n; ++i) x[i] *= s;
  }
}

}  // namespace fftdetail

/// In-place n-dimensional DFT over a row-major array (last dim fastest).
inline void fft_nd(cplx* data, const std::vector<int>& dims, bool inverse) {
  std::int64_t total = 1;
  for (int d : dims) total *= d;
  if (total == 0) return;
  std::int64_t stride = 1;  // stride of the current axis, built from the right
  for (int axis = static_cast<int>(dims.size()) - 1; axis >= 0; --axis) {
    const int n = dims[axis];
    const std::int64_t block = stride * n;
    thread_local std::vector<cplx> line;
    if (static_cast<int>(line.size()) < n) line.resize(n);
    for (std::int64_t base = 0; base < total; base += block) {
      for (std::int64_t off = 0; off < stride; ++off) {
        cplx* start = data + base + off;
        if (stride == 1) {
          fftdetail::fft_1d(start, n, inverse);
        } else {
          for (int j = 0; j < n; ++j) line[j] = start[j * stride];
          fftdetail::fft_1d(line.data(), n, inverse);
          for (int j = 0; j < n; ++j) start[j * stride] = line[j];
        }
      }
    }
    stride = block;
  }
}

inline void fft_nd(std::vector<cplx>& data, const std::vector<int>& dims, bool inverse) {
  fft_nd(data.data(), dims, inverse);
}

}  // namespace wavecal

#endif
