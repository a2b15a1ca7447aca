#ifndef WAVECAL_COMMON_HPP
#define WAVECAL_COMMON_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavecal {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Library-wide error type. Message carries the failing condition by name;
/// callers that need exit codes map on the category prefix.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Thrown when a trace hidden by a data-scenario mask is read.
class MaskedTraceError : public Error {
 public:
  explicit MaskedTraceError(const std::string& msg) : Error(msg) {}
};

inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(const cplx& z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

template <class T>
bool all_finite(const std::vector<T>& v) {
  for (const T& x : v)
    if (!is_finite(x)) return false;
  return true;
}

inline double abs2(double x) { return x * x; }
inline double abs2(const cplx& z) { return std::norm(z); }

inline double conj_or_id(double x) { return x; }
inline cplx conj_or_id(const cplx& z) { return std::conj(z); }

/// Smallest 3-smooth integer (2^a * 3^b) >= n. Grid sizes are kept 3-smooth
/// so the 2x zero-padded boxes stay FFT-friendly.
inline int next_smooth23(int n) {
  if (n <= 1) return 1;
  int best = std::numeric_limits<int>::max();
  for (std::int64_t p3 = 1; p3 < best; p3 *= 3) {
    std::int64_t p = p3;
    while (p < n) p *= 2;
    if (p < best) best = static_cast<int>(p);
  }
  return best;
}

inline bool is_smooth23(int n) {
  if (n < 1) return false;
  while (n % 2 == 0) n /= 2;
  while (n % 3 == 0) n /= 3;
  return n == 1;
}

/// Quintic smoothstep: 0 at s<=0, 1 at s>=1, C^2 across the joints.
inline double smoothstep5(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

inline double smoothstep5_d(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  return s * s * (30.0 + s * (-60.0 + 30.0 * s));
}

}  // namespace wavecal

#endif
