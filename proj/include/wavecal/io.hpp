#ifndef WAVECAL_IO_HPP
#define WAVECAL_IO_HPP

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "wavecal/field.hpp"

namespace wavecal {

/// Binary field container. Layout (little-endian):
///   bytes 0..3   magic "WCAL"
///   u32          version (1)
///   f64 x5       n, nx, nt, L, T
///   u32          flag: 0 real, 1 complex
///   payload      row-major f64 samples, re/im interleaved when complex
/// Spatial slices are stored as fields with nt = 1; face traces as fields
/// with n reduced by one.
namespace fieldio {

struct Header {
  int n = 0, nx = 0, nt = 0;
  double L = 0, T = 0;
  bool complex_flag = false;
};

inline void write_header(std::ofstream& os, const Header& h) {
  os.write("WCAL", 4);
  std::uint32_t version = 1;
  os.write(reinterpret_cast<const char*>(&version), 4);
  double meta[5] = {double(h.n), double(h.nx), double(h.nt), h.L, h.T};
  os.write(reinterpret_cast<const char*>(meta), sizeof(meta));
  std::uint32_t flag = h.complex_flag ? 1 : 0;
  os.write(reinterpret_cast<const char*>(&flag), 4);
}

inline Header read_header(std::ifstream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "WCAL", 4) != 0) throw Error("field io: bad magic");
  std::uint32_t version = 0;
  is.read(reinterpret_cast<char*>(&version), 4);
  if (version != 1) throw Error("field io: unsupported version");
  double meta[5];
  is.read(reinterpret_cast<char*>(meta), sizeof(meta));
  std::uint32_t flag = 0;
  is.read(reinterpret_cast<char*>(&flag), 4);
  if (!is) throw Error("field io: truncated header");
  Header h;
  h.n = int(meta[0]);
  h.nx = int(meta[1]);
  h.nt = int(meta[2]);
  h.L = meta[3];
  h.T = meta[4];
  h.complex_flag = flag != 0;
  return h;
}

inline void write_samples(std::ofstream& os, const std::vector<double>& v) {
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(double)));
}
inline void write_samples(std::ofstream& os, const std::vector<cplx>& v) {
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * 2 * sizeof(double)));
}
inline void read_samples(std::ifstream& is, std::vector<double>& v) {
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(v.size() * 8));
  if (!is) throw Error("field io: truncated payload");
}
inline void read_samples(std::ifstream& is, std::vector<cplx>& v) {
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(v.size() * 16));
  if (!is) throw Error("field io: truncated payload");
}

}  // namespace fieldio

template <class T>
void write_field(const std::string& path, const Field<T>& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("field io: cannot open " + path);
  fieldio::Header h;
  h.n = f.grid.n;
  h.nx = f.grid.nx;
  h.nt = f.grid.nt;
  h.L = f.grid.L;
  h.T = f.grid.T;
  h.complex_flag = std::is_same_v<T, cplx>;
  fieldio::write_header(os, h);
  fieldio::write_samples(os, f.v);
  if (!os) throw Error("field io: write failed for " + path);
}

template <class T>
Field<T> read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("field io: cannot open " + path);
  fieldio::Header h = fieldio::read_header(is);
  if (h.complex_flag != std::is_same_v<T, cplx>)
    throw Error("field io: real/complex flag mismatch in " + path);
  // nt==1 slices and face traces bypass the CFL-carrying constructor
  Grid g;
  g.n = h.n;
  g.L = h.L;
  g.T = h.T;
  g.nx = h.nx;
  g.nt = h.nt;
  g.dx = h.nx > 1 ? h.L / (h.nx - 1) : h.L;
  g.dt = h.nt > 1 ? h.T / (h.nt - 1) : h.T;
  Field<T> f;
  f.grid = g;
  f.v.assign(g.total_points(), T{});
  fieldio::read_samples(is, f.v);
  return f;
}

/// Deterministic CSV writer: fixed %.17g formatting so identical runs emit
/// identical bytes.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : os_(path) {
    if (!os_) throw Error("csv: cannot open " + path);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os_ << ',';
      os_ << cells[i];
    }
    os_ << '\n';
  }
  static std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
  }
  static std::string num(cplx z) {
    return num(z.real()) + "+" + num(z.imag()) + "i";
  }

 private:
  std::ofstream os_;
};

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("io: cannot create directory " + dir);
}

}  // namespace wavecal

#endif
