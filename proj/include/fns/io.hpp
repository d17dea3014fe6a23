#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fns/grid.hpp"

namespace fns {

// Binary field file, bit-exact:
//   magic "FNSV" | u32 version=1 | u8 dimension | u8 components | u16 reserved=0
//   | dimension x u64 points-per-axis | f64 box length
//   | components * N^d f64 samples, component-major, x-fastest.
// All integers and doubles little-endian.
namespace detail {

template <class T>
void put_le(std::string& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = sizeof(T); i-- > 0;) out.push_back(char(raw[i]));
  } else {
    out.append(reinterpret_cast<const char*>(raw), sizeof(T));
  }
}

template <class T>
T get_le(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw std::runtime_error("field file truncated");
  unsigned char raw[sizeof(T)];
  std::memcpy(raw, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(raw[i], raw[sizeof(T) - 1 - i]);
  }
  T value;
  std::memcpy(&value, raw, sizeof(T));
  return value;
}

}  // namespace detail

inline std::string encode_field(const Field& f) {
  std::string out;
  out.reserve(24 + 8 * (std::size_t(f.grid.dim) + f.samples.size()));
  out.append("FNSV", 4);
  detail::put_le<std::uint32_t>(out, 1u);
  detail::put_le<std::uint8_t>(out, std::uint8_t(f.grid.dim));
  detail::put_le<std::uint8_t>(out, std::uint8_t(f.components));
  detail::put_le<std::uint16_t>(out, 0u);
  for (int a = 0; a < f.grid.dim; ++a) detail::put_le<std::uint64_t>(out, std::uint64_t(f.grid.points));
  detail::put_le<double>(out, f.grid.length);
  for (double v : f.samples) detail::put_le<double>(out, v);
  return out;
}

inline Field decode_field(const std::string& in) {
  if (in.size() < 12 || in.compare(0, 4, "FNSV") != 0)
    throw std::runtime_error("field file: bad magic");
  std::size_t pos = 4;
  const auto version = detail::get_le<std::uint32_t>(in, pos);
  if (version != 1u) throw std::runtime_error("field file: unsupported version");
  const int dim = detail::get_le<std::uint8_t>(in, pos);
  const int comps = detail::get_le<std::uint8_t>(in, pos);
  const auto reserved = detail::get_le<std::uint16_t>(in, pos);
  if (reserved != 0) throw std::runtime_error("field file: nonzero reserved word");
  if (dim < 1 || dim > 3 || comps < 1) throw std::runtime_error("field file: bad header");
  std::uint64_t npts = 0;
  for (int a = 0; a < dim; ++a) {
    const auto n = detail::get_le<std::uint64_t>(in, pos);
    if (a == 0)
      npts = n;
    else if (n != npts)
      throw std::runtime_error("field file: anisotropic grids not supported");
  }
  const double length = detail::get_le<double>(in, pos);
  GridSpec g(dim, int(npts), length);
  Field f(g, comps);
  if (in.size() - pos != 8 * f.samples.size())
    throw std::runtime_error("field file: payload size mismatch");
  for (double& v : f.samples) v = detail::get_le<double>(in, pos);
  return f;
}

inline void write_field(const std::string& path, const Field& f) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  const std::string blob = encode_field(f);
  os.write(blob.data(), std::streamsize(blob.size()));
  if (!os) throw std::runtime_error("write failed: " + path);
}

inline Field read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  std::string blob((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_field(blob);
}

}  // namespace fns
