#pragma once

#include <cstdint>
#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include "avrank/errors.hpp"

namespace avrank::detail {

// Minimal length-prefixed little-endian record writer/reader used by the
// checkpoint format. Only ever reads files it wrote itself, so the format
// favors simplicity over generality.

inline void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

inline std::uint64_t read_u64(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  if (!in) throw DataError("truncated checkpoint record");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

inline void write_i64(std::ostream& out, std::int64_t v) {
  write_u64(out, static_cast<std::uint64_t>(v));
}

inline std::int64_t read_i64(std::istream& in) {
  return static_cast<std::int64_t>(read_u64(in));
}

inline void write_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  write_u64(out, bits);
}

inline double read_f64(std::istream& in) {
  std::uint64_t bits = read_u64(in);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

inline void write_string(std::ostream& out, const std::string& s) {
  write_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& in) {
  std::uint64_t n = read_u64(in);
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (!in) throw DataError("truncated checkpoint string");
  return s;
}

inline void write_f64_vector(std::ostream& out, const std::vector<double>& v) {
  write_u64(out, v.size());
  for (double x : v) write_f64(out, x);
}

inline std::vector<double> read_f64_vector(std::istream& in) {
  std::uint64_t n = read_u64(in);
  std::vector<double> v(n);
  for (auto& x : v) x = read_f64(in);
  return v;
}

inline void write_i32_vector(std::ostream& out, const std::vector<int>& v) {
  write_u64(out, v.size());
  for (int x : v) write_i64(out, x);
}

inline std::vector<int> read_i32_vector(std::istream& in) {
  std::uint64_t n = read_u64(in);
  std::vector<int> v(n);
  for (auto& x : v) x = static_cast<int>(read_i64(in));
  return v;
}

}  // namespace avrank::detail
