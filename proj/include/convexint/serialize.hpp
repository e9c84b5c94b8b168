/// @file serialize.hpp
/// @brief Flat binary container for field snapshots and small JSON helpers.
///
/// Container layout, all little-endian:
///   u64 dim | u64 N | u64 components | f64 time tag | payload f64 samples,
/// one component after another, each in row-major axis order.
#pragma once

#include <bit>
#include <cstdio>
#include <fstream>
#include <string>

#include "convexint/field.hpp"

namespace convexint {

static_assert(std::endian::native == std::endian::little, "serializer assumes a little-endian host");

inline void write_field(const std::string& path, const PeriodicField& f, double time_tag) {
  std::ofstream os(path, std::ios::binary);
  require(os.good(), "write_field: cannot open " + path);
  auto put_u64 = [&](std::uint64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); };
  auto put_f64 = [&](double v) { os.write(reinterpret_cast<const char*>(&v), 8); };
  put_u64(static_cast<std::uint64_t>(f.dim()));
  put_u64(static_cast<std::uint64_t>(f.n()));
  put_u64(static_cast<std::uint64_t>(f.comps()));
  put_f64(time_tag);
  for (int c = 0; c < f.comps(); ++c)
    os.write(reinterpret_cast<const char*>(f.comp(c)), static_cast<std::streamsize>(f.volume() * 8));
  require(os.good(), "write_field: write failed for " + path);
}

inline PeriodicField read_field(const std::string& path, double* time_tag = nullptr) {
  std::ifstream is(path, std::ios::binary);
  require(is.good(), "read_field: cannot open " + path);
  auto get_u64 = [&] {
    std::uint64_t v;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
  };
  auto dim = static_cast<int>(get_u64());
  auto n = static_cast<int>(get_u64());
  auto comps = static_cast<int>(get_u64());
  double t;
  is.read(reinterpret_cast<char*>(&t), 8);
  if (time_tag) *time_tag = t;
  PeriodicField f({dim, n}, comps);
  for (int c = 0; c < comps; ++c)
    is.read(reinterpret_cast<char*>(f.comp(c)), static_cast<std::streamsize>(f.volume() * 8));
  require(is.good(), "read_field: truncated file " + path);
  return f;
}

}  // namespace convexint
