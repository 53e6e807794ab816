#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace gphit {

// Philox-4x32-10 counter-based generator (Salmon et al., SC 2011). A draw is
// a pure function of (key, counter), so path simulation is reproducible
// independently of thread count and scheduling.
namespace philox {

constexpr std::uint32_t kW32A = 0x9E3779B9u;
constexpr std::uint32_t kW32B = 0xBB67AE85u;
constexpr std::uint32_t kM4x32A = 0xD2511F53u;
constexpr std::uint32_t kM4x32B = 0xCD9E8D57u;

inline void mul_hilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo,
                     std::uint32_t& hi) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(p);
  hi = static_cast<std::uint32_t>(p >> 32);
}

inline std::array<std::uint32_t, 4> block(std::uint64_t key,
                                          std::array<std::uint32_t, 4> ctr) {
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  for (int round = 0; round < 10; ++round) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mul_hilo(kM4x32A, ctr[0], lo0, hi0);
    mul_hilo(kM4x32B, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
    k0 += kW32A;
    k1 += kW32B;
  }
  return ctr;
}

} // namespace philox

// One standard normal per (path, coordinate, step), derived from the master
// seed. Steps are paired: one Philox block feeds a Box-Muller pair, the step
// parity selects the cosine or sine branch.
inline double normal_draw(std::uint64_t seed, std::uint64_t path,
                          std::uint32_t coord, std::uint64_t step) {
  const std::uint64_t pair = step >> 1;
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(pair), static_cast<std::uint32_t>(pair >> 32),
      static_cast<std::uint32_t>(path) ^ (coord * 0x9E3779B9u),
      static_cast<std::uint32_t>(path >> 32) + coord};
  const auto r = philox::block(seed, ctr);
  const std::uint64_t a =
      (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
  const std::uint64_t b =
      (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
  // u1 in (0, 1], u2 in [0, 1)
  const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 6.283185307179586476925286766559 * u2;
  return (step & 1u) ? radius * std::sin(angle) : radius * std::cos(angle);
}

// Fills one path's worth of normals for a coordinate; steps 0..n-1.
inline void fill_normals(std::uint64_t seed, std::uint64_t path,
                         std::uint32_t coord, std::size_t n, double* out) {
  for (std::size_t i = 0; i + 1 < n; i += 2) {
    const std::uint64_t pair = i >> 1;
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(pair),
        static_cast<std::uint32_t>(pair >> 32),
        static_cast<std::uint32_t>(path) ^ (coord * 0x9E3779B9u),
        static_cast<std::uint32_t>(path >> 32) + coord};
    const auto r = philox::block(seed, ctr);
    const std::uint64_t a = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
    const std::uint64_t b = (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
    const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    out[i] = radius * std::cos(angle);
    out[i + 1] = radius * std::sin(angle);
  }
  if (n & 1u) out[n - 1] = normal_draw(seed, path, coord, n - 1);
}

} // namespace gphit
