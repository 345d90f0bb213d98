#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace spininterp {

/// Philox4x32-10 block function (Salmon et al. 2011).
/// The counter is 4 x 32 bits and the key 2 x 32 bits.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter block(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85;
};

/// Standard Gaussian addressed by (seed, order p, flat tuple index).
///
/// key     = (seed low 32 bits, seed high 32 bits)
/// counter = (index low 32 bits, index high 32 bits, p, 0)
/// The four output words form two 53-bit uniforms
///   u1 = ((w0:w1 >> 11) + 1) * 2^-53   in (0, 1]
///   u2 =  (w2:w3 >> 11)      * 2^-53   in [0, 1)
/// and the Box-Muller cosine branch gives sqrt(-2 log u1) cos(2 pi u2).
inline double gaussian_at(std::uint64_t seed, std::uint32_t p, std::uint64_t index) {
  const auto w = Philox4x32::block(
      {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), p, 0u},
      {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  const std::uint64_t a = (std::uint64_t{w[0]} << 32) | w[1];
  const std::uint64_t b = (std::uint64_t{w[2]} << 32) | w[3];
  constexpr double scale = 1.0 / 9007199254740992.0;
  const double u1 = static_cast<double>((a >> 11) + 1) * scale;
  const double u2 = static_cast<double>(b >> 11) * scale;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace spininterp
