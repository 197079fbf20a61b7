#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace csmon {

// Counter-based generator (Philox-4x32, 10 rounds) with explicit substreams.
//
// Every (seed, stream) pair is an independent generator whose output depends
// only on those two values, never on global state or call order elsewhere.
// Monte Carlo code assigns one stream per path / replication, so any
// partition of work across threads reproduces the serial results bit for bit.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        counter_{0, 0, static_cast<std::uint32_t>(stream),
                 static_cast<std::uint32_t>(stream >> 32)} {}

  std::uint32_t next_u32() {
    if (buf_pos_ == 4) {
      buf_ = block(counter_, key_);
      advance_counter();
      buf_pos_ = 0;
    }
    return buf_[buf_pos_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
  }

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double next_uniform() {
    const std::uint64_t bits = next_u64() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1p-53;
  }

  // Standard normal, 256-layer ziggurat (Marsaglia-Tsang layout).
  double next_gaussian() {
    const ZigguratTables& z = ziggurat();
    for (;;) {
      const std::uint64_t bits = next_u64();
      const int idx = static_cast<int>(bits & 255u);
      const bool neg = (bits & 256u) != 0;
      const double u =
          (static_cast<double>(bits >> 12) + 0.5) * 0x1p-52;
      const double x = u * z.x[idx];
      if (x < z.x[idx + 1]) return neg ? -x : x;
      if (idx == 0) {
        // Tail beyond R, Marsaglia's exponential wrap.
        double xx;
        double yy;
        do {
          xx = -std::log(next_uniform()) / kTailR;
          yy = -std::log(next_uniform());
        } while (yy + yy < xx * xx);
        return neg ? -(kTailR + xx) : (kTailR + xx);
      }
      const double y = z.y[idx] + next_uniform() * (z.y[idx + 1] - z.y[idx]);
      if (y < std::exp(-0.5 * x * x)) return neg ? -x : x;
    }
  }

  // One keyed block; exposed so tests can pin the published vectors.
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      ctr = single_round(ctr, key);
      key[0] += 0x9E3779B9u;
      key[1] += 0xBB67AE85u;
    }
    return ctr;
  }

 private:
  static constexpr double kTailR = 3.6541528853610088;
  static constexpr double kLayerVolume = 4.92867323399e-3;

  struct ZigguratTables {
    std::array<double, 257> x;
    std::array<double, 257> y;
  };

  static const ZigguratTables& ziggurat() {
    static const ZigguratTables tables = [] {
      ZigguratTables z;
      z.x[0] = kLayerVolume * std::exp(0.5 * kTailR * kTailR);
      z.x[1] = kTailR;
      z.x[256] = 0.0;
      for (int i = 2; i < 256; ++i)
        z.x[i] = std::sqrt(-2.0 * std::log(kLayerVolume / z.x[i - 1] +
                                           std::exp(-0.5 * z.x[i - 1] *
                                                    z.x[i - 1])));
      for (int i = 0; i <= 256; ++i) z.y[i] = std::exp(-0.5 * z.x[i] * z.x[i]);
      return z;
    }();
    return tables;
  }

  static std::array<std::uint32_t, 4> single_round(
      const std::array<std::uint32_t, 4>& ctr,
      const std::array<std::uint32_t, 2>& key) {
    const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    return {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }

  void advance_counter() {
    if (++counter_[0] == 0) ++counter_[1];  // 2^64 blocks per stream
  }

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> buf_{};
  int buf_pos_ = 4;
};

}  // namespace csmon
