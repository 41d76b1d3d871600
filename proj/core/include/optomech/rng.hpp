#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace optomech {

/// Philox4x32-10 counter-based generator. The 64-bit seed is the key; the
/// 128-bit counter is (block index, stream id), so any block of any stream
/// can be produced independently of thread scheduling.
constexpr std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> c,
                                                     std::array<std::uint32_t, 2> k) noexcept {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      k[0] += 0x9E3779B9u;
      k[1] += 0xBB67AE85u;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(0xD2511F53u) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(0xCD9E8D57u) * c[2];
    c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
  }
  return c;
}

/// Standard normal deviates from one (seed, stream) pair via Box-Muller,
/// two deviates per Philox block.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  double next() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const auto b = philox4x32_10({static_cast<std::uint32_t>(block_),
                                  static_cast<std::uint32_t>(block_ >> 32),
                                  static_cast<std::uint32_t>(stream_),
                                  static_cast<std::uint32_t>(stream_ >> 32)},
                                 key_);
    ++block_;
    const double u1 = unit(b[0], b[1]);
    const double u2 = unit(b[2], b[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 6.283185307179586 * u2;
    spare_ = r * std::sin(th);
    has_spare_ = true;
    return r * std::cos(th);
  }

  /// Circular complex Gaussian with E|z|^2 = variance.
  std::complex<double> complex_normal(double variance) noexcept {
    const double s = std::sqrt(0.5 * variance);
    const double re = next();
    const double im = next();
    return {s * re, s * im};
  }

  std::uint64_t blocks_used() const noexcept { return block_; }

 private:
  // 53-bit uniform in (0, 1), never exactly 0.
  static double unit(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t v = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(v) + 0.5) * 0x1.0p-53;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// White complex noise increments with two-sided PSD `psd_level`: each sample
/// has variance psd_level/dt split evenly between real and imaginary parts.
class NoiseSampler {
 public:
  NoiseSampler(double psd_level, double dt, std::uint64_t seed, std::uint64_t stream = 0);
  std::complex<double> next() noexcept {
    if (variance_ == 0.0) return {0.0, 0.0};
    return normal_.complex_normal(variance_);
  }
  double variance() const noexcept { return variance_; }

 private:
  NormalStream normal_;
  double variance_;
};

std::vector<std::complex<double>> noise_sampler(double psd_level, double dt, std::uint64_t seed,
                                                std::size_t n, std::uint64_t stream = 0);

}  // namespace optomech
