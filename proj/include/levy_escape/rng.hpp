#pragma once

#include <bit>
#include <cstdint>

namespace levy_escape {

namespace detail {

// 256-layer ziggurat tables for the standard normal, built at load time.
struct ZigguratTables {
  static constexpr int kLayers = 256;
  static constexpr double kR = 3.6541528853610088;  // right edge of the base strip

  struct Layer {
    double width_scaled;  // layer width * 2^-53
    double accept_below;  // (x[i-1]/x[i]) * 2^53
  };
  Layer layer[kLayers];
  double fx[kLayers];  // f at the layer abscissa, fx[0] = 1

  ZigguratTables();
};

extern const ZigguratTables g_ziggurat;

}  // namespace detail

/// Counter-based pseudo-random stream.
///
/// The generator is SplitMix64: the state is a plain counter advanced by a
/// per-stream odd increment, and every output is a finalizing hash of the
/// counter.  Streams derived from distinct (seed, stream, substream) keys are
/// statistically independent, so path-level work can be scheduled on any
/// number of workers without changing a single drawn value.
///
/// A RandomStream is an owned, single-consumer object; never share one
/// between threads.
class RandomStream {
 public:
  RandomStream() : RandomStream(0, 0, 0) {}
  RandomStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream);

  /// Next raw 64-bit word.
  std::uint64_t next_u64() {
    state_ += gamma_;
    return mix(state_);
  }

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1); safe to pass to log().
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
  }

  /// Standard normal variate (ziggurat with exact tail fallback).  Bit 8 of
  /// the draw carries the sign, bits 0..7 the layer, bits 11..63 the
  /// fraction, so the common case is one multiply and one compare.
  double normal() {
    const std::uint64_t bits = next_u64();
    const unsigned layer = static_cast<unsigned>(bits & 0xFF);
    const std::uint64_t sign_bit = (bits & 0x100ULL) << 55;
    const double frac = static_cast<double>(bits >> 11);
    const detail::ZigguratTables::Layer& l = detail::g_ziggurat.layer[layer];
    const double value =
        std::bit_cast<double>(std::bit_cast<std::uint64_t>(frac * l.width_scaled) ^ sign_bit);
    if (frac < l.accept_below) [[likely]] {
      return value;
    }
    return normal_reject(bits);
  }

  /// Exp(1) variate.
  double exponential();

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

 private:
  double normal_reject(std::uint64_t bits);  // wedge and tail, out of line
  double normal_from_tail();

  std::uint64_t state_;
  std::uint64_t gamma_;
};

}  // namespace levy_escape
