#include "levy_escape/rng.hpp"

#include <bit>
#include <cmath>

namespace levy_escape {

namespace detail {

ZigguratTables::ZigguratTables() {
  auto f = [](double t) { return std::exp(-0.5 * t * t); };
  // Common layer area: base strip plus the true tail mass beyond kR.
  const double v =
      kR * f(kR) + std::sqrt(std::atan(1.0) * 2.0) * std::erfc(kR / std::sqrt(2.0));

  double x[kLayers];
  x[kLayers - 1] = kR;
  for (int i = kLayers - 2; i >= 1; --i) {
    x[i] = std::sqrt(-2.0 * std::log(v / x[i + 1] + f(x[i + 1])));
  }
  x[0] = 0.0;

  fx[0] = 1.0;
  for (int i = 1; i < kLayers; ++i) fx[i] = f(x[i]);

  const double base_width = v / f(kR);
  layer[0] = {base_width * 0x1.0p-53, kR / base_width * 0x1.0p53};
  for (int i = 1; i < kLayers; ++i) {
    layer[i] = {x[i] * 0x1.0p-53, x[i - 1] / x[i] * 0x1.0p53};
  }
}

const ZigguratTables g_ziggurat{};

}  // namespace detail

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream,
                           std::uint64_t substream) {
  // Full-avalanche key derivation: distinct keys yield unrelated states.
  std::uint64_t s = mix(seed + 0x9E3779B97F4A7C15ULL);
  s = mix(s ^ (stream + 0xBF58476D1CE4E5B9ULL));
  s = mix(s ^ (substream + 0x94D049BB133111EBULL));
  state_ = s;
  // Per-stream increment, odd, with enough bit transitions (Steele et al.).
  std::uint64_t g = mix(s + 0x9E3779B97F4A7C15ULL) | 1ULL;
  if (std::popcount(g ^ (g >> 1)) < 24) g ^= 0xAAAAAAAAAAAAAAAAULL;
  gamma_ = g;
}

double RandomStream::exponential() { return -std::log(uniform_open()); }

double RandomStream::normal_reject(std::uint64_t bits) {
  const detail::ZigguratTables& z = detail::g_ziggurat;
  for (;;) {
    const unsigned layer = static_cast<unsigned>(bits & 0xFF);
    const std::uint64_t sign_bit = (bits & 0x100ULL) << 55;
    const double frac = static_cast<double>(bits >> 11);
    const detail::ZigguratTables::Layer& l = z.layer[layer];
    const double value =
        std::bit_cast<double>(std::bit_cast<std::uint64_t>(frac * l.width_scaled) ^ sign_bit);
    if (frac < l.accept_below) return value;
    if (layer == 0) {
      const double tail = normal_from_tail();
      return std::bit_cast<double>(std::bit_cast<std::uint64_t>(tail) ^ sign_bit);
    }
    // Wedge: accept against the true density between layer boundaries.
    const double mag = std::abs(value);
    const double y = z.fx[layer] + uniform01() * (z.fx[layer - 1] - z.fx[layer]);
    if (y < std::exp(-0.5 * mag * mag)) return value;
    bits = next_u64();
  }
}

double RandomStream::normal_from_tail() {
  // Marsaglia's exact tail method beyond kR.
  const double r = detail::ZigguratTables::kR;
  for (;;) {
    const double a = -std::log(uniform_open()) / r;
    const double b = -std::log(uniform_open());
    if (2.0 * b > a * a) return r + a;
  }
}

}  // namespace levy_escape
