#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace netfuse {

// Identifies the node-order shuffle so seeds stay portable; bump the version
// whenever the draw sequence changes.
inline constexpr std::string_view kPrngAlgorithm = "mt19937_64/fisher-yates-rejection/v1";

std::uint64_t splitmix64(std::uint64_t x);
// Stable hash of (master, a, b) used to give every task its own seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b);

// Portable replacement for std::shuffle / std::uniform_int_distribution,
// whose outputs are implementation-defined.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, bound) by rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Box-Muller; portable unlike std::normal_distribution.
  double normal();
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace netfuse
