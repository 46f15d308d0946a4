#pragma once

#include <cstdint>
#include <random>

namespace shiryaev {

/// Seeded per-trial random source.
///
/// Each Monte Carlo trial owns one stream derived from (master seed, trial
/// index). The derivation does not depend on how many other streams exist
/// or in which order they are created, so trials can run in any order or in
/// parallel and still see the same draws.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream_index = 0);

  double standard_normal() { return normal_(engine_); }

  /// Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace shiryaev
