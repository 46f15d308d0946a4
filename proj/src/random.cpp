#include "shiryaev/random.hpp"

namespace shiryaev {

namespace {

constexpr std::uint32_t lo(std::uint64_t v) { return static_cast<std::uint32_t>(v); }
constexpr std::uint32_t hi(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_index) {
  // seed_seq mixes all four words, so neighbouring indices give unrelated states.
  std::seed_seq seq{lo(seed), hi(seed), lo(stream_index), hi(stream_index), 0x5eedu};
  return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_index)
    : engine_(make_engine(seed, stream_index)) {}

}  // namespace shiryaev
