#pragma once

#include <array>
#include <cstdint>

namespace urnkit {

/// Counter-based random stream (Philox 4x32, 10 rounds).
///
/// A stream is addressed by (key, stream): `key` is the experiment master
/// seed, `stream` selects an independent substream (one per simulation run).
/// The 128-bit block counter is laid out as words (c0,c1,c2,c3) =
/// (lo32(block), hi32(block), lo32(stream), hi32(stream)) and the 64-bit key
/// as (k0,k1) = (lo32(key), hi32(key)). Each encrypted block yields two
/// 64-bit outputs, w0|w1<<32 then w2|w3<<32. Distinct (key, stream) pairs
/// never share counter blocks, so any number of runs can execute in parallel
/// and still reproduce bit-identically.
class Philox4x32 {
 public:
  explicit Philox4x32(std::uint64_t key, std::uint64_t stream = 0)
      : key_(key), stream_(stream) {}

  std::uint64_t next_u64() {
    if (cursor_ == 2) {
      fill_block();
      cursor_ = 0;
    }
    return out_[cursor_++];
  }

  /// Uniform in [0,1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool next_bernoulli(double p) { return next_double() < p; }

  std::uint64_t key() const { return key_; }
  std::uint64_t stream() const { return stream_; }

  /// Raw block function, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 4>& counter,
                                            const std::array<std::uint32_t, 2>& key);

 private:
  void fill_block();

  std::uint64_t key_ = 0;
  std::uint64_t stream_ = 0;
  std::uint64_t block_index_ = 0;
  std::array<std::uint64_t, 2> out_{};
  int cursor_ = 2;
};

/// Seed derivation for nested experiments (one sub-seed per sweep point).
/// SplitMix64 finalizer applied to master ^ mix(index + 1); documented so
/// results stay portable across implementations.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t index);

}  // namespace urnkit
