#pragma once

#include <array>
#include <cstdint>

namespace irtid {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A block is a
/// pure function of (counter, key), so any respondent's stream can be
/// generated independently of every other one.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter counter, Key key);
};

/// Sequential view of one Philox stream: key = seed, counter = (stream, block).
/// Streams with different ids never overlap.
class PhiloxStream {
 public:
  PhiloxStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0,1) with 53 random bits.
  double next_uniform();

 private:
  void refill();

  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Philox4x32::Counter buffer_{};
  int used_ = 4;  // 32-bit words consumed from buffer_
};

}  // namespace irtid
