#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace k4c {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3", SC'11). Counter-based: output is a pure function of
/// (counter, key), so streams never share state.
inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t m0 = 0xD2511F53U, m1 = 0xCD9E8D57U;
  constexpr std::uint32_t w0 = 0x9E3779B9U, w1 = 0xBB67AE85U;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += w0;
      key[1] += w1;
    }
    std::uint64_t p0 = std::uint64_t{m0} * ctr[0];
    std::uint64_t p1 = std::uint64_t{m1} * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
  }
  return ctr;
}

namespace detail {
inline std::uint64_t philox_u64(std::uint64_t key, std::uint64_t ctr_lo, std::uint64_t ctr_hi) {
  auto out = philox4x32_10({static_cast<std::uint32_t>(ctr_lo), static_cast<std::uint32_t>(ctr_lo >> 32),
                            static_cast<std::uint32_t>(ctr_hi), static_cast<std::uint32_t>(ctr_hi >> 32)},
                           {static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)});
  return std::uint64_t{out[0]} | (std::uint64_t{out[1]} << 32);
}
}  // namespace detail

/// Identifies one random stream: Philox key = base_seed, upper counter
/// half = stream_id. Identical specs give identical draws on every platform.
struct RngSpec {
  std::uint64_t base_seed = 0;
  std::uint64_t stream_id = 0;

  /// Independent sub-stream `index` of this stream. The child key is drawn
  /// from the reserved last block of the parent stream.
  RngSpec child(std::uint64_t index) const {
    return {detail::philox_u64(base_seed, ~std::uint64_t{0}, stream_id), index};
  }

  friend bool operator==(const RngSpec&, const RngSpec&) = default;
};

/// Version tag recorded in reports; bump if the generator or any derivation changes.
inline constexpr const char* kRngVersion = "philox4x32-10/v1";

/// Sequential generator over one stream. Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(RngSpec spec) : spec_(spec) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (used_ == 2) {
      auto out = philox4x32_10({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                static_cast<std::uint32_t>(spec_.stream_id),
                                static_cast<std::uint32_t>(spec_.stream_id >> 32)},
                               {static_cast<std::uint32_t>(spec_.base_seed),
                                static_cast<std::uint32_t>(spec_.base_seed >> 32)});
      buf_[0] = std::uint64_t{out[0]} | (std::uint64_t{out[1]} << 32);
      buf_[1] = std::uint64_t{out[2]} | (std::uint64_t{out[3]} << 32);
      ++block_;
      used_ = 0;
    }
    return buf_[used_++];
  }

  /// Uniform integer in [0, bound), bound >= 1 (Lemire's multiply-shift with rejection).
  std::uint64_t below(std::uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform integer in [lo, hi].
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }

 private:
  RngSpec spec_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buf_{};
  int used_ = 2;
};

/// Seed recorded for trial `trial` of grid cell `cell`; every random choice
/// of that trial is drawn from streams of RngSpec{trial_seed(...), k}.
inline std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t cell, std::uint64_t trial) {
  return detail::philox_u64(base_seed ^ 0x747269616c736565ULL, trial, cell);
}

/// Seed for objects shared by all trials of an experiment (fixed pairs, G1).
inline std::uint64_t fixture_seed(std::uint64_t base_seed) {
  return detail::philox_u64(base_seed ^ 0x6669787475726573ULL, 0, 0);
}

}  // namespace k4c
