#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "levylab/grid.hpp"

namespace levylab {

/// Root seed plus a domain-separator label. The pair, together with a path
/// index, fully determines a random stream; identical inputs give
/// bit-identical paths no matter how work is scheduled.
struct SeedSpec {
  std::uint64_t seed = 1;
  std::string label;
};

/// 64-bit key derived from (seed, label); stable across platforms.
std::uint64_t stream_key(const SeedSpec& seeds);

namespace detail {
/// One Philox4x32-10 block: 4 output words from a 128-bit counter and
/// 64-bit key. Salmon et al., "Parallel random numbers: as easy as 1, 2, 3".
void philox4x32_10(const std::uint32_t ctr[4], const std::uint32_t key[2],
                   std::uint32_t out[4]);
}  // namespace detail

/// Counter-based random stream: the draw sequence is a pure function of
/// (key, stream_id). Streams for distinct ids are disjoint counter blocks.
class PhiloxStream {
 public:
  PhiloxStream(std::uint64_t key, std::uint64_t stream_id)
      : key_(key), stream_(stream_id) {}

  std::uint64_t next_u64();

  /// Uniform on [0, 1), 53-bit resolution.
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via the Marsaglia polar method.
  double next_normal();

 private:
  std::uint64_t key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;   // low half of the 128-bit counter
  std::uint32_t buf_[4] = {}; // current philox block
  int buf_pos_ = 2;           // u64s consumed from buf_ (2 == empty)
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// i.i.d. N(0, dt) increments for path `path_index`; out is resized to steps.
void sample_increments(const TimeGrid& grid, const SeedSpec& seeds,
                       std::uint64_t path_index, Eigen::ArrayXd& out);

/// Brownian path: values[0] = 0, cumulative sum of N(0, dt) increments.
Path sample_path(const TimeGrid& grid, const SeedSpec& seeds,
                 std::uint64_t path_index);

/// Same, reusing p's storage; p.grid is overwritten with `grid`.
void sample_path_into(Path& p, const TimeGrid& grid, const SeedSpec& seeds,
                      std::uint64_t path_index);

}  // namespace levylab
