#include "levylab/rng.hpp"

#include <cmath>

namespace levylab {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace

namespace detail {

void philox4x32_10(const std::uint32_t ctr[4], const std::uint32_t key[2],
                   std::uint32_t out[4]) {
  std::uint32_t c0 = ctr[0], c1 = ctr[1], c2 = ctr[2], c3 = ctr[3];
  std::uint32_t k0 = key[0], k1 = key[1];
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k0 += kPhiloxW0;
      k1 += kPhiloxW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c0, hi0, lo0);
    mulhilo(kPhiloxM1, c2, hi1, lo1);
    const std::uint32_t n0 = hi1 ^ c1 ^ k0;
    const std::uint32_t n2 = hi0 ^ c3 ^ k1;
    c0 = n0;
    c1 = lo1;
    c2 = n2;
    c3 = lo0;
  }
  out[0] = c0;
  out[1] = c1;
  out[2] = c2;
  out[3] = c3;
}

}  // namespace detail

std::uint64_t stream_key(const SeedSpec& seeds) {
  return splitmix64_mix(splitmix64_mix(seeds.seed) ^ fnv1a64(seeds.label));
}

std::uint64_t PhiloxStream::next_u64() {
  if (buf_pos_ >= 2) {
    const std::uint32_t ctr[4] = {
        static_cast<std::uint32_t>(block_),
        static_cast<std::uint32_t>(block_ >> 32),
        static_cast<std::uint32_t>(stream_),
        static_cast<std::uint32_t>(stream_ >> 32)};
    const std::uint32_t key[2] = {static_cast<std::uint32_t>(key_),
                                  static_cast<std::uint32_t>(key_ >> 32)};
    detail::philox4x32_10(ctr, key, buf_);
    ++block_;
    buf_pos_ = 0;
  }
  const int i = 2 * buf_pos_++;
  return static_cast<std::uint64_t>(buf_[i]) |
         (static_cast<std::uint64_t>(buf_[i + 1]) << 32);
}

double PhiloxStream::next_normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * next_uniform() - 1.0;
    v = 2.0 * next_uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  have_spare_ = true;
  return u * f;
}

void sample_increments(const TimeGrid& grid, const SeedSpec& seeds,
                       std::uint64_t path_index, Eigen::ArrayXd& out) {
  out.resize(grid.steps);
  PhiloxStream stream(stream_key(seeds), path_index);
  const double sqrt_dt = std::sqrt(grid.dt);
  for (std::int64_t i = 0; i < grid.steps; ++i)
    out[i] = sqrt_dt * stream.next_normal();
}

void sample_path_into(Path& p, const TimeGrid& grid, const SeedSpec& seeds,
                      std::uint64_t path_index) {
  p.grid = grid;
  p.values.resize(grid.steps + 1);
  PhiloxStream stream(stream_key(seeds), path_index);
  const double sqrt_dt = std::sqrt(grid.dt);
  p.values[0] = 0.0;
  double acc = 0.0;
  for (std::int64_t i = 0; i < grid.steps; ++i) {
    acc += sqrt_dt * stream.next_normal();
    p.values[i + 1] = acc;
  }
}

Path sample_path(const TimeGrid& grid, const SeedSpec& seeds,
                 std::uint64_t path_index) {
  Path p;
  sample_path_into(p, grid, seeds, path_index);
  return p;
}

}  // namespace levylab
