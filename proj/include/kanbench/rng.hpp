#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace kanbench {

// Deterministic random stream identified by (master seed, stream id).
//
// The engine seed is a SplitMix64 hash of both inputs, so any stream can be
// recreated in isolation without replaying the ones before it.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);
  // One N(0,1) draw (Box-Muller; the paired value is cached).
  double normal();

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t stream_id_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

RngStream rng_derive(std::uint64_t master_seed, std::uint64_t stream_id);

// n i.i.d. standard normal draws.
std::vector<double> standard_normal(RngStream& rng, std::size_t n);

}  // namespace kanbench
