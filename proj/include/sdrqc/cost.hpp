#pragma once

#include <cstdint>

namespace sdrqc {

// Exact atomic-operation counts for one or more memory operations.
//
// One weight read or write attempt is one tick (a write ticks even when the
// weight was already 1); `weights_set` separately counts writes that flipped
// a 0 to 1. One comparison per max/argmax/threshold comparison, one rng draw
// per sampled value. Wall time is advisory and never part of equality.
struct CostReport {
  std::uint64_t weight_reads = 0;
  std::uint64_t weight_writes = 0;
  std::uint64_t weights_set = 0;
  std::uint64_t comparisons = 0;
  std::uint64_t rng_draws = 0;
  std::uint64_t wall_nanos = 0;

  CostReport& operator+=(const CostReport& o) noexcept {
    weight_reads += o.weight_reads;
    weight_writes += o.weight_writes;
    weights_set += o.weights_set;
    comparisons += o.comparisons;
    rng_draws += o.rng_draws;
    wall_nanos += o.wall_nanos;
    return *this;
  }

  friend CostReport operator-(CostReport a, const CostReport& b) noexcept {
    a.weight_reads -= b.weight_reads;
    a.weight_writes -= b.weight_writes;
    a.weights_set -= b.weights_set;
    a.comparisons -= b.comparisons;
    a.rng_draws -= b.rng_draws;
    a.wall_nanos -= b.wall_nanos;
    return a;
  }
};

// The fixed-cost tuple: reads, write attempts, comparisons, rng draws.
[[nodiscard]] inline bool same_counters(const CostReport& a, const CostReport& b) noexcept {
  return a.weight_reads == b.weight_reads && a.weight_writes == b.weight_writes &&
         a.comparisons == b.comparisons && a.rng_draws == b.rng_draws;
}

}  // namespace sdrqc
