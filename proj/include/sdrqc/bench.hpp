#pragma once

// Cost-accounting experiments: SDR vs localist scaling, and the
// similar-inputs-to-similar-codes (SISC) sweep.

#include <cstdint>
#include <string>
#include <vector>

#include "sdrqc/bit_pattern.hpp"
#include "sdrqc/cost.hpp"
#include "sdrqc/memory.hpp"
#include "sdrqc/rng.hpp"

namespace sdrqc {

enum class ReportFormat { csv, jsonl };

struct ScalingRow {
  std::uint64_t stored_count = 0;
  CostReport sdr_store;
  CostReport sdr_query;
  CostReport localist_query;
  bool sdr_recalled = false;       // SDR query returned the probe's stored code
  bool localist_recalled = false;  // linear scan returned the probe's label
};

struct ScalingReport {
  std::vector<ScalingRow> rows;
};

struct ScalingOptions {
  std::uint32_t active_bits = 32;
  bool measure_wall = false;  // wall columns stay 0 unless set
};

struct SiscRow {
  double input_overlap = 0.0;
  double mean_code_intersection = 0.0;
  double std = 0.0;
};

struct SiscReport {
  std::vector<SiscRow> rows;
  double spearman_rho = 0.0;
  std::uint32_t q = 0;
  std::uint32_t k = 0;
};

struct SiscOptions {
  std::uint32_t active_bits = 20;
};

// Outcome of an experiment's built-in assertions.
struct Verdict {
  bool pass = true;
  std::vector<std::string> failures;
};

// `count` distinct patterns of `width` bits with exactly `active` bits set.
// Throws GenerationError when fewer than `count` such patterns exist.
[[nodiscard]] std::vector<BitPattern> random_patterns(std::uint32_t width, std::uint32_t active, std::uint64_t count,
                                                      Rng& rng);
[[nodiscard]] BitPattern random_pattern(std::uint32_t width, std::uint32_t active, Rng& rng);

// Same active count as `base`, sharing exactly `shared` of its active bits.
// Throws GenerationError when that is impossible at base's width.
[[nodiscard]] BitPattern perturb(const BitPattern& base, std::uint32_t shared, Rng& rng);

// Moves `moved` of base's active bits to inactive positions.
[[nodiscard]] inline BitPattern corrupt(const BitPattern& base, std::uint32_t moved, Rng& rng) {
  return perturb(base, base.count() - moved, rng);
}

// Sizes must be nonempty, >= 1 and strictly increasing.
[[nodiscard]] ScalingReport run_scaling(const ModelParams& params, const std::vector<std::uint64_t>& sizes,
                                        std::uint64_t pattern_seed, const ScalingOptions& options = {});

[[nodiscard]] SiscReport run_sisc(const ModelParams& params, const std::vector<double>& overlap_levels,
                                  std::uint32_t trials, std::uint64_t seed, const SiscOptions& options = {});

// SDR store/query counters equal across rows; localist counters affine in size.
[[nodiscard]] Verdict check_scaling(const ScalingReport& report);
// rho >= min_rho; level 1.0 mean == q; level 0.0 mean within 15% of q/k.
[[nodiscard]] Verdict check_sisc(const SiscReport& report, double min_rho = 0.8);

// True when every y lies exactly on the line through the first two points.
[[nodiscard]] bool fits_affine(const std::vector<std::uint64_t>& x, const std::vector<std::uint64_t>& y);

// Spearman rank correlation with average ranks for ties; 0 when a side is constant.
[[nodiscard]] double spearman(const std::vector<double>& x, const std::vector<double>& y);

[[nodiscard]] std::string emit_report(const ScalingReport& report, ReportFormat format);
[[nodiscard]] std::string emit_report(const SiscReport& report, ReportFormat format);

}  // namespace sdrqc
