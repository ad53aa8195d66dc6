#pragma once

// Geometry and algebra of codes in a field of winner-take-all clusters.
//
// A coding field has q clusters of k binary units. A code activates exactly
// one unit per cluster, so k^q codes exist and any two codes intersect in
// 0..q units. The intersection size between a stored code and the active
// code is that stored code's strength: q + 1 distinct levels.

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sdrqc/rng.hpp"

namespace sdrqc {

struct FieldGeometry {
  std::uint32_t q = 1;      // WTA clusters
  std::uint32_t k = 1;      // units per cluster
  std::uint32_t n_in = 1;   // input field width
  std::uint32_t n_out = 1;  // output field width

  // Throws GeometryError unless every dimension is >= 1 and q*k fits.
  void validate() const;

  [[nodiscard]] std::uint32_t units() const noexcept { return q * k; }

  friend bool operator==(const FieldGeometry&, const FieldGeometry&) = default;
};

// One winner per cluster, stored as cluster-local indices in [0, k).
class Code {
 public:
  Code() = default;
  // Throws WidthMismatch if any winner is out of [0, k) or the code is empty.
  Code(std::vector<std::uint32_t> winners, std::uint32_t k);

  [[nodiscard]] std::uint32_t q() const noexcept { return static_cast<std::uint32_t>(winners_.size()); }
  [[nodiscard]] std::uint32_t k() const noexcept { return k_; }
  [[nodiscard]] std::uint32_t winner(std::uint32_t cluster) const { return winners_.at(cluster); }
  [[nodiscard]] const std::vector<std::uint32_t>& winners() const noexcept { return winners_; }

  // Index of the cluster's winner in the flat q*k unit layout.
  [[nodiscard]] std::uint32_t unit(std::uint32_t cluster) const { return cluster * k_ + winners_.at(cluster); }

  // True when this code belongs to `geometry` (same q and k).
  [[nodiscard]] bool fits(const FieldGeometry& geometry) const noexcept {
    return q() == geometry.q && k_ == geometry.k;
  }

  // `c0:c1:...:c(q-1)`.
  [[nodiscard]] std::string to_string() const;
  static Code parse(std::string_view text, const FieldGeometry& geometry);

  friend bool operator==(const Code&, const Code&) = default;

 private:
  std::vector<std::uint32_t> winners_;
  std::uint32_t k_ = 0;
};

// Exact strength level numerator/denominator, denominator = q.
struct Likelihood {
  std::uint32_t numerator = 0;
  std::uint32_t denominator = 1;

  [[nodiscard]] double value() const noexcept {
    return static_cast<double>(numerator) / static_cast<double>(denominator);
  }

  friend bool operator==(const Likelihood& a, const Likelihood& b) noexcept {
    return std::uint64_t{a.numerator} * b.denominator == std::uint64_t{b.numerator} * a.denominator;
  }
  friend std::strong_ordering operator<=>(const Likelihood& a, const Likelihood& b) noexcept {
    return std::uint64_t{a.numerator} * b.denominator <=> std::uint64_t{b.numerator} * a.denominator;
  }
};

// k^q. Throws CapacityOverflow when the result exceeds uint64_t.
[[nodiscard]] std::uint64_t num_codes(const FieldGeometry& geometry);

// q + 1 intersection sizes are possible between two codes.
[[nodiscard]] std::uint64_t num_levels(const FieldGeometry& geometry);

// Number of clusters in which a and b pick the same unit.
[[nodiscard]] std::uint32_t intersection(const Code& a, const Code& b);

// intersection(stored, active) / q.
[[nodiscard]] Likelihood likelihood(const Code& stored, const Code& active);

// Uniform winner per cluster, drawn in cluster order from `rng`.
[[nodiscard]] Code random_code(const FieldGeometry& geometry, Rng& rng);

}  // namespace sdrqc
