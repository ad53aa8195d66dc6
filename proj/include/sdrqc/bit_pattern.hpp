#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sdrqc {

// Fixed-width binary pattern of the input or output field.
class BitPattern {
 public:
  BitPattern() = default;
  explicit BitPattern(std::uint32_t width) : bits_(width, 0) {}

  // Pattern of `width` bits with the listed indices set. Throws WidthMismatch
  // on an out-of-range index.
  static BitPattern from_indices(std::uint32_t width, const std::vector<std::uint32_t>& on);

  // Parses a string of '0'/'1' characters. Throws FormatError.
  static BitPattern parse(std::string_view text);

  [[nodiscard]] std::uint32_t width() const noexcept { return static_cast<std::uint32_t>(bits_.size()); }
  [[nodiscard]] bool test(std::uint32_t i) const { return bits_.at(i) != 0; }
  void set(std::uint32_t i, bool on = true) { bits_.at(i) = on ? 1 : 0; }

  [[nodiscard]] std::uint32_t count() const noexcept;
  [[nodiscard]] std::vector<std::uint32_t> active() const;
  [[nodiscard]] std::string to_string() const;

  // |a AND b| and |a OR b|. Widths must match.
  friend std::uint32_t overlap(const BitPattern& a, const BitPattern& b);
  friend std::uint32_t union_count(const BitPattern& a, const BitPattern& b);

  friend bool operator==(const BitPattern&, const BitPattern&) = default;
  friend auto operator<=>(const BitPattern&, const BitPattern&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

std::uint32_t overlap(const BitPattern& a, const BitPattern& b);
std::uint32_t union_count(const BitPattern& a, const BitPattern& b);

}  // namespace sdrqc
