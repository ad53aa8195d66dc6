#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace sdrqc {

// Dense binary matrix, row-major. Weights only ever go 0 -> 1.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::uint32_t rows, std::uint32_t cols)
      : rows_(rows), cols_(cols), cells_(std::size_t{rows} * cols, 0) {}

  [[nodiscard]] std::uint32_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::uint32_t cols() const noexcept { return cols_; }
  [[nodiscard]] std::size_t size() const noexcept { return cells_.size(); }

  [[nodiscard]] bool get(std::uint32_t row, std::uint32_t col) const noexcept {
    return cells_[std::size_t{row} * cols_ + col] != 0;
  }

  // Sets the weight to 1; returns true if it was 0.
  bool set(std::uint32_t row, std::uint32_t col) noexcept {
    auto& cell = cells_[std::size_t{row} * cols_ + col];
    const bool was_zero = cell == 0;
    cell = 1;
    return was_zero;
  }

  [[nodiscard]] std::size_t count_ones() const noexcept {
    std::size_t n = 0;
    for (auto c : cells_) n += c;
    return n;
  }

  [[nodiscard]] bool cell(std::size_t flat_index) const noexcept { return cells_[flat_index] != 0; }
  void assign_cell(std::size_t flat_index, bool on) noexcept { cells_[flat_index] = on ? 1 : 0; }

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  std::uint32_t rows_ = 0;
  std::uint32_t cols_ = 0;
  std::vector<std::uint8_t> cells_;
};

}  // namespace sdrqc
