#include "sdrqc/bit_pattern.hpp"

#include "sdrqc/errors.hpp"

namespace sdrqc {

BitPattern BitPattern::from_indices(std::uint32_t width, const std::vector<std::uint32_t>& on) {
  BitPattern p(width);
  for (auto i : on) {
    if (i >= width) throw WidthMismatch("bit index " + std::to_string(i) + " outside width " + std::to_string(width));
    p.bits_[i] = 1;
  }
  return p;
}

BitPattern BitPattern::parse(std::string_view text) {
  BitPattern p(static_cast<std::uint32_t>(text.size()));
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '1') {
      p.bits_[i] = 1;
    } else if (text[i] != '0') {
      throw FormatError("pattern contains non 0/1 character at column " + std::to_string(i));
    }
  }
  return p;
}

std::uint32_t BitPattern::count() const noexcept {
  std::uint32_t n = 0;
  for (auto b : bits_) n += b;
  return n;
}

std::vector<std::uint32_t> BitPattern::active() const {
  std::vector<std::uint32_t> on;
  for (std::uint32_t i = 0; i < width(); ++i) {
    if (bits_[i]) on.push_back(i);
  }
  return on;
}

std::string BitPattern::to_string() const {
  std::string s(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) s[i] = '1';
  }
  return s;
}

std::uint32_t overlap(const BitPattern& a, const BitPattern& b) {
  if (a.width() != b.width()) throw WidthMismatch("pattern widths differ");
  std::uint32_t n = 0;
  for (std::size_t i = 0; i < a.bits_.size(); ++i) n += a.bits_[i] & b.bits_[i];
  return n;
}

std::uint32_t union_count(const BitPattern& a, const BitPattern& b) {
  if (a.width() != b.width()) throw WidthMismatch("pattern widths differ");
  std::uint32_t n = 0;
  for (std::size_t i = 0; i < a.bits_.size(); ++i) n += a.bits_[i] | b.bits_[i];
  return n;
}

}  // namespace sdrqc
