#include "sdrqc/coding_field.hpp"

#include <charconv>
#include <limits>

#include "sdrqc/errors.hpp"

namespace sdrqc {

void FieldGeometry::validate() const {
  if (q < 1 || k < 1 || n_in < 1 || n_out < 1) {
    throw GeometryError("geometry requires q, k, n_in, n_out >= 1 (got q=" + std::to_string(q) +
                        " k=" + std::to_string(k) + " n_in=" + std::to_string(n_in) +
                        " n_out=" + std::to_string(n_out) + ")");
  }
  if (std::uint64_t{q} * k > std::numeric_limits<std::uint32_t>::max()) {
    throw GeometryError("q*k exceeds the unit index range");
  }
}

Code::Code(std::vector<std::uint32_t> winners, std::uint32_t k) : winners_(std::move(winners)), k_(k) {
  if (winners_.empty() || k_ == 0) throw WidthMismatch("code needs q >= 1 clusters and k >= 1");
  for (std::size_t c = 0; c < winners_.size(); ++c) {
    if (winners_[c] >= k_) {
      throw WidthMismatch("winner " + std::to_string(winners_[c]) + " out of range in cluster " +
                          std::to_string(c));
    }
  }
}

std::string Code::to_string() const {
  std::string out;
  for (std::size_t c = 0; c < winners_.size(); ++c) {
    if (c) out += ':';
    out += std::to_string(winners_[c]);
  }
  return out;
}

Code Code::parse(std::string_view text, const FieldGeometry& geometry) {
  std::vector<std::uint32_t> winners;
  winners.reserve(geometry.q);
  const char* p = text.data();
  const char* end = text.data() + text.size();
  while (true) {
    std::uint32_t w = 0;
    auto [next, ec] = std::from_chars(p, end, w);
    if (ec != std::errc{} || next == p) throw FormatError("bad code text: '" + std::string(text) + "'");
    winners.push_back(w);
    p = next;
    if (p == end) break;
    if (*p != ':') throw FormatError("bad code text: '" + std::string(text) + "'");
    ++p;
  }
  if (winners.size() != geometry.q) {
    throw WidthMismatch("code has " + std::to_string(winners.size()) + " clusters, geometry has " +
                        std::to_string(geometry.q));
  }
  return Code(std::move(winners), geometry.k);
}

std::uint64_t num_codes(const FieldGeometry& geometry) {
  geometry.validate();
  std::uint64_t n = 1;
  for (std::uint32_t c = 0; c < geometry.q; ++c) {
    if (n > std::numeric_limits<std::uint64_t>::max() / geometry.k) {
      throw CapacityOverflow("capacity overflow: " + std::to_string(geometry.k) + "^" +
                             std::to_string(geometry.q) + " exceeds 2^64-1");
    }
    n *= geometry.k;
  }
  return n;
}

std::uint64_t num_levels(const FieldGeometry& geometry) {
  geometry.validate();
  return std::uint64_t{geometry.q} + 1;
}

std::uint32_t intersection(const Code& a, const Code& b) {
  if (a.q() != b.q() || a.k() != b.k()) throw WidthMismatch("geometry mismatch between codes");
  std::uint32_t n = 0;
  for (std::uint32_t c = 0; c < a.q(); ++c) n += a.winners()[c] == b.winners()[c] ? 1 : 0;
  return n;
}

Likelihood likelihood(const Code& stored, const Code& active) {
  return Likelihood{intersection(stored, active), stored.q()};
}

Code random_code(const FieldGeometry& geometry, Rng& rng) {
  geometry.validate();
  std::vector<std::uint32_t> winners(geometry.q);
  for (auto& w : winners) w = static_cast<std::uint32_t>(rng.below(geometry.k));
  return Code(std::move(winners), geometry.k);
}

}  // namespace sdrqc
