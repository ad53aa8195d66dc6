#pragma once

// Localist reference: one explicit slot per stored state.
//
// Everything here deliberately costs O(stored items): the registry is scanned
// entry by entry and every coefficient of an explicit superposition is its own
// number. It is both the correctness oracle for SdrMemory and the scaling foil.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sdrqc/bit_pattern.hpp"
#include "sdrqc/coding_field.hpp"
#include "sdrqc/cost.hpp"

namespace sdrqc {

struct RegistryEntry {
  std::string label;
  BitPattern input;
  Code code;
};

class Registry {
 public:
  // Appends an entry. Throws DuplicateLabel, WidthMismatch (input width or code
  // geometry differs from earlier entries), FormatError (label with tab/newline).
  void add(std::string label, BitPattern input, Code code);

  [[nodiscard]] const std::vector<RegistryEntry>& entries() const noexcept { return entries_; }
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
  [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }
  [[nodiscard]] const RegistryEntry* find(std::string_view label) const;

  // `label<TAB>bitstring<TAB>code-text` per line.
  [[nodiscard]] std::string dump() const;
  static Registry parse(std::string_view text, const FieldGeometry& geometry);

 private:
  std::vector<RegistryEntry> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

struct ScanResult {
  std::string label;
  double similarity = 0.0;  // Jaccard |q AND x| / |q OR x|
  bool tie = false;         // another entry reached the same similarity
};

// Best Jaccard match by exhaustive scan; ties go to the earliest entry.
// Costs input-width reads and one comparison per entry. Throws Error when the
// registry is empty, WidthMismatch on width mismatch.
[[nodiscard]] ScanResult linear_scan_best_match(const Registry& registry, const BitPattern& query, CostReport& cost);

// Explicit per-label coefficients (the localist amplitude vector).
struct ExplicitSuperposition {
  std::vector<std::string> labels;
  std::vector<double> coeffs;
  std::vector<Likelihood> levels;  // exact levels when built from a code, else empty

  [[nodiscard]] double total() const noexcept;
  // Coefficients divided by their sum; all zeros when the sum is zero.
  [[nodiscard]] std::vector<double> normalized() const;
  // Throws Error for an unknown label.
  [[nodiscard]] double coeff(std::string_view label) const;
};

// coeffs[label] = likelihood(entry.code, active).
[[nodiscard]] ExplicitSuperposition superposition_from_code(const Registry& registry, const Code& active);

class TransitionTable {
 public:
  // Throws Error when either label is not registered.
  void add(const Registry& registry, const std::string& from, const std::string& to, std::uint64_t count = 1);

  [[nodiscard]] std::uint64_t count(const std::string& from, const std::string& to) const;
  [[nodiscard]] std::uint64_t row_total(const std::string& from) const;
  [[nodiscard]] const std::map<std::string, std::map<std::string, std::uint64_t>>& rows() const noexcept {
    return rows_;
  }

 private:
  std::map<std::string, std::map<std::string, std::uint64_t>> rows_;
};

// One row-normalized Markov step over the explicit coefficients, renormalized.
// Targets missing from the input's label list are appended.
[[nodiscard]] ExplicitSuperposition evolve_explicit(const ExplicitSuperposition& super, const TransitionTable& table);

}  // namespace sdrqc
