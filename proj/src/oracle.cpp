#include "sdrqc/oracle.hpp"

#include <algorithm>

#include "sdrqc/errors.hpp"

namespace sdrqc {

void Registry::add(std::string label, BitPattern input, Code code) {
  if (label.empty() || label.find_first_of("\t\n\r") != std::string::npos) {
    throw FormatError("registry labels must be nonempty and free of tabs/newlines");
  }
  if (index_.contains(label)) throw DuplicateLabel("duplicate label '" + label + "'");
  if (!entries_.empty()) {
    const auto& first = entries_.front();
    if (first.input.width() != input.width()) throw WidthMismatch("registry input width mismatch");
    if (first.code.q() != code.q() || first.code.k() != code.k()) throw WidthMismatch("registry code geometry mismatch");
  }
  index_.emplace(label, entries_.size());
  entries_.push_back(RegistryEntry{std::move(label), std::move(input), std::move(code)});
}

const RegistryEntry* Registry::find(std::string_view label) const {
  auto it = index_.find(label);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

std::string Registry::dump() const {
  std::string out;
  for (const auto& e : entries_) {
    out += e.label;
    out += '\t';
    out += e.input.to_string();
    out += '\t';
    out += e.code.to_string();
    out += '\n';
  }
  return out;
}

Registry Registry::parse(std::string_view text, const FieldGeometry& geometry) {
  Registry registry;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos) throw FormatError("registry line " + std::to_string(line_no) + " needs 3 fields");
    registry.add(std::string(line.substr(0, t1)), BitPattern::parse(line.substr(t1 + 1, t2 - t1 - 1)),
                 Code::parse(line.substr(t2 + 1), geometry));
  }
  return registry;
}

ScanResult linear_scan_best_match(const Registry& registry, const BitPattern& query, CostReport& cost) {
  if (registry.empty()) throw Error("linear scan over an empty registry");
  const auto width = registry.entries().front().input.width();
  if (query.width() != width) throw WidthMismatch("query width differs from registry width");

  // Similarities are compared as exact fractions; an empty union counts as 1.
  std::uint64_t best_num = 0;
  std::uint64_t best_den = 1;
  std::size_t best = 0;
  bool tie = false;
  for (std::size_t i = 0; i < registry.size(); ++i) {
    const auto& input = registry.entries()[i].input;
    std::uint32_t inter = 0;
    std::uint32_t uni = 0;
    for (std::uint32_t b = 0; b < width; ++b) {
      const bool x = input.test(b);
      const bool y = query.test(b);
      inter += (x && y) ? 1 : 0;
      uni += (x || y) ? 1 : 0;
    }
    cost.weight_reads += width;
    std::uint64_t num = inter;
    std::uint64_t den = uni;
    if (uni == 0) num = den = 1;

    cost.comparisons += 1;
    if (i == 0) {
      best_num = num;
      best_den = den;
      continue;
    }
    const auto lhs = num * best_den;
    const auto rhs = best_num * den;
    if (lhs > rhs) {
      best_num = num;
      best_den = den;
      best = i;
      tie = false;
    } else if (lhs == rhs) {
      tie = true;
    }
  }
  return ScanResult{registry.entries()[best].label, static_cast<double>(best_num) / static_cast<double>(best_den), tie};
}

double ExplicitSuperposition::total() const noexcept {
  double sum = 0.0;
  for (double c : coeffs) sum += c;
  return sum;
}

std::vector<double> ExplicitSuperposition::normalized() const {
  std::vector<double> out(coeffs.size(), 0.0);
  const double sum = total();
  if (sum > 0.0) {
    for (std::size_t i = 0; i < coeffs.size(); ++i) out[i] = coeffs[i] / sum;
  }
  return out;
}

double ExplicitSuperposition::coeff(std::string_view label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw Error("unknown label '" + std::string(label) + "'");
  return coeffs[static_cast<std::size_t>(it - labels.begin())];
}

ExplicitSuperposition superposition_from_code(const Registry& registry, const Code& active) {
  ExplicitSuperposition s;
  for (const auto& e : registry.entries()) {
    const Likelihood level = likelihood(e.code, active);
    s.labels.push_back(e.label);
    s.levels.push_back(level);
    s.coeffs.push_back(level.value());
  }
  return s;
}

void TransitionTable::add(const Registry& registry, const std::string& from, const std::string& to, std::uint64_t count) {
  if (registry.find(from) == nullptr || registry.find(to) == nullptr) {
    throw Error("transition references an unregistered label (" + from + " -> " + to + ")");
  }
  rows_[from][to] += count;
}

std::uint64_t TransitionTable::count(const std::string& from, const std::string& to) const {
  auto row = rows_.find(from);
  if (row == rows_.end()) return 0;
  auto cell = row->second.find(to);
  return cell == row->second.end() ? 0 : cell->second;
}

std::uint64_t TransitionTable::row_total(const std::string& from) const {
  auto row = rows_.find(from);
  if (row == rows_.end()) return 0;
  std::uint64_t total = 0;
  for (const auto& [to, n] : row->second) total += n;
  return total;
}

ExplicitSuperposition evolve_explicit(const ExplicitSuperposition& super, const TransitionTable& table) {
  ExplicitSuperposition next;
  next.labels = super.labels;
  next.coeffs.assign(super.labels.size(), 0.0);
  auto slot = [&next](const std::string& label) -> double& {
    auto it = std::find(next.labels.begin(), next.labels.end(), label);
    if (it != next.labels.end()) return next.coeffs[static_cast<std::size_t>(it - next.labels.begin())];
    next.labels.push_back(label);
    next.coeffs.push_back(0.0);
    return next.coeffs.back();
  };

  for (std::size_t i = 0; i < super.labels.size(); ++i) {
    const double mass = super.coeffs[i];
    if (mass == 0.0) continue;
    const std::uint64_t total = table.row_total(super.labels[i]);
    if (total == 0) continue;
    const auto row = table.rows().find(super.labels[i]);
    for (const auto& [to, n] : row->second) {
      slot(to) += mass * static_cast<double>(n) / static_cast<double>(total);
    }
  }
  next.coeffs = next.normalized();
  return next;
}

}  // namespace sdrqc
