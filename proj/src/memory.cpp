#include "sdrqc/memory.hpp"

#include <cmath>
#include <string>

#include "sdrqc/errors.hpp"

namespace sdrqc {

void ModelParams::validate() const {
  geometry.validate();
  if (!std::isfinite(tau_min) || !std::isfinite(tau_max) || !(tau_min > 0.0) || !(tau_max > tau_min)) {
    throw GeometryError("temperatures must satisfy 0 < tau_min < tau_max (got tau_min=" +
                        std::to_string(tau_min) + " tau_max=" + std::to_string(tau_max) + ")");
  }
}

std::vector<double> Activation::normalized() const {
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = static_cast<double>(raw[i]) / divisor;
  return out;
}

Likelihood implied_likelihood(const Activation& activation, const Code& code) {
  if (activation.cluster_max.size() != code.q() || activation.raw.size() != std::size_t{code.q()} * code.k()) {
    throw WidthMismatch("activation and code geometry differ");
  }
  std::uint32_t n = 0;
  for (std::uint32_t c = 0; c < code.q(); ++c) {
    const auto top = activation.cluster_max[c];
    if (top > 0 && activation.raw[code.unit(c)] == top) ++n;
  }
  return Likelihood{n, code.q()};
}

SdrMemory::SdrMemory(ModelParams params) : params_(std::move(params)) {
  params_.validate();
  const auto& g = params_.geometry;
  f_ = BitMatrix(g.n_in, g.units());
  h_ = BitMatrix(g.units(), g.units());
  d_ = BitMatrix(g.units(), g.n_out);
  last_activation_.raw.assign(g.units(), 0);
  last_activation_.cluster_max.assign(g.q, 0);
  seed_from_content();
}

SdrMemory::SdrMemory(ModelParams params, BitMatrix f, BitMatrix h, BitMatrix d) : params_(std::move(params)) {
  params_.validate();
  const auto& g = params_.geometry;
  if (f.rows() != g.n_in || f.cols() != g.units() || h.rows() != g.units() || h.cols() != g.units() ||
      d.rows() != g.units() || d.cols() != g.n_out) {
    throw WidthMismatch("weight matrix shapes do not match the geometry");
  }
  f_ = std::move(f);
  h_ = std::move(h);
  d_ = std::move(d);
  last_activation_.raw.assign(g.units(), 0);
  last_activation_.cluster_max.assign(g.q, 0);
  seed_from_content();
}

// The generator state is a function of (seed, weights) so a reloaded model
// continues differently from a fresh one without persisting RNG state.
void SdrMemory::seed_from_content() {
  std::uint64_t digest = 0xCBF29CE484222325ULL;
  auto mix = [&digest](const BitMatrix& m) {
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m.cell(i)) {
        digest ^= i + 1;
        digest *= 0x100000001B3ULL;
      }
    }
    digest ^= 0xFF;
    digest *= 0x100000001B3ULL;
  };
  mix(f_);
  mix(h_);
  mix(d_);
  rng_ = Rng(params_.seed).split(digest);
}

void SdrMemory::require_width(const BitPattern& p, std::uint32_t width, const char* what) const {
  if (p.width() != width) {
    throw WidthMismatch(std::string(what) + " width " + std::to_string(p.width()) + " != " + std::to_string(width));
  }
}

Activation SdrMemory::summate_impl(const BitPattern* input, const Code* recurrent_source, CostReport& cost) const {
  const auto& g = geometry();
  const std::uint32_t units = g.units();
  Activation act;
  act.raw.assign(units, 0);
  std::uint32_t sources = 0;

  if (input != nullptr) {
    for (std::uint32_t j = 0; j < g.n_in; ++j) {
      const bool on = input->test(j);
      for (std::uint32_t i = 0; i < units; ++i) {
        if (f_.get(j, i) && on) ++act.raw[i];
      }
    }
    cost.weight_reads += std::uint64_t{g.n_in} * units;
    sources += input->count();
  }
  if (recurrent_source != nullptr) {
    for (std::uint32_t c = 0; c < g.q; ++c) {
      const std::uint32_t from = recurrent_source->unit(c);
      for (std::uint32_t i = 0; i < units; ++i) {
        if (h_.get(from, i)) ++act.raw[i];
      }
    }
    cost.weight_reads += std::uint64_t{g.q} * units;
    sources += g.q;
  }

  act.divisor = sources > 0 ? sources : 1;
  act.cluster_max.assign(g.q, 0);
  std::uint64_t max_sum = 0;
  for (std::uint32_t c = 0; c < g.q; ++c) {
    std::uint32_t top = act.raw[c * g.k];
    for (std::uint32_t w = 1; w < g.k; ++w) top = std::max(top, act.raw[c * g.k + w]);
    act.cluster_max[c] = top;
    max_sum += top;
  }
  cost.comparisons += std::uint64_t{g.q} * (g.k - 1);
  act.familiarity = static_cast<double>(max_sum) / (static_cast<double>(g.q) * act.divisor);
  return act;
}

Activation SdrMemory::summate(const BitPattern& input, bool recurrent, CostReport& cost) const {
  require_width(input, geometry().n_in, "input");
  const Code* source = recurrent && active_ ? &*active_ : nullptr;
  return summate_impl(&input, source, cost);
}

Code SdrMemory::select_code(const Activation& activation, SelectMode mode, Rng& rng, CostReport& cost) const {
  const auto& g = geometry();
  if (activation.raw.size() != g.units() || activation.cluster_max.size() != g.q) {
    throw WidthMismatch("activation does not match the coding field");
  }
  std::vector<std::uint32_t> winners(g.q);
  std::vector<std::uint32_t> tied;
  tied.reserve(g.k);
  std::vector<double> weight(g.k);
  const double tau = params_.temperature(activation.familiarity);

  for (std::uint32_t c = 0; c < g.q; ++c) {
    const std::uint32_t base = c * g.k;
    const std::uint32_t top = activation.cluster_max[c];
    if (mode == SelectMode::argmax) {
      tied.clear();
      for (std::uint32_t w = 0; w < g.k; ++w) {
        if (activation.raw[base + w] == top) tied.push_back(w);
      }
      // One draw per cluster whether or not there is a tie.
      winners[c] = tied[rng.below(tied.size())];
    } else {
      const double top_norm = static_cast<double>(top) / activation.divisor;
      double total = 0.0;
      for (std::uint32_t w = 0; w < g.k; ++w) {
        weight[w] = std::exp((activation.normalized(base + w) - top_norm) / tau);
        total += weight[w];
      }
      const double r = rng.uniform() * total;
      // Full pass so the comparison count does not depend on where r lands.
      double cumulative = 0.0;
      std::uint32_t chosen = g.k - 1;
      bool found = false;
      for (std::uint32_t w = 0; w < g.k; ++w) {
        cumulative += weight[w];
        if (!found && r < cumulative) {
          chosen = w;
          found = true;
        }
      }
      winners[c] = chosen;
    }
  }
  cost.comparisons += std::uint64_t{g.q} * g.k;
  cost.rng_draws += g.q;
  return Code(std::move(winners), g.k);
}

BitPattern SdrMemory::readout(const Code& code, CostReport& cost) const {
  const auto& g = geometry();
  if (!code.fits(g)) throw WidthMismatch("code does not match the coding field");
  BitPattern out(g.n_out);
  const std::uint32_t threshold = readout_threshold();
  for (std::uint32_t j = 0; j < g.n_out; ++j) {
    std::uint32_t votes = 0;
    for (std::uint32_t c = 0; c < g.q; ++c) votes += d_.get(code.unit(c), j) ? 1 : 0;
    if (votes >= threshold) out.set(j);
  }
  cost.weight_reads += std::uint64_t{g.q} * g.n_out;
  cost.comparisons += g.n_out;
  return out;
}

QueryResult SdrMemory::query(const BitPattern& input, Rng& rng, CostReport& cost) const {
  Activation act = summate(input, false, cost);
  Code code = select_code(act, SelectMode::argmax, rng, cost);
  BitPattern out = readout(code, cost);
  return QueryResult{std::move(code), std::move(out), act.familiarity};
}

Activation SdrMemory::summate(const BitPattern& input, bool recurrent) {
  return summate(input, recurrent, counters_);
}

Code SdrMemory::select_code(const Activation& activation, SelectMode mode) {
  return select_code(activation, mode, rng_, counters_);
}

StoreResult SdrMemory::store(const BitPattern& input, const std::optional<BitPattern>& output, bool recurrent) {
  const auto& g = geometry();
  require_width(input, g.n_in, "input");
  if (output) require_width(*output, g.n_out, "output");

  Activation act = summate(input, recurrent, counters_);
  Code code = select_code(act, SelectMode::stochastic, rng_, counters_);

  for (auto j : input.active()) {
    for (std::uint32_t c = 0; c < g.q; ++c) counters_.weights_set += f_.set(j, code.unit(c)) ? 1 : 0;
  }
  counters_.weight_writes += std::uint64_t{input.count()} * g.q;

  if (active_) {
    for (std::uint32_t a = 0; a < g.q; ++a) {
      for (std::uint32_t b = 0; b < g.q; ++b) {
        counters_.weights_set += h_.set(active_->unit(a), code.unit(b)) ? 1 : 0;
      }
    }
    counters_.weight_writes += std::uint64_t{g.q} * g.q;
  }

  if (output) {
    for (std::uint32_t c = 0; c < g.q; ++c) {
      for (auto j : output->active()) counters_.weights_set += d_.set(code.unit(c), j) ? 1 : 0;
    }
    counters_.weight_writes += std::uint64_t{g.q} * output->count();
  }

  const double familiarity = act.familiarity;
  last_activation_ = std::move(act);
  active_ = code;
  return StoreResult{std::move(code), familiarity};
}

QueryResult SdrMemory::query(const BitPattern& input) {
  Activation act = summate(input, false, counters_);
  Code code = select_code(act, SelectMode::argmax, rng_, counters_);
  BitPattern out = readout(code, counters_);
  const double familiarity = act.familiarity;
  last_activation_ = std::move(act);
  active_ = code;
  return QueryResult{std::move(code), std::move(out), familiarity};
}

StepResult SdrMemory::step(SelectMode mode) {
  if (!active_) throw NoActiveState("step needs an active code");
  Activation act = summate_impl(nullptr, &*active_, counters_);
  Code code = select_code(act, mode, rng_, counters_);
  BitPattern out = readout(code, counters_);
  const double familiarity = act.familiarity;
  last_activation_ = std::move(act);
  active_ = code;
  return StepResult{std::move(code), std::move(out), familiarity};
}

std::vector<Code> SdrMemory::learn_sequence(std::span<const BitPattern> items, std::span<const BitPattern> outputs) {
  if (items.empty()) throw GenerationError("learn_sequence needs at least one item");
  if (!outputs.empty() && outputs.size() != items.size()) {
    throw WidthMismatch("learn_sequence outputs must be empty or match the item count");
  }
  for (const auto& item : items) require_width(item, geometry().n_in, "sequence item");
  for (const auto& out : outputs) require_width(out, geometry().n_out, "sequence output");

  clear_active();
  std::vector<Code> codes;
  codes.reserve(items.size());
  for (std::size_t t = 0; t < items.size(); ++t) {
    std::optional<BitPattern> out;
    if (!outputs.empty()) out = outputs[t];
    codes.push_back(store(items[t], out, true).code);
  }
  return codes;
}

const Code& SdrMemory::collapse() const {
  if (!active_) throw NoActiveState("collapse needs an active code");
  return *active_;
}

void SdrMemory::activate(Code code) {
  if (!code.fits(geometry())) throw WidthMismatch("code does not match the coding field");
  active_ = std::move(code);
}

}  // namespace sdrqc
