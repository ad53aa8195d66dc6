#pragma once

// The SDR memory: binary weight matrices F (input -> coding field),
// H (coding field -> itself, one step later) and D (coding field -> output),
// the familiarity-tempered code selection procedure, Hebbian OR-learning,
// fixed-cost query, and H-driven evolution of the active code.
//
// Every operation's counter totals depend only on the geometry and the
// number of active input bits, never on how many patterns were stored.

#include <cstdint>
#include <optional>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <utility>
#include <vector>

#include "sdrqc/bit_matrix.hpp"
#include "sdrqc/bit_pattern.hpp"
#include "sdrqc/coding_field.hpp"
#include "sdrqc/cost.hpp"
#include "sdrqc/rng.hpp"

namespace sdrqc {

struct ModelParams {
  FieldGeometry geometry;
  double tau_min = 0.05;  // softmax temperature at G = 1
  double tau_max = 1.0;   // softmax temperature at G = 0
  std::uint64_t seed = 1;

  // Throws GeometryError.
  void validate() const;

  // tau(G) = tau_min + (1 - G) * (tau_max - tau_min).
  [[nodiscard]] double temperature(double familiarity) const noexcept {
    return tau_min + (1.0 - familiarity) * (tau_max - tau_min);
  }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

enum class SelectMode { stochastic, argmax };

// Per-unit input summations for the coding field.
//
// raw[i] is an integer count; the normalized value is raw[i] / divisor where
// divisor = max(1, number of active sources). Keeping the integers makes
// ties and familiarity levels exact.
struct Activation {
  std::vector<std::uint32_t> raw;
  std::uint32_t divisor = 1;
  std::vector<std::uint32_t> cluster_max;  // raw max per cluster
  double familiarity = 0.0;                // G: mean over clusters of max normalized summation

  [[nodiscard]] double normalized(std::uint32_t unit) const { return static_cast<double>(raw.at(unit)) / divisor; }
  [[nodiscard]] std::vector<double> normalized() const;
  [[nodiscard]] double cluster_familiarity(std::uint32_t cluster) const {
    return static_cast<double>(cluster_max.at(cluster)) / divisor;
  }
};

struct StoreResult {
  Code code;
  double familiarity = 0.0;
};

struct QueryResult {
  Code code;
  BitPattern readout;
  double familiarity = 0.0;
};

using StepResult = QueryResult;

// Strength of `code` as implied by an activation field alone: the fraction of
// clusters in which the code's unit attains the (nonzero) cluster maximum.
[[nodiscard]] Likelihood implied_likelihood(const Activation& activation, const Code& code);

class SdrMemory {
 public:
  explicit SdrMemory(ModelParams params);
  // Rebuilds a model from persisted weights. Matrix shapes must match.
  SdrMemory(ModelParams params, BitMatrix f, BitMatrix h, BitMatrix d);

  [[nodiscard]] const ModelParams& params() const noexcept { return params_; }
  [[nodiscard]] const FieldGeometry& geometry() const noexcept { return params_.geometry; }
  [[nodiscard]] const BitMatrix& f() const noexcept { return f_; }
  [[nodiscard]] const BitMatrix& h() const noexcept { return h_; }
  [[nodiscard]] const BitMatrix& d() const noexcept { return d_; }
  // An output bit is on when at least this many winners project to it.
  [[nodiscard]] std::uint32_t readout_threshold() const noexcept { return (geometry().q + 1) / 2; }

  // --- read-only surface: no state change, costs go to the caller ---

  // Bottom-up summation from `input`, plus H input from the active code when
  // `recurrent` is set and a code is active.
  [[nodiscard]] Activation summate(const BitPattern& input, bool recurrent, CostReport& cost) const;
  [[nodiscard]] Code select_code(const Activation& activation, SelectMode mode, Rng& rng,
                                 CostReport& cost) const;
  [[nodiscard]] BitPattern readout(const Code& code, CostReport& cost) const;
  [[nodiscard]] QueryResult query(const BitPattern& input, Rng& rng, CostReport& cost) const;

  // --- mutating surface: internal RNG and counters ---

  Activation summate(const BitPattern& input, bool recurrent = false);
  Code select_code(const Activation& activation, SelectMode mode);

  // Learns `input` (and `output` through D when given) on a stochastically
  // selected code, wiring H from the previously active code if any.
  StoreResult store(const BitPattern& input, const std::optional<BitPattern>& output = std::nullopt,
                    bool recurrent = false);
  // Argmax recall without learning; sets the active code.
  QueryResult query(const BitPattern& input);
  // Advances the active code one step through H alone. Throws NoActiveState.
  StepResult step(SelectMode mode = SelectMode::argmax);
  // Stores items in order from a clean slate, wiring H code-to-successor.
  // `outputs` is empty or one pattern per item.
  std::vector<Code> learn_sequence(std::span<const BitPattern> items,
                                   std::span<const BitPattern> outputs = {});

  // The single fully active code. Throws NoActiveState.
  [[nodiscard]] const Code& collapse() const;
  // Summation field from which the current active code was selected.
  [[nodiscard]] const Activation& current_superposition_inputs() const noexcept { return last_activation_; }

  [[nodiscard]] const std::optional<Code>& active() const noexcept { return active_; }
  void activate(Code code);
  void clear_active() noexcept { active_.reset(); }

  [[nodiscard]] const CostReport& counters() const noexcept { return counters_; }
  void reset_counters() noexcept { counters_ = {}; }
  [[nodiscard]] Rng& rng() noexcept { return rng_; }

 private:
  Activation summate_impl(const BitPattern* input, const Code* recurrent_source, CostReport& cost) const;
  void require_width(const BitPattern& p, std::uint32_t width, const char* what) const;
  void seed_from_content();

  ModelParams params_;
  BitMatrix f_;
  BitMatrix h_;
  BitMatrix d_;
  std::optional<Code> active_;
  Activation last_activation_;
  CostReport counters_;
  Rng rng_;
};

// Many concurrent readers or one writer over a single SdrMemory.
class SharedMemory {
 public:
  explicit SharedMemory(SdrMemory memory) : memory_(std::move(memory)) {}

  [[nodiscard]] QueryResult query(const BitPattern& input, Rng& rng, CostReport& cost) const {
    std::shared_lock lock(mutex_);
    return memory_.query(input, rng, cost);
  }
  [[nodiscard]] Activation summate(const BitPattern& input, CostReport& cost) const {
    std::shared_lock lock(mutex_);
    return memory_.summate(input, false, cost);
  }

  template <class Fn>
  decltype(auto) read(Fn&& fn) const {
    std::shared_lock lock(mutex_);
    return std::forward<Fn>(fn)(std::as_const(memory_));
  }
  template <class Fn>
  decltype(auto) write(Fn&& fn) {
    std::unique_lock lock(mutex_);
    return std::forward<Fn>(fn)(memory_);
  }

 private:
  SdrMemory memory_;
  mutable std::shared_mutex mutex_;
};

}  // namespace sdrqc
