#include "sdrqc/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>

#include <json.hpp>

#include "sdrqc/errors.hpp"
#include "sdrqc/oracle.hpp"

namespace sdrqc {
namespace {

// Partial Fisher-Yates: `take` distinct picks from `pool`, in draw order.
std::vector<std::uint32_t> sample(std::vector<std::uint32_t> pool, std::uint32_t take, Rng& rng) {
  for (std::uint32_t i = 0; i < take; ++i) {
    const auto j = i + static_cast<std::uint32_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(take);
  return pool;
}

// C(n, r), saturated at UINT64_MAX.
std::uint64_t choose_saturated(std::uint32_t n, std::uint32_t r) {
  r = std::min(r, n - r);
  __uint128_t c = 1;
  for (std::uint32_t i = 1; i <= r; ++i) {
    c = c * (n - r + i) / i;
    if (c > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(c);
}

std::string num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::uint64_t elapsed_nanos(std::chrono::steady_clock::time_point since) {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - since).count());
}

}  // namespace

BitPattern random_pattern(std::uint32_t width, std::uint32_t active, Rng& rng) {
  if (active > width) throw GenerationError("active bit count exceeds pattern width");
  std::vector<std::uint32_t> pool(width);
  std::iota(pool.begin(), pool.end(), 0u);
  return BitPattern::from_indices(width, sample(std::move(pool), active, rng));
}

std::vector<BitPattern> random_patterns(std::uint32_t width, std::uint32_t active, std::uint64_t count, Rng& rng) {
  if (active > width) throw GenerationError("active bit count exceeds pattern width");
  if (choose_saturated(width, active) < count) {
    throw GenerationError("only C(" + std::to_string(width) + "," + std::to_string(active) +
                          ") distinct patterns exist, " + std::to_string(count) + " requested");
  }
  std::vector<BitPattern> out;
  out.reserve(count);
  std::set<BitPattern> seen;
  while (out.size() < count) {
    BitPattern p = random_pattern(width, active, rng);
    if (seen.insert(p).second) out.push_back(std::move(p));
  }
  return out;
}

BitPattern perturb(const BitPattern& base, std::uint32_t shared, Rng& rng) {
  std::vector<std::uint32_t> on = base.active();
  std::vector<std::uint32_t> off;
  for (std::uint32_t i = 0; i < base.width(); ++i) {
    if (!base.test(i)) off.push_back(i);
  }
  const auto active = static_cast<std::uint32_t>(on.size());
  if (shared > active || active - shared > off.size()) {
    throw GenerationError("cannot share " + std::to_string(shared) + " of " + std::to_string(active) +
                          " active bits at width " + std::to_string(base.width()));
  }
  auto kept = sample(std::move(on), shared, rng);
  auto fresh = sample(std::move(off), active - shared, rng);
  kept.insert(kept.end(), fresh.begin(), fresh.end());
  return BitPattern::from_indices(base.width(), kept);
}

ScalingReport run_scaling(const ModelParams& params, const std::vector<std::uint64_t>& sizes,
                          std::uint64_t pattern_seed, const ScalingOptions& options) {
  params.validate();
  if (sizes.empty()) throw GenerationError("scaling needs at least one size");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] == 0 || (i > 0 && sizes[i] <= sizes[i - 1])) {
      throw GenerationError("sizes must be positive and strictly increasing");
    }
  }
  const auto& g = params.geometry;
  // One extra pattern serves as the (never stored before) store probe.
  Rng pattern_rng(pattern_seed);
  const auto patterns = random_patterns(g.n_in, options.active_bits, sizes.back() + 1, pattern_rng);
  const BitPattern& store_probe = patterns.back();
  const BitPattern& query_probe = patterns.front();

  ScalingReport report;
  for (const auto size : sizes) {
    SdrMemory memory(params);
    Registry registry;
    for (std::uint64_t i = 0; i < size; ++i) {
      memory.clear_active();
      const Code code = memory.store(patterns[i]).code;
      registry.add("p" + std::to_string(i), patterns[i], code);
    }

    ScalingRow row;
    row.stored_count = size;

    memory.reset_counters();
    auto start = std::chrono::steady_clock::now();
    const QueryResult hit = memory.query(query_probe);
    row.sdr_query = memory.counters();
    if (options.measure_wall) row.sdr_query.wall_nanos = elapsed_nanos(start);
    row.sdr_recalled = hit.code == registry.entries().front().code;

    start = std::chrono::steady_clock::now();
    const ScanResult scan = linear_scan_best_match(registry, query_probe, row.localist_query);
    if (options.measure_wall) row.localist_query.wall_nanos = elapsed_nanos(start);
    row.localist_recalled = scan.label == registry.entries().front().label;

    memory.clear_active();
    memory.reset_counters();
    start = std::chrono::steady_clock::now();
    (void)memory.store(store_probe);
    row.sdr_store = memory.counters();
    if (options.measure_wall) row.sdr_store.wall_nanos = elapsed_nanos(start);

    report.rows.push_back(row);
  }
  return report;
}

SiscReport run_sisc(const ModelParams& params, const std::vector<double>& overlap_levels, std::uint32_t trials,
                    std::uint64_t seed, const SiscOptions& options) {
  params.validate();
  if (trials < 1) throw GenerationError("sisc needs at least one trial");
  if (overlap_levels.empty()) throw GenerationError("sisc needs at least one overlap level");
  const auto& g = params.geometry;
  const std::uint32_t active = options.active_bits;
  if (active > g.n_in) throw GenerationError("active bit count exceeds input width");

  std::vector<std::uint32_t> shared_bits;
  for (double level : overlap_levels) {
    if (!(level >= 0.0 && level <= 1.0)) throw GenerationError("overlap levels must lie in [0, 1]");
    const double exact = level * active;
    const double rounded = std::round(exact);
    if (std::abs(exact - rounded) > 1e-9) {
      throw GenerationError("overlap " + num(level) + " is not attainable with " + std::to_string(active) +
                            " active bits");
    }
    const auto shared = static_cast<std::uint32_t>(rounded);
    if (active - shared > g.n_in - active) {
      throw GenerationError("overlap " + num(level) + " needs more inactive bits than the width provides");
    }
    shared_bits.push_back(shared);
  }

  std::vector<std::vector<double>> samples(overlap_levels.size());
  const Rng root(seed);
  for (std::uint32_t t = 0; t < trials; ++t) {
    Rng trial_rng = root.split(t);
    ModelParams trial_params = params;
    trial_params.seed = trial_rng.next();
    SdrMemory memory(trial_params);
    const BitPattern base = random_pattern(g.n_in, active, trial_rng);
    const Code base_code = memory.store(base).code;
    for (std::size_t l = 0; l < overlap_levels.size(); ++l) {
      const BitPattern probe = perturb(base, shared_bits[l], trial_rng);
      const Activation act = memory.summate(probe, false);
      const Code code = memory.select_code(act, SelectMode::stochastic);
      samples[l].push_back(intersection(code, base_code));
    }
  }

  SiscReport report;
  report.q = g.q;
  report.k = g.k;
  std::vector<double> means;
  for (std::size_t l = 0; l < overlap_levels.size(); ++l) {
    const auto& xs = samples[l];
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    const double sd = xs.size() > 1 ? std::sqrt(var / static_cast<double>(xs.size() - 1)) : 0.0;
    report.rows.push_back(SiscRow{overlap_levels[l], mean, sd});
    means.push_back(mean);
  }
  report.spearman_rho = spearman(overlap_levels, means);
  return report;
}

bool fits_affine(const std::vector<std::uint64_t>& x, const std::vector<std::uint64_t>& y) {
  if (x.size() != y.size()) return false;
  if (x.size() < 3) return true;
  // (y_i - y_0)(x_1 - x_0) == (y_1 - y_0)(x_i - x_0), exactly, in signed 128-bit.
  const auto dx1 = static_cast<__int128>(x[1]) - static_cast<__int128>(x[0]);
  const auto dy1 = static_cast<__int128>(y[1]) - static_cast<__int128>(y[0]);
  for (std::size_t i = 2; i < x.size(); ++i) {
    const auto dx = static_cast<__int128>(x[i]) - static_cast<__int128>(x[0]);
    const auto dy = static_cast<__int128>(y[i]) - static_cast<__int128>(y[0]);
    if (dy * dx1 != dy1 * dx) return false;
  }
  return true;
}

Verdict check_scaling(const ScalingReport& report) {
  Verdict v;
  auto fail = [&v](std::string why) {
    v.pass = false;
    v.failures.push_back(std::move(why));
  };
  if (report.rows.empty()) {
    fail("empty scaling report");
    return v;
  }
  const auto& first = report.rows.front();
  std::vector<std::uint64_t> n, reads, comparisons;
  for (const auto& row : report.rows) {
    if (!same_counters(row.sdr_query, first.sdr_query)) {
      fail("sdr query counters differ at stored_count=" + std::to_string(row.stored_count));
    }
    if (!same_counters(row.sdr_store, first.sdr_store)) {
      fail("sdr store counters differ at stored_count=" + std::to_string(row.stored_count));
    }
    n.push_back(row.stored_count);
    reads.push_back(row.localist_query.weight_reads);
    comparisons.push_back(row.localist_query.comparisons);
  }
  if (!fits_affine(n, reads) || !fits_affine(n, comparisons)) fail("localist counters are not affine in stored_count");
  return v;
}

Verdict check_sisc(const SiscReport& report, double min_rho) {
  Verdict v;
  auto fail = [&v](std::string why) {
    v.pass = false;
    v.failures.push_back(std::move(why));
  };
  if (!(report.spearman_rho >= min_rho)) fail("spearman rho " + num(report.spearman_rho) + " < " + num(min_rho));
  for (const auto& row : report.rows) {
    if (row.input_overlap == 1.0 && row.mean_code_intersection != static_cast<double>(report.q)) {
      fail("mean intersection at overlap 1.0 is " + num(row.mean_code_intersection) + ", expected q");
    }
    if (row.input_overlap == 0.0) {
      const double chance = static_cast<double>(report.q) / report.k;
      if (std::abs(row.mean_code_intersection - chance) > 0.15 * chance) {
        fail("mean intersection at overlap 0.0 is " + num(row.mean_code_intersection) + ", expected q/k=" +
             num(chance) + " +-15%");
      }
    }
  }
  return v;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return 0.0;
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&v](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
      std::size_t j = i;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (std::size_t m = i; m <= j; ++m) r[order[m]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::string emit_report(const ScalingReport& report, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::csv) {
    out += "stored_count,sdr_store_reads,sdr_store_writes,sdr_query_reads,sdr_query_comparisons,sdr_query_rng,"
           "localist_reads,wall_nanos_sdr,wall_nanos_localist\n";
    for (const auto& r : report.rows) {
      out += std::to_string(r.stored_count) + ',' + std::to_string(r.sdr_store.weight_reads) + ',' +
             std::to_string(r.sdr_store.weight_writes) + ',' + std::to_string(r.sdr_query.weight_reads) + ',' +
             std::to_string(r.sdr_query.comparisons) + ',' + std::to_string(r.sdr_query.rng_draws) + ',' +
             std::to_string(r.localist_query.weight_reads) + ',' + std::to_string(r.sdr_query.wall_nanos) + ',' +
             std::to_string(r.localist_query.wall_nanos) + '\n';
    }
    return out;
  }
  for (const auto& r : report.rows) {
    nlohmann::ordered_json j;
    j["stored_count"] = r.stored_count;
    j["sdr_store_reads"] = r.sdr_store.weight_reads;
    j["sdr_store_writes"] = r.sdr_store.weight_writes;
    j["sdr_query_reads"] = r.sdr_query.weight_reads;
    j["sdr_query_comparisons"] = r.sdr_query.comparisons;
    j["sdr_query_rng"] = r.sdr_query.rng_draws;
    j["localist_reads"] = r.localist_query.weight_reads;
    j["wall_nanos_sdr"] = r.sdr_query.wall_nanos;
    j["wall_nanos_localist"] = r.localist_query.wall_nanos;
    out += j.dump() + '\n';
  }
  return out;
}

std::string emit_report(const SiscReport& report, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::csv) {
    out += "input_overlap,mean_code_intersection,std,spearman_rho\n";
    for (const auto& r : report.rows) {
      out += num(r.input_overlap) + ',' + num(r.mean_code_intersection) + ',' + num(r.std) + ',' +
             num(report.spearman_rho) + '\n';
    }
    return out;
  }
  for (const auto& r : report.rows) {
    nlohmann::ordered_json j;
    j["input_overlap"] = r.input_overlap;
    j["mean_code_intersection"] = r.mean_code_intersection;
    j["std"] = r.std;
    j["spearman_rho"] = report.spearman_rho;
    out += j.dump() + '\n';
  }
  return out;
}

}  // namespace sdrqc
