#include "sdrqc/cli.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "sdrqc/coding_field.hpp"
#include "sdrqc/errors.hpp"
#include "sdrqc/oracle.hpp"
#include "sdrqc/persistence.hpp"

namespace sdrqc::cli {
namespace {

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Registry load_registry(const std::filesystem::path& model, const FieldGeometry& geometry) {
  const auto path = registry_path(model);
  if (!std::filesystem::exists(path)) return {};
  return Registry::parse(read_text(path), geometry);
}

void require_width(const std::vector<PatternLine>& lines, std::uint32_t width) {
  if (!lines.empty() && lines.front().bits.width() != width) {
    throw WidthMismatch("pattern width " + std::to_string(lines.front().bits.width()) + " != model n_in " +
                        std::to_string(width));
  }
}

// The readout learns the input itself when the fields have equal width.
std::optional<BitPattern> readout_target(const SdrMemory& memory, const BitPattern& input) {
  if (memory.geometry().n_out == memory.geometry().n_in) return input;
  return std::nullopt;
}

struct Planned {
  std::string label;
  bool fresh = true;  // not yet in the registry
};

// Resolves labels before any mutation. An existing label is reused only when
// it names the identical input.
std::vector<Planned> plan_labels(const Registry& registry, const std::vector<PatternLine>& lines) {
  std::vector<Planned> plan;
  std::map<std::string, const BitPattern*> batch;
  std::size_t next_auto = registry.size();
  for (const auto& line : lines) {
    Planned p;
    if (line.label) {
      p.label = *line.label;
    } else {
      do {
        p.label = "p" + std::to_string(next_auto++);
      } while (registry.find(p.label) != nullptr || batch.contains(p.label));
    }
    const BitPattern* known = nullptr;
    if (const auto* e = registry.find(p.label)) known = &e->input;
    if (auto it = batch.find(p.label); it != batch.end()) known = it->second;
    if (known != nullptr) {
      if (*known != line.bits) throw DuplicateLabel("label '" + p.label + "' already names a different pattern");
      p.fresh = false;
    } else {
      batch.emplace(p.label, &line.bits);
    }
    plan.push_back(std::move(p));
  }
  return plan;
}

const RegistryEntry* entry_with_code(const Registry& registry, const Code& code) {
  for (const auto& e : registry.entries()) {
    if (e.code == code) return &e;
  }
  return nullptr;
}

}  // namespace

std::vector<PatternLine> parse_patterns(std::string_view text) {
  std::vector<PatternLine> lines;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    PatternLine p;
    const auto tab = line.find('\t');
    if (tab != std::string_view::npos) {
      p.label = std::string(line.substr(0, tab));
      if (p.label->empty()) throw FormatError("empty label on pattern line " + std::to_string(line_no));
      line = line.substr(tab + 1);
    }
    try {
      p.bits = BitPattern::parse(line);
    } catch (const FormatError& e) {
      throw FormatError("pattern line " + std::to_string(line_no) + ": " + e.what());
    }
    if (p.bits.width() == 0) throw FormatError("empty pattern on line " + std::to_string(line_no));
    if (!lines.empty() && lines.front().bits.width() != p.bits.width()) {
      throw WidthMismatch("pattern line " + std::to_string(line_no) + " has width " +
                          std::to_string(p.bits.width()) + ", expected " +
                          std::to_string(lines.front().bits.width()));
    }
    lines.push_back(std::move(p));
  }
  return lines;
}

std::vector<PatternLine> read_patterns(const std::filesystem::path& path) { return parse_patterns(read_text(path)); }

std::filesystem::path registry_path(const std::filesystem::path& model) {
  auto p = model;
  p += ".registry";
  return p;
}

ModelLock::ModelLock(const std::filesystem::path& model, bool exclusive) {
  auto path = model;
  path += ".lock";
  fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw Error("cannot open lock file " + path.string());
  if (::flock(fd_, (exclusive ? LOCK_EX : LOCK_SH) | LOCK_NB) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw Error("model " + model.string() + " is locked by another process");
  }
}

ModelLock::~ModelLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

std::string geometry_summary(const FieldGeometry& g) {
  std::string codes;
  try {
    codes = std::to_string(num_codes(g));
  } catch (const CapacityOverflow&) {
    codes = "overflow(>2^64-1)";
  }
  return "q=" + std::to_string(g.q) + " k=" + std::to_string(g.k) + " n_in=" + std::to_string(g.n_in) +
         " n_out=" + std::to_string(g.n_out) + " units=" + std::to_string(g.units()) + " codes=" + codes +
         " levels=" + std::to_string(num_levels(g));
}

int cmd_init(const RunConfig& config, std::ostream& out) {
  config.params.validate();
  if (config.model.empty()) throw Error("--model is required");
  ModelLock lock(config.model, true);
  SdrMemory memory(config.params);
  std::ostringstream buffer(std::ios::binary);
  save_model(memory, buffer);
  write_file_atomic(config.model, buffer.str());
  write_file_atomic(registry_path(config.model), "");
  out << geometry_summary(config.params.geometry) << '\n';
  return 0;
}

int cmd_store(const RunConfig& config, std::ostream& out) {
  if (config.model.empty() || config.patterns.empty()) throw Error("--model and --patterns are required");
  ModelLock lock(config.model, true);
  SdrMemory memory = load_model_file(config.model);
  Registry registry = load_registry(config.model, memory.geometry());
  const auto lines = read_patterns(config.patterns);
  require_width(lines, memory.geometry().n_in);
  const auto plan = plan_labels(registry, lines);

  std::ostringstream listing;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    memory.clear_active();
    const StoreResult stored = memory.store(lines[i].bits, readout_target(memory, lines[i].bits));
    if (plan[i].fresh) registry.add(plan[i].label, lines[i].bits, stored.code);
    listing << plan[i].label << '\t' << stored.code.to_string() << '\t' << fmt(stored.familiarity) << '\n';
  }
  save_model_file(memory, config.model);
  write_file_atomic(registry_path(config.model), registry.dump());
  out << listing.str();
  return 0;
}

int cmd_query(const RunConfig& config, std::ostream& out) {
  if (config.model.empty() || config.patterns.empty()) throw Error("--model and --patterns are required");
  ModelLock lock(config.model, false);
  SdrMemory memory = load_model_file(config.model);
  const auto lines = read_patterns(config.patterns);
  require_width(lines, memory.geometry().n_in);
  Registry registry;
  if (config.oracle) registry = load_registry(config.model, memory.geometry());

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto label = lines[i].label.value_or("q" + std::to_string(i));
    const QueryResult r = memory.query(lines[i].bits);
    out << label << '\t' << r.code.to_string() << '\t' << r.readout.to_string() << '\t' << fmt(r.familiarity);
    if (config.oracle) {
      if (registry.empty()) {
        out << "\t-\t-\t0";
      } else {
        CostReport scan_cost;
        const ScanResult best = linear_scan_best_match(registry, lines[i].bits, scan_cost);
        const bool agree = registry.find(best.label)->code == r.code;
        out << '\t' << best.label << '\t' << fmt(best.similarity) << '\t' << (agree ? 1 : 0);
      }
    }
    out << '\n';
  }
  return 0;
}

int cmd_seq(const RunConfig& config, SeqMode mode, std::ostream& out) {
  if (config.model.empty() || config.patterns.empty()) throw Error("--model and --patterns are required");
  const auto lines = read_patterns(config.patterns);

  if (mode == SeqMode::learn) {
    if (lines.size() < 2) throw Error("sequence learning needs at least 2 patterns");
    ModelLock lock(config.model, true);
    SdrMemory memory = load_model_file(config.model);
    Registry registry = load_registry(config.model, memory.geometry());
    require_width(lines, memory.geometry().n_in);
    const auto plan = plan_labels(registry, lines);

    std::vector<BitPattern> items;
    for (const auto& l : lines) items.push_back(l.bits);
    std::vector<BitPattern> outputs;
    if (memory.geometry().n_out == memory.geometry().n_in) outputs = items;
    const auto codes = memory.learn_sequence(items, outputs);

    std::ostringstream listing;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (plan[i].fresh) registry.add(plan[i].label, lines[i].bits, codes[i]);
      listing << plan[i].label << '\t' << codes[i].to_string() << '\n';
    }
    save_model_file(memory, config.model);
    write_file_atomic(registry_path(config.model), registry.dump());
    out << listing.str();
    return 0;
  }

  if (lines.empty()) throw Error("replay needs a prime pattern");
  ModelLock lock(config.model, false);
  SdrMemory memory = load_model_file(config.model);
  require_width(lines, memory.geometry().n_in);
  if (memory.f().count_ones() == 0) throw NoActiveState("no active state: the model has nothing stored to prime");
  const Registry registry = load_registry(config.model, memory.geometry());
  const std::uint32_t limit = config.limit.value_or(static_cast<std::uint32_t>(lines.size() - 1));

  auto print = [&](std::uint32_t t, const Code& code, const BitPattern& readout) {
    const auto* e = entry_with_code(registry, code);
    out << t << '\t' << (e ? e->label : std::string("-")) << '\t' << code.to_string() << '\t' << readout.to_string()
        << '\n';
  };
  const QueryResult primed = memory.query(lines.front().bits);
  print(0, primed.code, primed.readout);
  for (std::uint32_t t = 1; t <= limit; ++t) {
    const StepResult s = memory.step();
    print(t, s.code, s.readout);
  }
  return 0;
}

int cmd_bench(const RunConfig& config, Experiment experiment, std::ostream& out, std::ostream& err) {
  config.params.validate();
  std::string report;
  Verdict verdict;
  if (experiment == Experiment::scaling) {
    ScalingOptions options;
    if (config.active_bits) options.active_bits = config.active_bits;
    options.measure_wall = config.wall_clock;
    const auto r = run_scaling(config.params, config.sizes, config.params.seed, options);
    report = emit_report(r, config.format);
    verdict = check_scaling(r);
  } else {
    SiscOptions options;
    if (config.active_bits) options.active_bits = config.active_bits;
    const auto r = run_sisc(config.params, config.levels, config.trials, config.params.seed, options);
    report = emit_report(r, config.format);
    verdict = check_sisc(r);
    err << "spearman_rho=" << fmt(r.spearman_rho) << '\n';
  }

  if (config.out.empty()) {
    out << report;
  } else {
    write_file_atomic(config.out, report);
  }
  for (const auto& why : verdict.failures) err << "assertion failed: " << why << '\n';
  return verdict.pass ? 0 : 1;
}

}  // namespace sdrqc::cli
