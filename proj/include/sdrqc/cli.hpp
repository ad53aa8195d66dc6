#pragma once

// Command implementations behind the `sdrqc` tool. Each returns the process
// exit code and throws sdrqc::Error on invalid input; nothing is written to
// disk until all inputs have been validated.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sdrqc/bench.hpp"
#include "sdrqc/bit_pattern.hpp"
#include "sdrqc/memory.hpp"

namespace sdrqc::cli {

struct RunConfig {
  ModelParams params;
  std::filesystem::path model;
  std::filesystem::path patterns;
  std::filesystem::path out;  // empty: report goes to stdout
  bool oracle = false;
  ReportFormat format = ReportFormat::csv;
  std::vector<std::uint64_t> sizes{10, 100, 1000, 5000};
  std::vector<double> levels{1.0, 0.8, 0.6, 0.4, 0.2, 0.0};
  std::uint32_t trials = 20;
  std::optional<std::uint32_t> limit;
  std::uint32_t active_bits = 0;  // 0: experiment default (scaling 32, sisc 20)
  bool wall_clock = false;
};

struct PatternLine {
  std::optional<std::string> label;
  BitPattern bits;
};

// Lines of 0/1 characters with an optional `label<TAB>` prefix. Blank lines
// and lines starting with '#' are skipped. Widths must be uniform.
[[nodiscard]] std::vector<PatternLine> parse_patterns(std::string_view text);
[[nodiscard]] std::vector<PatternLine> read_patterns(const std::filesystem::path& path);

[[nodiscard]] std::filesystem::path registry_path(const std::filesystem::path& model);

// Exclusive (or shared) advisory lock on `<model>.lock` for the object's lifetime.
class ModelLock {
 public:
  ModelLock(const std::filesystem::path& model, bool exclusive);
  ~ModelLock();
  ModelLock(const ModelLock&) = delete;
  ModelLock& operator=(const ModelLock&) = delete;

 private:
  int fd_ = -1;
};

enum class SeqMode { learn, replay };
enum class Experiment { scaling, sisc };

int cmd_init(const RunConfig& config, std::ostream& out);
int cmd_store(const RunConfig& config, std::ostream& out);
int cmd_query(const RunConfig& config, std::ostream& out);
int cmd_seq(const RunConfig& config, SeqMode mode, std::ostream& out);
int cmd_bench(const RunConfig& config, Experiment experiment, std::ostream& out, std::ostream& err);

// One-line geometry summary printed by `init`.
[[nodiscard]] std::string geometry_summary(const FieldGeometry& geometry);

}  // namespace sdrqc::cli
