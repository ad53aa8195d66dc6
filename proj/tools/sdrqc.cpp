// sdrqc: command-line front end for the SDR associative memory.

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "sdrqc/cli.hpp"
#include "sdrqc/errors.hpp"

namespace {

using sdrqc::cli::RunConfig;

void add_geometry(CLI::App* cmd, RunConfig& cfg) {
  auto& g = cfg.params.geometry;
  cmd->add_option("--q", g.q, "WTA clusters in the coding field")->capture_default_str();
  cmd->add_option("--k", g.k, "units per cluster")->capture_default_str();
  cmd->add_option("--n-in", g.n_in, "input field width")->capture_default_str();
  cmd->add_option("--n-out", g.n_out, "output field width (default: n-in)");
  cmd->add_option("--tau-min", cfg.params.tau_min, "selection temperature at full familiarity")->capture_default_str();
  cmd->add_option("--tau-max", cfg.params.tau_max, "selection temperature at zero familiarity")->capture_default_str();
  cmd->add_option("--seed", cfg.params.seed, "RNG seed")->envname("SDRQC_SEED")->capture_default_str();
}

void add_model(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--model", cfg.model, "model file")->required();
}

void add_patterns(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--patterns", cfg.patterns, "pattern file (0/1 lines, optional label<TAB> prefix)")->required();
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  cfg.params.geometry = {16, 8, 256, 0};
  cfg.params.seed = 1;

  CLI::App app{"SDR associative memory: store, query, sequence replay and cost benchmarks"};
  app.require_subcommand(1);

  auto* init = app.add_subcommand("init", "create a fresh model file");
  add_model(init, cfg);
  add_geometry(init, cfg);

  auto* store = app.add_subcommand("store", "store patterns; prints label, code and familiarity per line");
  add_model(store, cfg);
  add_patterns(store, cfg);

  auto* query = app.add_subcommand("query", "recall patterns; prints code, readout and familiarity per probe");
  add_model(query, cfg);
  add_patterns(query, cfg);
  query->add_flag("--oracle", cfg.oracle, "cross-check against the localist linear scan");

  auto* seq = app.add_subcommand("seq", "learn or replay a sequence");
  std::string seq_mode;
  seq->add_option("mode", seq_mode, "learn | replay")->required()->check(CLI::IsMember({"learn", "replay"}));
  add_model(seq, cfg);
  add_patterns(seq, cfg);
  std::uint32_t limit = 0;
  auto* limit_opt = seq->add_option("--limit", limit, "replay steps (default: remaining pattern lines)");

  auto* bench = app.add_subcommand("bench", "run a cost experiment; exit status reflects its assertions");
  std::string experiment;
  bench->add_option("experiment", experiment, "scaling | sisc")->required()->check(CLI::IsMember({"scaling", "sisc"}));
  add_geometry(bench, cfg);
  std::map<std::string, sdrqc::ReportFormat> formats{{"csv", sdrqc::ReportFormat::csv},
                                                     {"jsonl", sdrqc::ReportFormat::jsonl}};
  bench->add_option("--format", cfg.format, "csv | jsonl")->transform(CLI::CheckedTransformer(formats))->option_text("csv|jsonl");
  bench->add_option("--out", cfg.out, "report path (default: stdout)");
  bench->add_option("--sizes", cfg.sizes, "scaling database sizes")->delimiter(',')->capture_default_str();
  bench->add_option("--levels", cfg.levels, "sisc input-overlap levels")->delimiter(',')->capture_default_str();
  bench->add_option("--trials", cfg.trials, "sisc trials (seeds)")->capture_default_str();
  bench->add_option("--active-bits", cfg.active_bits, "active bits per pattern (default: scaling 32, sisc 20)");
  bench->add_flag("--wall-clock", cfg.wall_clock, "fill wall_nanos columns (makes output nondeterministic)");

  CLI11_PARSE(app, argc, argv);
  if (cfg.params.geometry.n_out == 0) cfg.params.geometry.n_out = cfg.params.geometry.n_in;
  if (*limit_opt) cfg.limit = limit;

  try {
    if (*init) return sdrqc::cli::cmd_init(cfg, std::cout);
    if (*store) return sdrqc::cli::cmd_store(cfg, std::cout);
    if (*query) return sdrqc::cli::cmd_query(cfg, std::cout);
    if (*seq) {
      const auto mode = seq_mode == "learn" ? sdrqc::cli::SeqMode::learn : sdrqc::cli::SeqMode::replay;
      return sdrqc::cli::cmd_seq(cfg, mode, std::cout);
    }
    const auto which = experiment == "scaling" ? sdrqc::cli::Experiment::scaling : sdrqc::cli::Experiment::sisc;
    return sdrqc::cli::cmd_bench(cfg, which, std::cout, std::cerr);
  } catch (const sdrqc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
