#pragma once

// Model files.
//
//   "SDRQC1\n"
//   "q k n_in n_out tau_min tau_max seed\n"            (decimal, shortest round-trip)
//   F, H, D: u64 byte length, then a run-length stream
//
// A run-length stream is a sequence of u32 run lengths over the row-major
// cells, alternating 0-runs and 1-runs and starting with a 0-run (possibly of
// length 0). All binary integers are little-endian.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sdrqc/bit_matrix.hpp"
#include "sdrqc/memory.hpp"

namespace sdrqc {

inline constexpr std::string_view kModelMagic = "SDRQC1\n";

[[nodiscard]] std::vector<std::uint8_t> encode_runs(const BitMatrix& m);
// Throws FormatError if the runs do not cover exactly rows*cols cells.
[[nodiscard]] BitMatrix decode_runs(const std::vector<std::uint8_t>& bytes, std::uint32_t rows, std::uint32_t cols);

void save_model(const SdrMemory& memory, std::ostream& out);
// Throws FormatError on unknown magic/version or a malformed body.
[[nodiscard]] SdrMemory load_model(std::istream& in);

// Writes to a temporary sibling and renames it over `path`.
void save_model_file(const SdrMemory& memory, const std::filesystem::path& path);
[[nodiscard]] SdrMemory load_model_file(const std::filesystem::path& path);

// Replaces `path` with `contents` via a temporary sibling and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace sdrqc
