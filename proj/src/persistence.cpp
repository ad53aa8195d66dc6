#include "sdrqc/persistence.hpp"

#include <unistd.h>

#include <charconv>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "sdrqc/errors.hpp"

namespace sdrqc {
namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void write_u64(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>(static_cast<std::uint8_t>(v >> (8 * i)));
  out.write(bytes, 8);
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw FormatError("truncated model file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{bytes[i]} << (8 * i);
  return v;
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

template <class T>
T parse_number(const std::string& token) {
  T v{};
  auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || end != token.data() + token.size()) {
    throw FormatError("bad number in model header: '" + token + "'");
  }
  return v;
}

void write_matrix(std::ostream& out, const BitMatrix& m) {
  const auto bytes = encode_runs(m);
  write_u64(out, bytes.size());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

BitMatrix read_matrix(std::istream& in, std::uint32_t rows, std::uint32_t cols) {
  const std::uint64_t length = read_u64(in);
  // Every cell needs at most one u32 run, plus the leading empty run.
  const std::uint64_t bound = (std::uint64_t{rows} * cols + 1) * 4;
  if (length > bound || length % 4 != 0) throw FormatError("implausible matrix byte length");
  std::vector<std::uint8_t> bytes(length);
  if (!in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(length))) {
    throw FormatError("truncated matrix stream");
  }
  return decode_runs(bytes, rows, cols);
}

}  // namespace

std::vector<std::uint8_t> encode_runs(const BitMatrix& m) {
  std::vector<std::uint8_t> out;
  bool value = false;
  std::uint64_t run = 0;
  auto flush = [&](std::uint64_t length) {
    while (length > std::numeric_limits<std::uint32_t>::max()) {
      put_u32(out, std::numeric_limits<std::uint32_t>::max());
      put_u32(out, 0);
      length -= std::numeric_limits<std::uint32_t>::max();
    }
    put_u32(out, static_cast<std::uint32_t>(length));
  };
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m.cell(i) == value) {
      ++run;
    } else {
      flush(run);
      value = !value;
      run = 1;
    }
  }
  if (run > 0 || out.empty()) flush(run);
  return out;
}

BitMatrix decode_runs(const std::vector<std::uint8_t>& bytes, std::uint32_t rows, std::uint32_t cols) {
  if (bytes.size() % 4 != 0) throw FormatError("run stream length is not a multiple of 4");
  BitMatrix m(rows, cols);
  const std::uint64_t total = m.size();
  std::uint64_t pos = 0;
  bool value = false;
  for (std::size_t b = 0; b < bytes.size(); b += 4) {
    std::uint32_t run = 0;
    for (int i = 0; i < 4; ++i) run |= std::uint32_t{bytes[b + i]} << (8 * i);
    if (run > total - pos) throw FormatError("run stream overruns the matrix");
    if (value) {
      for (std::uint64_t i = 0; i < run; ++i) m.assign_cell(pos + i, true);
    }
    pos += run;
    value = !value;
  }
  if (pos != total) throw FormatError("run stream does not cover the matrix");
  return m;
}

void save_model(const SdrMemory& memory, std::ostream& out) {
  const auto& p = memory.params();
  const auto& g = p.geometry;
  out << kModelMagic;
  out << g.q << ' ' << g.k << ' ' << g.n_in << ' ' << g.n_out << ' ' << format_double(p.tau_min) << ' '
      << format_double(p.tau_max) << ' ' << p.seed << '\n';
  write_matrix(out, memory.f());
  write_matrix(out, memory.h());
  write_matrix(out, memory.d());
  if (!out) throw Error("failed writing model stream");
}

SdrMemory load_model(std::istream& in) {
  std::string magic(kModelMagic.size(), '\0');
  if (!in.read(magic.data(), static_cast<std::streamsize>(magic.size())) || magic != kModelMagic) {
    if (magic.rfind("SDRQC", 0) == 0) throw FormatError("unsupported model file version");
    throw FormatError("not a model file (bad magic)");
  }
  std::string header;
  if (!std::getline(in, header)) throw FormatError("missing model header");
  std::istringstream fields(header);
  std::vector<std::string> tokens{std::istream_iterator<std::string>(fields), {}};
  if (tokens.size() != 7) throw FormatError("model header needs 7 fields");

  ModelParams params;
  params.geometry.q = parse_number<std::uint32_t>(tokens[0]);
  params.geometry.k = parse_number<std::uint32_t>(tokens[1]);
  params.geometry.n_in = parse_number<std::uint32_t>(tokens[2]);
  params.geometry.n_out = parse_number<std::uint32_t>(tokens[3]);
  params.tau_min = parse_number<double>(tokens[4]);
  params.tau_max = parse_number<double>(tokens[5]);
  params.seed = parse_number<std::uint64_t>(tokens[6]);
  params.validate();

  const auto& g = params.geometry;
  BitMatrix f = read_matrix(in, g.n_in, g.units());
  BitMatrix h = read_matrix(in, g.units(), g.units());
  BitMatrix d = read_matrix(in, g.units(), g.n_out);
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after model body");
  return SdrMemory(std::move(params), std::move(f), std::move(h), std::move(d));
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot replace " + path.string());
  }
}

void save_model_file(const SdrMemory& memory, const std::filesystem::path& path) {
  std::ostringstream buffer(std::ios::binary);
  save_model(memory, buffer);
  write_file_atomic(path, buffer.str());
}

SdrMemory load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file " + path.string());
  return load_model(in);
}

}  // namespace sdrqc
