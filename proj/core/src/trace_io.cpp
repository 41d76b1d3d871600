#include "optomech/trace_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>

#include "optomech/errors.hpp"

namespace optomech {

namespace {

constexpr char kMagic[8] = {'O', 'M', 'T', 'R', 'A', 'C', 'E', '1'};

template <typename U>
void put_le(std::ostream& os, U v) {
  unsigned char b[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), sizeof(U));
}

template <typename U>
U get_le(std::istream& is) {
  unsigned char b[sizeof(U)];
  if (!is.read(reinterpret_cast<char*>(b), sizeof(U)))
    throw Error(Errc::IoError, "truncated trace file");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(static_cast<U>(b[i]) << (8 * i));
  return v;
}

void put_f64(std::ostream& os, double x) { put_le(os, std::bit_cast<std::uint64_t>(x)); }
double get_f64(std::istream& is) { return std::bit_cast<double>(get_le<std::uint64_t>(is)); }

}  // namespace

const char* channel_unit(const std::string& name) {
  if (name == "x0" || name == "x") return "m";
  if (name == "V_out" || name.rfind("V_", 0) == 0) return "V";
  return "V*s";  // flux amplitudes: mu_*, phi, demod_*
}

void write_trace_binary(const TimeTrace& tr, std::ostream& os) {
  os.write(kMagic, sizeof(kMagic));
  put_f64(os, tr.dt);
  put_le<std::uint64_t>(os, tr.n_samples);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(tr.channels.size()));
  for (const auto& c : tr.channels) {
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(c.name.size()));
    os.write(c.name.data(), static_cast<std::streamsize>(c.name.size()));
    put_le<std::uint8_t>(os, static_cast<std::uint8_t>(c.kind));
  }
  for (const auto& c : tr.channels)
    for (double v : c.data) put_f64(os, v);
  if (!os) throw Error(Errc::IoError, "failed writing trace");
}

void write_trace_binary(const TimeTrace& tr, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(Errc::IoError, "cannot open '" + path + "' for writing");
  write_trace_binary(tr, os);
}

TimeTrace read_trace_binary(std::istream& is) {
  char magic[8];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw Error(Errc::IoError, "not an OMTRACE1 file");
  TimeTrace tr;
  tr.dt = get_f64(is);
  tr.n_samples = static_cast<std::size_t>(get_le<std::uint64_t>(is));
  const auto n_ch = get_le<std::uint32_t>(is);
  for (std::uint32_t i = 0; i < n_ch; ++i) {
    TraceChannel c;
    const auto len = get_le<std::uint32_t>(is);
    if (len > 4096) throw Error(Errc::IoError, "corrupt channel name length");
    c.name.resize(len);
    if (!is.read(c.name.data(), len)) throw Error(Errc::IoError, "truncated trace file");
    const auto kind = get_le<std::uint8_t>(is);
    if (kind > 1) throw Error(Errc::IoError, "unknown channel kind");
    c.kind = static_cast<ChannelKind>(kind);
    tr.channels.push_back(std::move(c));
  }
  for (auto& c : tr.channels) {
    c.data.resize(tr.n_samples * (c.kind == ChannelKind::Complex ? 2 : 1));
    for (auto& v : c.data) v = get_f64(is);
  }
  return tr;
}

TimeTrace read_trace_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(Errc::IoError, "cannot open '" + path + "'");
  return read_trace_binary(is);
}

void write_trace_csv(const TimeTrace& tr, std::ostream& os) {
  os << "# units: t=s";
  for (const auto& c : tr.channels) os << ", " << c.name << '=' << channel_unit(c.name);
  os << "; seed=" << tr.config.seed << ", params_hash=" << std::hex << tr.params_hash << std::dec
     << '\n';
  os << "t";
  for (const auto& c : tr.channels) {
    if (c.kind == ChannelKind::Complex) os << ',' << c.name << "_re," << c.name << "_im";
    else os << ',' << c.name;
  }
  os << '\n';
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < tr.n_samples; ++i) {
    os << tr.time(i);
    for (const auto& c : tr.channels) {
      if (c.kind == ChannelKind::Complex) os << ',' << c.data[2 * i] << ',' << c.data[2 * i + 1];
      else os << ',' << c.data[i];
    }
    os << '\n';
  }
  if (!os) throw Error(Errc::IoError, "failed writing trace CSV");
}

void write_trace_csv(const TimeTrace& tr, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(Errc::IoError, "cannot open '" + path + "' for writing");
  write_trace_csv(tr, os);
}

}  // namespace optomech
