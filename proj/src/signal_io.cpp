// SPDX-License-Identifier: Apache-2.0
#include "bearingntf/signal_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "bearingntf/error.hpp"

namespace bearingntf {

namespace {

static_assert(std::endian::native == std::endian::little, "WAV I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(const std::vector<char>& buf, std::size_t at) {
  if (at + sizeof(T) > buf.size()) throw DataError("WAV: truncated header");
  T v;
  std::memcpy(&v, buf.data() + at, sizeof v);
  return v;
}

bool has_riff_magic(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  char magic[4] = {};
  return f.read(magic, 4) && std::memcmp(magic, "RIFF", 4) == 0;
}

}  // namespace

void write_wav_float(const std::filesystem::path& path, std::span<const double> samples, double fs) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  const auto rate = static_cast<std::uint32_t>(std::llround(fs));
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * sizeof(float));
  f.write("RIFF", 4);
  put<std::uint32_t>(f, 36 + data_bytes);
  f.write("WAVE", 4);
  f.write("fmt ", 4);
  put<std::uint32_t>(f, 16);
  put<std::uint16_t>(f, 3);  // IEEE float
  put<std::uint16_t>(f, 1);
  put<std::uint32_t>(f, rate);
  put<std::uint32_t>(f, rate * 4);
  put<std::uint16_t>(f, 4);
  put<std::uint16_t>(f, 32);
  f.write("data", 4);
  put<std::uint32_t>(f, data_bytes);
  for (double x : samples) put<float>(f, static_cast<float>(x));
  if (!f) throw DataError("WAV: write failed for " + path.string());
}

LoadedSignal read_wav(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open " + path.string());
  std::vector<char> buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0) {
    throw DataError("WAV: not a RIFF/WAVE file: " + path.string());
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::size_t data_at = 0, data_len = 0;
  for (std::size_t at = 12; at + 8 <= buf.size();) {
    const std::string id(buf.data() + at, 4);
    const auto len = get<std::uint32_t>(buf, at + 4);
    const std::size_t body = at + 8;
    if (id == "fmt ") {
      format = get<std::uint16_t>(buf, body);
      channels = get<std::uint16_t>(buf, body + 2);
      rate = get<std::uint32_t>(buf, body + 4);
      bits = get<std::uint16_t>(buf, body + 14);
      if (format == 0xFFFE && len >= 40) format = get<std::uint16_t>(buf, body + 24);  // extensible
      have_fmt = true;
    } else if (id == "data") {
      data_at = body;
      data_len = std::min<std::size_t>(len, buf.size() - body);
      break;
    }
    at = body + len + (len & 1u);
  }
  if (!have_fmt || data_at == 0) throw DataError("WAV: missing fmt or data chunk");
  if (channels == 0 || rate == 0) throw DataError("WAV: corrupt fmt chunk");

  const bool pcm16 = format == 1 && bits == 16;
  const bool float32 = format == 3 && bits == 32;
  if (!pcm16 && !float32) {
    throw DataError("WAV: unsupported format (only 16-bit PCM and 32-bit float are read)");
  }
  const std::size_t width = bits / 8;
  const std::size_t frame = width * channels;
  const std::size_t frames = data_len / frame;

  LoadedSignal out;
  out.fs = rate;
  out.channels = channels;
  out.samples.resize(frames);
  for (std::size_t k = 0; k < frames; ++k) {
    const char* p = buf.data() + data_at + k * frame;
    if (pcm16) {
      std::int16_t v;
      std::memcpy(&v, p, 2);
      out.samples[k] = static_cast<double>(v) / 32768.0;
    } else {
      float v;
      std::memcpy(&v, p, 4);
      out.samples[k] = static_cast<double>(v);
    }
  }
  if (channels > 1) {
    out.warnings.push_back(path.string() + ": " + std::to_string(channels) +
                           " channels, using the first");
  }
  return out;
}

LoadedSignal load_signal(const std::filesystem::path& path, std::optional<double> fs) {
  if (!std::filesystem::exists(path)) throw DataError("no such file: " + path.string());
  if (has_riff_magic(path)) {
    auto s = read_wav(path);
    if (fs && *fs != s.fs) {
      s.warnings.push_back("ignoring --fs, WAV header says " + std::to_string(s.fs) + " Hz");
    }
    return s;
  }
  if (!fs) throw ConfigError("CSV signal " + path.string() + " needs a sample rate (--fs)");
  if (!(*fs > 0.0)) throw ConfigError("sample rate must be positive");

  std::ifstream f(path);
  LoadedSignal out;
  out.fs = *fs;
  std::string line;
  bool first = true;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto comma = line.find(',');
    std::string_view field(line.data(), comma == std::string::npos ? line.size() : comma);
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    if (field.empty()) continue;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{}) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw DataError("CSV signal: cannot parse '" + std::string(field) + "'");
    }
    (void)ptr;
    first = false;
    out.samples.push_back(v);
  }
  if (out.samples.empty()) throw DataError("CSV signal: no samples in " + path.string());
  return out;
}

}  // namespace bearingntf
