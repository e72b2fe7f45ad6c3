// SPDX-License-Identifier: Apache-2.0
#include "bearingntf/tensor_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "bearingntf/error.hpp"

namespace bearingntf {

namespace {

static_assert(std::endian::native == std::endian::little,
              "tensor file I/O assumes a little-endian host");

void put_u64(std::ostream& os, std::uint64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t get_u64(std::istream& is) {
  std::uint64_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw DataError("tensor file: truncated header");
  return v;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ifstream f(path, mode);
  if (!f) throw DataError("cannot open " + path.string());
  return f;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ofstream f(path, mode);
  if (!f) throw DataError("cannot write " + path.string());
  return f;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw DataError("CSV: cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double x) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x,
                                       std::chars_format::general, 17);
  return std::string(buf.data(), ec == std::errc{} ? ptr : buf.data());
}

std::string format_short(double x) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ec == std::errc{} ? ptr : buf.data());
}

void write_tensor(std::ostream& os, const Tensor3& t) {
  os.write(kTensorMagic, sizeof kTensorMagic);
  put_u64(os, t.dims().I);
  put_u64(os, t.dims().P);
  put_u64(os, t.dims().L);
  os.write(reinterpret_cast<const char*>(t.data().data()),
           static_cast<std::streamsize>(t.size() * sizeof(double)));
  if (!os) throw DataError("tensor file: write failed");
}

Tensor3 read_tensor(std::istream& is) {
  char magic[sizeof kTensorMagic];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kTensorMagic, sizeof magic) != 0) {
    throw DataError("tensor file: bad magic");
  }
  Dims3 dims;
  dims.I = get_u64(is);
  dims.P = get_u64(is);
  dims.L = get_u64(is);
  if (dims.I == 0 || dims.P == 0 || dims.L == 0) throw DataError("tensor file: zero dimension");
  std::vector<double> data(dims.numel());
  if (!is.read(reinterpret_cast<char*>(data.data()),
               static_cast<std::streamsize>(data.size() * sizeof(double)))) {
    throw DataError("tensor file: truncated payload");
  }
  return Tensor3(dims, std::move(data));
}

void write_tensor(const std::filesystem::path& path, const Tensor3& t) {
  auto f = open_out(path, std::ios::binary);
  write_tensor(f, t);
}

Tensor3 read_tensor(const std::filesystem::path& path) {
  auto f = open_in(path, std::ios::binary);
  return read_tensor(f);
}

bool is_tensor_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  char magic[sizeof kTensorMagic];
  return f.read(magic, sizeof magic) && std::memcmp(magic, kTensorMagic, sizeof magic) == 0;
}

void write_matrix_csv(std::ostream& os, const Matrix& m) {
  for (std::size_t c = 0; c < m.cols(); ++c) os << (c ? "," : "") << c;
  os << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) os << (c ? "," : "") << format_double(m(r, c));
    os << '\n';
  }
}

Matrix read_matrix_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DataError("CSV: empty input");
  const std::size_t cols = split_commas(line).size();
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = split_commas(line);
    if (fields.size() != cols) {
      throw DataError("CSV: row " + std::to_string(rows.size() + 1) + " has " +
                      std::to_string(fields.size()) + " fields, header has " + std::to_string(cols));
    }
    std::vector<double> row;
    row.reserve(cols);
    for (auto f : fields) row.push_back(parse_double(f));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("CSV: no data rows");
  return Matrix::from_rows(rows);
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  auto f = open_out(path, std::ios::out);
  write_matrix_csv(f, m);
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  auto f = open_in(path, std::ios::in);
  return read_matrix_csv(f);
}

void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const Matrix& m) {
  if (header.size() != m.cols()) throw ShapeError("write_table_csv: header/column mismatch");
  auto f = open_out(path, std::ios::out);
  for (std::size_t c = 0; c < header.size(); ++c) f << (c ? "," : "") << header[c];
  f << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) f << (c ? "," : "") << format_double(m(r, c));
    f << '\n';
  }
}

}  // namespace bearingntf
