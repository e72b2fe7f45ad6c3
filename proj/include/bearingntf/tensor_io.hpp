// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bearingntf/tensor.hpp"

namespace bearingntf {

// Binary tensor file, all fields little-endian:
//
//   bytes 0..7    magic "BNTFT3\0\1"
//   bytes 8..31   I, P, L as uint64
//   bytes 32..    I*P*L float64 values in Tensor3 storage order
//                 (i fastest, then p, then l)
inline constexpr char kTensorMagic[8] = {'B', 'N', 'T', 'F', 'T', '3', '\0', '\1'};

void write_tensor(std::ostream& os, const Tensor3& t);
Tensor3 read_tensor(std::istream& is);
void write_tensor(const std::filesystem::path& path, const Tensor3& t);
Tensor3 read_tensor(const std::filesystem::path& path);

// True if the file starts with the tensor magic.
bool is_tensor_file(const std::filesystem::path& path);

// CSV matrix: a header row with the zero-based column indices, then one line
// per matrix row. Values are printed with 17 significant digits so that a
// read-back reproduces every double exactly.
void write_matrix_csv(std::ostream& os, const Matrix& m);
Matrix read_matrix_csv(std::istream& is);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_csv(const std::filesystem::path& path);

// CSV with a caller-supplied header (used for spectra and noise maps).
void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const Matrix& m);

std::string format_double(double x);
// Shortest string that parses back to x; used for labels and file names.
std::string format_short(double x);

}  // namespace bearingntf
