#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace l1pca::io {

/// CSV convention: rows are dimensions (D), columns are samples (N).
/// An optional header line is auto-detected. `transpose` accommodates
/// sample-major files. Throws InputError on malformed or non-finite data.
Eigen::MatrixXd load_matrix_csv(const std::filesystem::path& path,
                                bool transpose = false);

/// Shortest text for the value rounded to 12 significant digits.
std::string format_double(double v);
/// The double nearest that 12-significant-digit decimal.
double round_12sig(double v);

void write_lines(const std::filesystem::path& path,
                 const std::vector<std::string>& lines);

/// FNV-1a 64-bit digest of a file's bytes, as fixed-width hex.
std::string file_checksum_hex(const std::filesystem::path& path);

}  // namespace l1pca::io
