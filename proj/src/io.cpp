#include "l1pca/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "l1pca/errors.hpp"

namespace l1pca::io {

namespace {

bool parse_double(const std::string& token, double& out) {
  const char* begin = token.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  if (end == begin) return false;
  while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
  return *end == '\0';
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> tokens;
  std::stringstream ss(line);
  std::string token;
  while (std::getline(ss, token, ',')) {
    const auto first = token.find_first_not_of(" \t\r");
    const auto last = token.find_last_not_of(" \t\r");
    tokens.push_back(first == std::string::npos
                         ? std::string()
                         : token.substr(first, last - first + 1));
  }
  return tokens;
}

}  // namespace

Eigen::MatrixXd load_matrix_csv(const std::filesystem::path& path,
                                bool transpose) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open matrix file: " + path.string());

  std::vector<std::vector<double>> rows;
  std::string line;
  bool first_line = true;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> tokens = split_csv_line(line);
    std::vector<double> row;
    row.reserve(tokens.size());
    bool numeric = true;
    for (const auto& token : tokens) {
      double v;
      if (!parse_double(token, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (first_line) {  // header line
        first_line = false;
        continue;
      }
      throw InputError("matrix file has a non-numeric entry: " +
                       path.string());
    }
    first_line = false;
    if (!rows.empty() && row.size() != rows.front().size())
      throw InputError("matrix file has ragged rows: " + path.string());
    rows.push_back(std::move(row));
  }
  if (rows.empty())
    throw InputError("matrix file is empty: " + path.string());

  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  if (!m.allFinite())
    throw InputError("matrix file has non-finite entries: " + path.string());
  if (transpose) m.transposeInPlace();
  return m;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double round_12sig(double v) {
  return std::strtod(format_double(v).c_str(), nullptr);
}

void write_lines(const std::filesystem::path& path,
                 const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write file: " + path.string());
  for (const auto& line : lines) out << line << '\n';
}

std::string file_checksum_hex(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file for checksum: " + path.string());
  std::uint64_t hash = 0xcbf29ce484222325ull;
  char chunk[4096];
  while (in.read(chunk, sizeof(chunk)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(chunk[i]);
      hash *= 0x100000001b3ull;
    }
    if (!in) break;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace l1pca::io
