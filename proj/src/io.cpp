#include "concord/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <utility>
#include <vector>

namespace concord::io {

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

bool next_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return true;
  }
  return false;
}

template <class Int>
Int parse_integer(std::string_view text) {
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("expected an integer, got '" + std::string(text) + "'");
  }
  return value;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  return in;
}

}  // namespace

std::string format_real(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::general, 17);
  if (ec != std::errc()) throw Error("failed to format a real");
  return std::string(buffer, ptr);
}

double parse_real(std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("expected a real number, got '" + std::string(text) + "'");
  }
  if (!std::isfinite(value)) throw ParseError("non-finite value '" + std::string(text) + "'");
  return value;
}

void write_problem(std::ostream& out, const DataMatrixd& x) {
  const auto& v = x.values();
  out << v.rows() << ',' << v.cols() << ',' << (x.centered() ? 1 : 0) << '\n';
  for (Eigen::Index k = 0; k < v.rows(); ++k) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_real(v(k, j));
    }
    out << '\n';
  }
}

DataMatrixd read_problem(std::istream& in) {
  std::string line;
  if (!next_line(in, line)) throw ParseError("problem file is empty");
  const auto header = split_commas(line);
  if (header.size() != 3) throw ParseError("problem header must be 'n,p,centered'");
  const auto n = parse_integer<Eigen::Index>(header[0]);
  const auto p = parse_integer<Eigen::Index>(header[1]);
  const auto centered = parse_integer<int>(header[2]);
  if (n < 1 || p < 2) throw ParseError("problem header needs n >= 1 and p >= 2");
  if (centered != 0 && centered != 1) throw ParseError("centered flag must be 0 or 1");

  DenseMatrix<double> values(n, p);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!next_line(in, line)) throw ParseError("expected " + std::to_string(n) + " data rows, found " + std::to_string(k));
    const auto fields = split_commas(line);
    if (static_cast<Eigen::Index>(fields.size()) != p) {
      throw ParseError("row " + std::to_string(k + 1) + " has " + std::to_string(fields.size()) + " values, expected " +
                       std::to_string(p));
    }
    for (Eigen::Index j = 0; j < p; ++j) values(k, j) = parse_real(fields[static_cast<std::size_t>(j)]);
  }
  if (next_line(in, line)) throw ParseError("more data rows than the header declares");
  return DataMatrixd(std::move(values), centered == 1);
}

void write_estimate(std::ostream& out, const EstimateFile& file) {
  const auto& w = file.estimate.matrix();
  out << w.rows() << ',' << format_real(file.lambda) << ',' << file.iterations << ',' << format_real(file.delta) << '\n';
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = i; j < w.cols(); ++j) {
      if (w(i, j) == 0.0) continue;
      out << i + 1 << ',' << j + 1 << ',' << format_real(w(i, j)) << '\n';
    }
  }
}

EstimateFile read_estimate(std::istream& in) {
  std::string line;
  if (!next_line(in, line)) throw ParseError("estimate file is empty");
  const auto header = split_commas(line);
  if (header.size() != 4) throw ParseError("estimate header must be 'p,lambda,iterations,delta'");
  const auto p = parse_integer<Eigen::Index>(header[0]);
  if (p < 2) throw ParseError("estimate header needs p >= 2");
  const double lambda = parse_real(header[1]);
  const auto iterations = parse_integer<std::size_t>(header[2]);
  const double delta = parse_real(header[3]);

  DenseMatrix<double> w = DenseMatrix<double>::Zero(p, p);
  std::set<std::pair<Eigen::Index, Eigen::Index>> seen;
  while (next_line(in, line)) {
    const auto fields = split_commas(line);
    if (fields.size() != 3) throw ParseError("estimate entries must be 'i,j,value'");
    const auto i = parse_integer<Eigen::Index>(fields[0]);
    const auto j = parse_integer<Eigen::Index>(fields[1]);
    if (i < 1 || j < i || j > p) throw ParseError("entry (" + std::string(fields[0]) + "," + std::string(fields[1]) + ") is not an upper-triangle index");
    if (!seen.emplace(i, j).second) throw ParseError("duplicate entry (" + std::to_string(i) + "," + std::to_string(j) + ")");
    const double value = parse_real(fields[2]);
    w(i - 1, j - 1) = value;
    w(j - 1, i - 1) = value;
  }
  for (Eigen::Index i = 1; i <= p; ++i) {
    if (!seen.contains({i, i})) throw ParseError("missing diagonal entry " + std::to_string(i));
  }
  return EstimateFile{PrecisionEstimated(std::move(w)), lambda, iterations, delta};
}

void write_problem(const std::filesystem::path& path, const DataMatrixd& x) {
  auto out = open_out(path);
  write_problem(out, x);
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

DataMatrixd read_problem(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_problem(in);
}

void write_estimate(const std::filesystem::path& path, const EstimateFile& file) {
  auto out = open_out(path);
  write_estimate(out, file);
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

EstimateFile read_estimate(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_estimate(in);
}

}  // namespace concord::io
