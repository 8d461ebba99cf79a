#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "concord/core_model.hpp"

namespace concord::io {

/**
 * Problem file: header line "n,p,centered" (centered is 0 or 1), then n rows
 * of p comma-separated reals.
 *
 * Estimate file: header line "p,lambda,iterations,delta", then one line
 * "i,j,value" (one-based, i <= j) per nonzero upper-triangle entry. Diagonal
 * entries are always present.
 *
 * Reals are written with 17 significant digits in the C locale, so a write
 * followed by a read reproduces every value bit for bit.
 */

struct EstimateFile {
  PrecisionEstimated estimate;
  double lambda = 0.0;
  std::size_t iterations = 0;
  double delta = 0.0;
};

std::string format_real(double value);
double parse_real(std::string_view text);

void write_problem(std::ostream& out, const DataMatrixd& x);
DataMatrixd read_problem(std::istream& in);

void write_estimate(std::ostream& out, const EstimateFile& file);
EstimateFile read_estimate(std::istream& in);

void write_problem(const std::filesystem::path& path, const DataMatrixd& x);
DataMatrixd read_problem(const std::filesystem::path& path);
void write_estimate(const std::filesystem::path& path, const EstimateFile& file);
EstimateFile read_estimate(const std::filesystem::path& path);

}  // namespace concord::io
