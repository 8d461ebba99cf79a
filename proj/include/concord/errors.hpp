#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace concord {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

/// A data column whose sum of squares is exactly zero.
class ZeroVarianceColumn : public Error {
 public:
  explicit ZeroVarianceColumn(std::size_t column)
      : Error("zero-variance column " + std::to_string(column)), column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

class NonPositiveDiagonal : public Error {
 public:
  explicit NonPositiveDiagonal(std::size_t index)
      : Error("non-positive diagonal entry at " + std::to_string(index)), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class ScheduleMismatch : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class EmptyVector : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace concord
