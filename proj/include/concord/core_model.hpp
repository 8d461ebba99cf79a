#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "concord/errors.hpp"

namespace concord {

template <class Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <class Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/**
 * Observations (rows) by variables (columns).
 *
 * When `centered` is set, every column must sum to zero within 1e-9 * n;
 * the constructor enforces this.
 */
template <class Scalar>
class DataMatrix {
 public:
  DataMatrix(DenseMatrix<Scalar> values, bool centered)
      : values_(std::move(values)), centered_(centered) {
    if (values_.rows() < 1) throw DimensionError("data matrix needs at least one row");
    if (values_.cols() < 2) throw DimensionError("data matrix needs at least two columns");
    if (centered_) {
      const Scalar tol = Scalar(1e-9) * Scalar(values_.rows());
      for (Eigen::Index j = 0; j < values_.cols(); ++j) {
        if (std::abs(values_.col(j).sum()) > tol) {
          throw DimensionError("column " + std::to_string(j) + " is flagged centered but does not sum to zero");
        }
      }
    }
  }

  const DenseMatrix<Scalar>& values() const noexcept { return values_; }
  bool centered() const noexcept { return centered_; }
  Eigen::Index samples() const noexcept { return values_.rows(); }
  Eigen::Index variables() const noexcept { return values_.cols(); }

 private:
  DenseMatrix<Scalar> values_;
  bool centered_;
};

/// T = X^T X together with the sample count n. Exactly symmetric, positive diagonal.
template <class Scalar>
class GramMatrix {
 public:
  /// Adopts a precomputed Gram matrix; symmetry is checked exactly.
  GramMatrix(DenseMatrix<Scalar> t, Eigen::Index n) : t_(std::move(t)), n_(n) {
    if (n_ < 1) throw DimensionError("sample count must be positive");
    if (t_.rows() != t_.cols()) throw DimensionError("Gram matrix must be square");
    if (t_.rows() < 2) throw DimensionError("Gram matrix needs p >= 2");
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (!(t_(i, i) > Scalar(0))) throw ZeroVarianceColumn(static_cast<std::size_t>(i));
      for (Eigen::Index j = i + 1; j < t_.cols(); ++j) {
        if (t_(i, j) != t_(j, i)) throw DimensionError("Gram matrix is not exactly symmetric");
      }
    }
  }

  const DenseMatrix<Scalar>& t() const noexcept { return t_; }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const { return t_(i, j); }
  Eigen::Index n() const noexcept { return n_; }
  Eigen::Index dim() const noexcept { return t_.rows(); }

 private:
  DenseMatrix<Scalar> t_;
  Eigen::Index n_;
};

/**
 * Dense symmetric iterate with positive diagonal.
 *
 * Both triangles are stored; every mutator writes the mirrored cell too,
 * so omega(i, j) == omega(j, i) holds bit-for-bit at all times.
 */
template <class Scalar>
class PrecisionEstimate {
 public:
  static PrecisionEstimate identity(Eigen::Index p) {
    return PrecisionEstimate(DenseMatrix<Scalar>::Identity(p, p));
  }

  explicit PrecisionEstimate(DenseMatrix<Scalar> omega) : omega_(std::move(omega)) {
    if (omega_.rows() != omega_.cols()) throw DimensionError("precision matrix must be square");
    if (omega_.rows() < 2) throw DimensionError("precision matrix needs p >= 2");
    for (Eigen::Index i = 0; i < omega_.rows(); ++i) {
      if (!(omega_(i, i) > Scalar(0))) throw NonPositiveDiagonal(static_cast<std::size_t>(i));
      for (Eigen::Index j = i + 1; j < omega_.cols(); ++j) {
        if (omega_(i, j) != omega_(j, i)) throw DimensionError("precision matrix is not exactly symmetric");
      }
    }
  }

  const DenseMatrix<Scalar>& matrix() const noexcept { return omega_; }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const { return omega_(i, j); }
  Eigen::Index dim() const noexcept { return omega_.rows(); }

  void set_offdiagonal(Eigen::Index i, Eigen::Index j, Scalar value) noexcept {
    omega_(i, j) = value;
    omega_(j, i) = value;
  }
  void set_diagonal(Eigen::Index i, Scalar value) noexcept { omega_(i, i) = value; }

  const Scalar* row_data(Eigen::Index i) const noexcept { return omega_.data() + i * omega_.cols(); }

  friend bool operator==(const PrecisionEstimate& a, const PrecisionEstimate& b) {
    return a.omega_.rows() == b.omega_.rows() && a.omega_ == b.omega_;
  }

 private:
  DenseMatrix<Scalar> omega_;
};

using DataMatrixd = DataMatrix<double>;
using GramMatrixd = GramMatrix<double>;
using PrecisionEstimated = PrecisionEstimate<double>;

/// Subtracts each column mean.
template <class Scalar>
DataMatrix<Scalar> center_columns(const DataMatrix<Scalar>& x) {
  DenseMatrix<Scalar> centered = x.values();
  centered.rowwise() -= centered.colwise().mean();
  return DataMatrix<Scalar>(std::move(centered), true);
}

/**
 * Centers each column and scales it to unit mean square, so that
 * X^T X = n R with R the sample correlation matrix.
 */
template <class Scalar>
DataMatrix<Scalar> standardize_columns(const DataMatrix<Scalar>& x) {
  DenseMatrix<Scalar> z = x.values();
  z.rowwise() -= z.colwise().mean();
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    const Scalar rms = std::sqrt(z.col(j).squaredNorm() / Scalar(z.rows()));
    if (!(rms > Scalar(0))) throw ZeroVarianceColumn(static_cast<std::size_t>(j));
    z.col(j) /= rms;
  }
  return DataMatrix<Scalar>(std::move(z), true);
}

/// How a user-facing penalty maps onto the objective above.
enum class PenaltyScale {
  /// lambda enters the objective unchanged; data are only centered.
  Raw,
  /// Data are standardized and lambda becomes 2 n lambda, which makes the
  /// objective n times  -sum log w_ii + 1/2 sum_i w_i. R w_i.^T + lambda sum_{i!=j} |w_ij|.
  Correlation,
};

template <class Scalar>
Scalar objective_lambda(Scalar lambda, Eigen::Index n, PenaltyScale scale) {
  return scale == PenaltyScale::Raw ? lambda : Scalar(2) * Scalar(n) * lambda;
}

/// Centers (Raw) or standardizes (Correlation) the columns.
template <class Scalar>
DataMatrix<Scalar> prepare_data(const DataMatrix<Scalar>& x, PenaltyScale scale) {
  if (scale == PenaltyScale::Correlation) return standardize_columns(x);
  return x.centered() ? x : center_columns(x);
}

/// Gram matrix X^T X. Only the lower triangle is accumulated and then
/// mirrored, so the result is symmetric by construction.
template <class Scalar>
GramMatrix<Scalar> compute_gram(const DataMatrix<Scalar>& x) {
  const Eigen::Index p = x.variables();
  DenseMatrix<Scalar> t = DenseMatrix<Scalar>::Zero(p, p);
  t.template selfadjointView<Eigen::Lower>().rankUpdate(x.values().transpose());
  t.template triangularView<Eigen::StrictlyUpper>() = t.transpose();
  return GramMatrix<Scalar>(std::move(t), x.samples());
}

/// sign(x) * max(|x| - tau, 0)
template <class Scalar>
constexpr Scalar soft_threshold(Scalar x, Scalar tau) noexcept {
  if (x > tau) return x - tau;
  if (x < -tau) return x + tau;
  return Scalar(0);
}

template <class Scalar>
Scalar l1_offdiagonal(const PrecisionEstimate<Scalar>& omega) {
  Scalar sum = 0;
  const auto& m = omega.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) sum += std::abs(m(i, j));
  return sum;
}

/**
 * CONCORD objective in Gram form:
 *
 *   -n sum_i log w_ii + 1/2 sum_i w_i. T w_i.^T + lambda sum_{i<j} |w_ij|
 *
 * Throws NonPositiveDiagonal if any w_ii <= 0.
 */
template <class Scalar>
Scalar objective(const PrecisionEstimate<Scalar>& omega, const GramMatrix<Scalar>& gram, Scalar lambda) {
  const auto& w = omega.matrix();
  if (w.rows() != gram.dim()) throw DimensionError("objective: dimension mismatch");
  Scalar log_term = 0;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    if (!(w(i, i) > Scalar(0))) throw NonPositiveDiagonal(static_cast<std::size_t>(i));
    log_term += std::log(w(i, i));
  }
  const DenseMatrix<Scalar> wt = w * gram.t();
  const Scalar quadratic = wt.cwiseProduct(w).sum();
  return -Scalar(gram.n()) * log_term + Scalar(0.5) * quadratic + lambda * l1_offdiagonal(omega);
}

/// max_{i,j} |a_ij - b_ij|, by a serial scan.
template <class Scalar>
Scalar max_abs_diff(const PrecisionEstimate<Scalar>& a, const PrecisionEstimate<Scalar>& b) {
  if (a.dim() != b.dim()) throw DimensionError("max_abs_diff: dimension mismatch");
  Scalar best = 0;
  const auto& ma = a.matrix();
  const auto& mb = b.matrix();
  for (Eigen::Index i = 0; i < ma.rows(); ++i)
    for (Eigen::Index j = 0; j < ma.cols(); ++j) best = std::max(best, std::abs(ma(i, j) - mb(i, j)));
  return best;
}

/// Number of strictly-upper entries that are not exactly zero.
template <class Scalar>
std::size_t edge_count(const PrecisionEstimate<Scalar>& omega) {
  std::size_t edges = 0;
  const auto& m = omega.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j)
      if (m(i, j) != Scalar(0)) ++edges;
  return edges;
}

template <class Scalar>
struct OptimalityReport {
  bool ok = true;
  Scalar worst_violation = 0;
  Eigen::Index row = 0;
  Eigen::Index col = 0;
};

/**
 * Partial derivatives of the smooth part of the objective.
 *
 * Diagonal entry (i, i) holds d/dw_ii. Off-diagonal entry (i, j) holds the
 * derivative along the symmetric coordinate w_ij = w_ji, which is
 * (W T)_ij + (W T)_ji.
 */
template <class Scalar>
DenseMatrix<Scalar> smooth_gradient(const PrecisionEstimate<Scalar>& omega, const GramMatrix<Scalar>& gram) {
  const auto& w = omega.matrix();
  const DenseMatrix<Scalar> wt = w * gram.t();
  DenseMatrix<Scalar> g = wt + wt.transpose();
  for (Eigen::Index i = 0; i < w.rows(); ++i) g(i, i) = wt(i, i) - Scalar(gram.n()) / w(i, i);
  return g;
}

/**
 * Subgradient stationarity check. For each coordinate computes how far the
 * zero vector is from the subdifferential and reports the worst offender.
 */
template <class Scalar>
OptimalityReport<Scalar> check_optimality(const PrecisionEstimate<Scalar>& omega, const GramMatrix<Scalar>& gram,
                                          Scalar lambda, Scalar eps) {
  const auto& w = omega.matrix();
  if (w.rows() != gram.dim()) throw DimensionError("check_optimality: dimension mismatch");
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    if (!(w(i, i) > Scalar(0))) throw NonPositiveDiagonal(static_cast<std::size_t>(i));

  const DenseMatrix<Scalar> g = smooth_gradient(omega, gram);
  OptimalityReport<Scalar> report;
  auto consider = [&](Scalar violation, Eigen::Index i, Eigen::Index j) {
    if (violation > report.worst_violation) {
      report.worst_violation = violation;
      report.row = i;
      report.col = j;
    }
  };
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    consider(std::abs(g(i, i)), i, i);
    for (Eigen::Index j = i + 1; j < w.cols(); ++j) {
      const Scalar wij = w(i, j);
      if (wij != Scalar(0)) {
        consider(std::abs(g(i, j) + lambda * (wij > 0 ? Scalar(1) : Scalar(-1))), i, j);
      } else {
        consider(std::max(Scalar(0), std::abs(g(i, j)) - lambda), i, j);
      }
    }
  }
  report.ok = report.worst_violation <= eps;
  return report;
}

}  // namespace concord
