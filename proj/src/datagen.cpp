#include "concord/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "concord/random.hpp"

namespace concord {

namespace {

std::vector<IndexPair> support_of(const DenseMatrix<double>& omega) {
  std::vector<IndexPair> support;
  for (Eigen::Index i = 0; i < omega.rows(); ++i)
    for (Eigen::Index j = i + 1; j < omega.cols(); ++j)
      if (omega(i, j) != 0.0) support.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return support;
}

}  // namespace

TruthModel ar2_precision(std::size_t p) {
  if (p < 3) throw DimensionError("AR(2) precision needs p >= 3");
  const auto n = static_cast<Eigen::Index>(p);
  DenseMatrix<double> omega = DenseMatrix<double>::Identity(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) omega(i, i + 1) = omega(i + 1, i) = 0.45;
  for (Eigen::Index i = 0; i + 2 < n; ++i) omega(i, i + 2) = omega(i + 2, i) = 0.4;

  TruthModel truth{TruthKind::AR2, 0.0, 0, PrecisionEstimated(omega), support_of(omega)};
  return truth;
}

std::size_t structural_cutoff(std::size_t p) {
  // sqrt(<k> p) with mean degree <k> = 2 for a tree
  return static_cast<std::size_t>(std::ceil(std::sqrt(2.0 * static_cast<double>(p))));
}

std::vector<IndexPair> preferential_attachment_tree(std::size_t p, double alpha, std::uint64_t seed) {
  if (p < 2) throw DimensionError("graph needs at least two vertices");
  if (!(alpha > 2.0)) throw std::invalid_argument("scale-free exponent must exceed 2");
  const double attractiveness = alpha - 3.0;
  const double cutoff = static_cast<double>(structural_cutoff(p));

  Rng rng(seed, Stream::Topology);
  std::vector<double> degree(p, 0.0);
  std::vector<IndexPair> edges;
  edges.reserve(p - 1);
  edges.emplace_back(0, 1);
  degree[0] = degree[1] = 1.0;

  for (std::size_t v = 2; v < p; ++v) {
    double total = 0.0;
    for (std::size_t i = 0; i < v; ++i)
      if (degree[i] < cutoff) total += degree[i] + attractiveness;
    double target = rng.uniform() * total;
    std::size_t chosen = v;
    for (std::size_t i = 0; i < v; ++i) {
      if (degree[i] >= cutoff) continue;
      chosen = i;
      target -= degree[i] + attractiveness;
      if (target < 0.0) break;
    }
    edges.emplace_back(chosen, v);
    degree[chosen] += 1.0;
    degree[v] = 1.0;
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

TruthModel scale_free_precision(std::size_t p, double alpha, std::uint64_t seed) {
  if (p < 3) throw DimensionError("scale-free precision needs p >= 3");
  const auto edges = preferential_attachment_tree(p, alpha, seed);
  const auto n = static_cast<Eigen::Index>(p);

  Rng rng(seed, Stream::Weights);
  DenseMatrix<double> raw = DenseMatrix<double>::Zero(n, n);
  for (const auto& e : edges) {
    const double magnitude = 0.5 + 0.5 * rng.uniform();
    const double value = rng.uniform() < 0.5 ? -magnitude : magnitude;
    raw(e.r, e.s) = raw(e.s, e.r) = value;
  }
  const DenseVector<double> row_sum = raw.cwiseAbs().rowwise().sum();

  // Row i scaled by 1/(1.25 S_i), then the two mirrored entries combined by
  // their geometric mean: w_ij / (1.25 sqrt(S_i S_j)).
  DenseMatrix<double> omega = DenseMatrix<double>::Identity(n, n);
  for (const auto& e : edges) {
    double w = raw(e.r, e.s) / (1.25 * std::sqrt(row_sum(e.r) * row_sum(e.s)));
    if (std::abs(w) < 0.1) w = w < 0.0 ? -0.1 : 0.1;
    omega(e.r, e.s) = omega(e.s, e.r) = w;
  }

  return TruthModel{TruthKind::ScaleFree, alpha, seed, PrecisionEstimated(omega), edges};
}

DataMatrixd sample_mvn(const TruthModel& truth, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw DimensionError("need at least one sample");
  const auto& omega = truth.omega_true.matrix();
  const Eigen::LLT<Eigen::MatrixXd> llt(omega);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("truth precision matrix is not positive definite");

  const Eigen::Index p = omega.rows();
  Rng rng(seed, Stream::Samples);
  Eigen::MatrixXd z(p, static_cast<Eigen::Index>(n));
  for (Eigen::Index k = 0; k < z.cols(); ++k)
    for (Eigen::Index j = 0; j < p; ++j) z(j, k) = rng.normal();

  // columns of x^T solve L^T x = z
  const Eigen::MatrixXd xt = llt.matrixU().solve(z);
  return DataMatrixd(DenseMatrix<double>(xt.transpose()), false);
}

}  // namespace concord
