#include "greedylab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace greedylab {

namespace {

void require_dims(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::BadDimensions, message);
}

double nonzero_normal(Rng& rng) {
  std::normal_distribution<double> normal;
  double v = 0.0;
  while (v == 0.0) v = normal(rng);
  return v;
}

IndexSet uniform_support(Index n, Index k, Rng& rng) {
  IndexSet all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Index{0});
  IndexSet out;
  out.reserve(static_cast<std::size_t>(k));
  std::sample(all.begin(), all.end(), std::back_inserter(out), k, rng);
  return out;
}

}  // namespace

// SparseSignal

SparseSignal::SparseSignal(Index dimension, IndexSet support, std::vector<double> values)
    : dimension_(dimension), support_(std::move(support)), values_(std::move(values)) {
  require_dims(dimension_ >= 0, "signal dimension must be nonnegative");
  require_dims(support_.size() == values_.size(),
               "signal support and values differ in length");
  for (std::size_t i = 0; i < support_.size(); ++i) {
    require_dims(support_[i] >= 0 && support_[i] < dimension_,
                 "signal index " + std::to_string(support_[i]) + " out of range");
    require_dims(i == 0 || support_[i - 1] < support_[i],
                 "signal support must be strictly increasing");
    if (!std::isfinite(values_[i])) throw Error(ErrorCode::NonFinite, "signal value not finite");
    if (values_[i] == 0.0) {
      throw Error(ErrorCode::InvalidArgument, "signal values on the support must be nonzero");
    }
  }
}

SparseSignal SparseSignal::from_dense(const Vector& dense) {
  IndexSet support;
  std::vector<double> values;
  for (Index i = 0; i < dense.size(); ++i) {
    if (dense(i) != 0.0) {
      support.push_back(i);
      values.push_back(dense(i));
    }
  }
  return SparseSignal(dense.size(), std::move(support), std::move(values));
}

Vector SparseSignal::to_dense() const {
  Vector out = Vector::Zero(dimension_);
  for (std::size_t i = 0; i < support_.size(); ++i) out(support_[i]) = values_[i];
  return out;
}

double SparseSignal::norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

double SparseSignal::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool SparseSignal::contains(Index j) const {
  return std::binary_search(support_.begin(), support_.end(), j);
}

SparseSignal SparseSignal::without(std::span<const Index> lambda) const {
  IndexSet support;
  std::vector<double> values;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (std::find(lambda.begin(), lambda.end(), support_[i]) == lambda.end()) {
      support.push_back(support_[i]);
      values.push_back(values_[i]);
    }
  }
  return SparseSignal(dimension_, std::move(support), std::move(values));
}

OrderedMagnitudes ordered_magnitudes(const SparseSignal& x) {
  std::vector<std::size_t> order(x.support().size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto& v = x.values();
  // Support is increasing, so a stable sort breaks ties by ascending index.
  std::stable_sort(order.begin(), order.end(), [&v](std::size_t a, std::size_t b) {
    return std::abs(v[a]) > std::abs(v[b]);
  });
  OrderedMagnitudes out;
  for (std::size_t i : order) {
    out.sorted.push_back(std::abs(v[i]));
    out.permutation.push_back(x.support()[i]);
  }
  return out;
}

double min_decay_ratio(const SparseSignal& x) {
  const auto ordered = ordered_magnitudes(x);
  double ratio = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j + 1 < ordered.sorted.size(); ++j) {
    ratio = std::min(ratio, ordered.sorted[j] / ordered.sorted[j + 1]);
  }
  return ratio;
}

// Generators

Matrix random_orthogonal(Index n, Rng& rng) {
  std::normal_distribution<double> normal;
  Matrix g(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  // Sign fix on diag(R) makes the distribution Haar.
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

DenseMatrix gen_matrix(const Ensemble& ensemble, Index rows, Index cols, std::uint64_t seed) {
  require_dims(rows >= 1 && cols >= 1, "matrix dimensions must be positive, got M=" +
                                           std::to_string(rows) + " N=" + std::to_string(cols));
  Rng rng = make_rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(rows));

  if (std::holds_alternative<ensemble::Gaussian>(ensemble)) {
    std::normal_distribution<double> normal(0.0, scale);
    Matrix a(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) a(i, j) = normal(rng);
    return DenseMatrix(std::move(a));
  }
  if (std::holds_alternative<ensemble::Bernoulli>(ensemble)) {
    std::bernoulli_distribution coin(0.5);
    Matrix a(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) a(i, j) = coin(rng) ? scale : -scale;
    return DenseMatrix(std::move(a));
  }
  if (const auto* p = std::get_if<ensemble::IdentityPerturbed>(&ensemble)) {
    require_dims(rows == cols, "identity_perturbed ensemble needs M = N");
    if (!(p->eps >= 0.0) || !std::isfinite(p->eps)) {
      throw Error(ErrorCode::InvalidArgument, "identity_perturbed eps must be >= 0");
    }
    const Matrix q = random_orthogonal(rows, rng);
    std::normal_distribution<double> normal;
    Matrix e(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) e(i, j) = normal(rng);
    Matrix a = q * (Matrix::Identity(rows, cols) + p->eps * e);
    a.colwise().normalize();
    return DenseMatrix(std::move(a));
  }
  const auto& entries = std::get<ensemble::Explicit>(ensemble).entries;
  require_dims(entries.rows() == rows && entries.cols() == cols,
               "explicit matrix is " + std::to_string(entries.rows()) + "x" +
                   std::to_string(entries.cols()) + ", expected " + std::to_string(rows) + "x" +
                   std::to_string(cols));
  return DenseMatrix(entries);
}

DenseMatrix normalize_columns(const DenseMatrix& phi) {
  Matrix a = phi.eigen();
  for (Index j = 0; j < a.cols(); ++j) {
    const double n = a.col(j).norm();
    if (n == 0.0) throw Error(ErrorCode::ZeroVector, "column " + std::to_string(j) + " is zero");
    a.col(j) /= n;
  }
  return DenseMatrix(std::move(a));
}

SparseSignal gen_sparse(Index n, Index k, ValueDistribution values, Rng& rng) {
  require_dims(k >= 1 && k <= n, "need 1 <= K <= N, got K=" + std::to_string(k) +
                                     " N=" + std::to_string(n));
  IndexSet support = uniform_support(n, k, rng);
  std::vector<double> v(support.size());
  std::bernoulli_distribution coin(0.5);
  for (auto& x : v) {
    x = values == ValueDistribution::Gaussian ? nonzero_normal(rng) : (coin(rng) ? 1.0 : -1.0);
  }
  return SparseSignal(n, std::move(support), std::move(v));
}

SparseSignal gen_sparse(Index n, Index k, ValueDistribution values, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return gen_sparse(n, k, values, rng);
}

SparseSignal gen_decaying(Index n, Index k, double alpha, Rng& rng) {
  require_dims(k >= 1 && k <= n, "need 1 <= K <= N, got K=" + std::to_string(k) +
                                     " N=" + std::to_string(n));
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::InvalidArgument, "decay ratio alpha must be > 1");
  }
  std::uniform_real_distribution<double> bump(0.0, 0.5);
  // Magnitudes from the smallest up; each one at least alpha times the last.
  std::vector<double> magnitudes(static_cast<std::size_t>(k));
  double m = 1.0 + bump(rng);
  for (auto it = magnitudes.rbegin(); it != magnitudes.rend(); ++it) {
    *it = m;
    m = alpha * m * (1.0 + bump(rng));
  }
  const double top = magnitudes.front();
  for (auto& v : magnitudes) v /= top;  // largest entry is 1

  IndexSet support = uniform_support(n, k, rng);
  std::shuffle(magnitudes.begin(), magnitudes.end(), rng);
  std::bernoulli_distribution coin(0.5);
  for (auto& v : magnitudes) {
    if (coin(rng)) v = -v;
  }
  return SparseSignal(n, std::move(support), std::move(magnitudes));
}

SparseSignal gen_decaying(Index n, Index k, double alpha, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return gen_decaying(n, k, alpha, rng);
}

// Coherence and isometry constants

double coherence(const DenseMatrix& phi) {
  const Vector norms = phi.column_norms();
  for (Index j = 0; j < norms.size(); ++j) {
    if (std::abs(norms(j) - 1.0) > kUnitNormTol) {
      throw Error(ErrorCode::ColumnsNotNormalized,
                  "column " + std::to_string(j + 1) + " has norm " + std::to_string(norms(j)));
    }
  }
  const Matrix gram = phi.eigen().transpose() * phi.eigen();
  double mu = 0.0;
  for (Index j = 0; j < gram.cols(); ++j)
    for (Index i = 0; i < j; ++i) mu = std::max(mu, std::abs(gram(i, j)));
  return mu;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
  }
  return static_cast<std::uint64_t>(r);
}

bool next_colex(IndexSet& subset, Index n) {
  const std::size_t k = subset.size();
  for (std::size_t i = 0; i < k; ++i) {
    const Index limit = (i + 1 < k) ? subset[i + 1] : n;
    if (subset[i] + 1 < limit) {
      ++subset[i];
      for (std::size_t j = 0; j < i; ++j) subset[j] = static_cast<Index>(j);
      return true;
    }
  }
  return false;
}

std::vector<IndexSet> all_supports(Index n, Index k) {
  std::vector<IndexSet> out;
  if (k < 0 || k > n) return out;
  IndexSet s(static_cast<std::size_t>(k));
  std::iota(s.begin(), s.end(), Index{0});
  do {
    out.push_back(s);
  } while (next_colex(s, n));
  return out;
}

double support_deviation(const Matrix& gram, std::span<const Index> support) {
  const Index k = static_cast<Index>(support.size());
  Matrix sub(k, k);
  for (Index j = 0; j < k; ++j)
    for (Index i = 0; i < k; ++i) sub(i, j) = gram(support[i], support[j]);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sub, Eigen::EigenvaluesOnly);
  const Vector& lambda = eig.eigenvalues();  // ascending
  return std::max(lambda(k - 1) - 1.0, 1.0 - lambda(0));
}

namespace {

void check_rip_order(const DenseMatrix& phi, Index k) {
  require_dims(k >= 1 && k <= std::min(phi.rows(), phi.cols()),
               "RIP order K=" + std::to_string(k) + " outside [1, min(M, N)=" +
                   std::to_string(std::min(phi.rows(), phi.cols())) + "]");
}

RipReport exhaustive(const Matrix& gram, Index n, Index k, RipMode mode) {
  RipReport report;
  report.order = k;
  report.mode = mode;
  report.delta = -std::numeric_limits<double>::infinity();
  IndexSet s(static_cast<std::size_t>(k));
  std::iota(s.begin(), s.end(), Index{0});
  do {
    const double d = support_deviation(gram, s);
    if (d > report.delta) {
      report.delta = d;
      report.witness = s;
    }
    ++report.supports_examined;
  } while (next_colex(s, n));
  report.delta = std::max(report.delta, 0.0);
  return report;
}

}  // namespace

RipReport rip_exact(const DenseMatrix& phi, Index k, std::uint64_t budget) {
  check_rip_order(phi, k);
  const std::uint64_t total = binomial(static_cast<std::uint64_t>(phi.cols()),
                                       static_cast<std::uint64_t>(k));
  if (total > budget) {
    throw Error(ErrorCode::BudgetExceeded,
                "C(" + std::to_string(phi.cols()) + ", " + std::to_string(k) + ") = " +
                    std::to_string(total) + " supports exceeds budget " +
                    std::to_string(budget) + "; use rip_sampled");
  }
  const Matrix gram = phi.eigen().transpose() * phi.eigen();
  return exhaustive(gram, phi.cols(), k, RipMode::Exact);
}

RipReport rip_sampled(const DenseMatrix& phi, Index k, std::uint64_t trials, std::uint64_t seed) {
  check_rip_order(phi, k);
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "rip_sampled needs trials >= 1");
  const Matrix gram = phi.eigen().transpose() * phi.eigen();
  const std::uint64_t total = binomial(static_cast<std::uint64_t>(phi.cols()),
                                       static_cast<std::uint64_t>(k));
  if (trials >= total) return exhaustive(gram, phi.cols(), k, RipMode::SampledLowerBound);

  RipReport report;
  report.order = k;
  report.mode = RipMode::SampledLowerBound;
  report.delta = -std::numeric_limits<double>::infinity();
  Rng rng = make_rng(seed);
  for (std::uint64_t t = 0; t < trials; ++t) {
    const IndexSet s = uniform_support(phi.cols(), k, rng);
    const double d = support_deviation(gram, s);
    if (d > report.delta) {
      report.delta = d;
      report.witness = s;
    }
    ++report.supports_examined;
  }
  report.delta = std::max(report.delta, 0.0);
  return report;
}

SquaredNormBounds modified_rip_bounds(double delta, Index k, Index lambda_size) {
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::DeltaOutOfRange,
                "modified RIP bounds need 0 <= delta < 1, got " + std::to_string(delta));
  }
  if (lambda_size < 0 || lambda_size >= k) {
    throw Error(ErrorCode::PreconditionViolated, "modified RIP bounds need |Lambda| < K");
  }
  return {1.0 - delta / (1.0 - delta), 1.0 + delta};
}

}  // namespace greedylab
