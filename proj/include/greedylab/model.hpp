#ifndef GREEDYLAB_MODEL_HPP
#define GREEDYLAB_MODEL_HPP

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "greedylab/linalg.hpp"
#include "greedylab/random.hpp"

namespace greedylab {

/// Sparse vector in R^n stored as (support, values). The support is strictly
/// increasing and every stored value is finite and nonzero.
class SparseSignal {
 public:
  SparseSignal() = default;
  SparseSignal(Index dimension, IndexSet support, std::vector<double> values);

  /// Keeps the exact nonzeros of `dense`.
  static SparseSignal from_dense(const Vector& dense);

  Index dimension() const noexcept { return dimension_; }
  const IndexSet& support() const noexcept { return support_; }
  const std::vector<double>& values() const noexcept { return values_; }
  Index sparsity() const noexcept { return static_cast<Index>(support_.size()); }

  Vector to_dense() const;
  double norm() const;
  double max_abs() const;
  bool contains(Index j) const;

  /// The signal with every entry indexed by `lambda` set to zero.
  SparseSignal without(std::span<const Index> lambda) const;

  friend bool operator==(const SparseSignal&, const SparseSignal&) = default;

 private:
  Index dimension_ = 0;
  IndexSet support_;
  std::vector<double> values_;
};

/// Magnitudes sorted nonincreasing, with the original index of each entry.
struct OrderedMagnitudes {
  std::vector<double> sorted;
  IndexSet permutation;

  /// |x'(j)| with zero-based j; zero past the sparsity.
  double at(std::size_t j) const { return j < sorted.size() ? sorted[j] : 0.0; }
};

/// Ties are broken by ascending original index.
OrderedMagnitudes ordered_magnitudes(const SparseSignal& x);

namespace ensemble {
struct Gaussian {};
struct Bernoulli {};
/// Q (I + eps E) with Q Haar-orthogonal, E standard normal, then unit
/// columns. Square only; eps = 0 gives an orthonormal basis.
struct IdentityPerturbed {
  double eps = 0.0;
};
struct Explicit {
  Matrix entries;
};
}  // namespace ensemble

using Ensemble = std::variant<ensemble::Gaussian, ensemble::Bernoulli,
                              ensemble::IdentityPerturbed, ensemble::Explicit>;

/// Deterministic for a fixed seed. Gaussian entries are N(0, 1/M); Bernoulli
/// entries are +-1/sqrt(M).
DenseMatrix gen_matrix(const Ensemble& ensemble, Index rows, Index cols, std::uint64_t seed);

/// Scales every column to unit norm. Throws ZeroVector on a zero column.
DenseMatrix normalize_columns(const DenseMatrix& phi);

/// Haar-distributed n x n orthogonal matrix.
Matrix random_orthogonal(Index n, Rng& rng);

enum class ValueDistribution { Gaussian, UnitSigns };

/// Support uniform over all k-subsets of {0..n-1}.
SparseSignal gen_sparse(Index n, Index k, ValueDistribution values, std::uint64_t seed);
SparseSignal gen_sparse(Index n, Index k, ValueDistribution values, Rng& rng);

/// Random support and signs with ordered magnitudes satisfying
/// |x'(j)| / |x'(j+1)| >= alpha for every consecutive pair.
SparseSignal gen_decaying(Index n, Index k, double alpha, std::uint64_t seed);
SparseSignal gen_decaying(Index n, Index k, double alpha, Rng& rng);

/// Smallest ratio |x'(j)| / |x'(j+1)| over consecutive ordered magnitudes, or
/// +inf for fewer than two nonzeros.
double min_decay_ratio(const SparseSignal& x);

/// Tolerance on | ||phi_j|| - 1 | accepted by coherence().
inline constexpr double kUnitNormTol = 1e-8;

/// max_{i != j} |<phi_i, phi_j>|. Throws ColumnsNotNormalized unless every
/// column has unit norm within kUnitNormTol.
double coherence(const DenseMatrix& phi);

enum class RipMode { Exact, SampledLowerBound };

struct RipReport {
  Index order = 0;
  double delta = 0.0;
  RipMode mode = RipMode::Exact;
  IndexSet witness;
  std::uint64_t supports_examined = 0;
};

inline constexpr std::uint64_t kDefaultRipBudget = 1'000'000;

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Advances `subset` (strictly increasing, size k) to the next k-subset of
/// {0..n-1} in colexicographic order; false after the last one.
bool next_colex(IndexSet& subset, Index n);

/// Every k-subset of {0..n-1} in colexicographic order.
std::vector<IndexSet> all_supports(Index n, Index k);

/// Deviation of the Gram eigenvalues on `support` from 1:
/// max(lambda_max - 1, 1 - lambda_min).
double support_deviation(const Matrix& gram, std::span<const Index> support);

/// Exact delta_K by enumerating every K-column support in colexicographic
/// order. The witness is the first support reaching the maximum.
/// Throws BudgetExceeded when C(N, K) > budget.
RipReport rip_exact(const DenseMatrix& phi, Index k, std::uint64_t budget = kDefaultRipBudget);

/// Same maximum over `trials` uniformly drawn supports: a lower bound on
/// delta_K. When trials >= C(N, K) every support is visited once instead.
RipReport rip_sampled(const DenseMatrix& phi, Index k, std::uint64_t trials, std::uint64_t seed);

struct SquaredNormBounds {
  double lower;
  double upper;
};

/// Bounds on ||A_Lambda u||^2 / ||u||^2 for u supported off Lambda with
/// ||u||_0 <= K - |Lambda|, given delta_K of Phi:
/// (1 - delta / (1 - delta), 1 + delta).
SquaredNormBounds modified_rip_bounds(double delta, Index k, Index lambda_size);

}  // namespace greedylab

#endif  // GREEDYLAB_MODEL_HPP
