#ifndef GREEDYLAB_LINALG_HPP
#define GREEDYLAB_LINALG_HPP

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "greedylab/error.hpp"

namespace greedylab {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Column indices into a matrix. Zero-based throughout the library; only the
/// file formats and the CLI speak one-based indices.
using IndexSet = std::vector<Index>;

/// Relative threshold below which a factorization pivot counts as zero.
inline constexpr double kRankTol = 1e-10;

/// Dense real matrix with finite entries and at least one row and column.
///
/// Storage is Eigen's default: one contiguous column-major buffer, entry
/// (i, j) at offset j * rows + i.
class DenseMatrix {
 public:
  /// Throws BadDimensions for an empty shape and NonFinite for NaN/Inf.
  explicit DenseMatrix(Matrix entries);

  static DenseMatrix identity(Index n);

  Index rows() const noexcept { return entries_.rows(); }
  Index cols() const noexcept { return entries_.cols(); }
  double operator()(Index i, Index j) const { return entries_(i, j); }

  const Matrix& eigen() const noexcept { return entries_; }
  auto column(Index j) const { return entries_.col(j); }

  /// Phi_Lambda: the columns listed in `indices`, in that order.
  Matrix columns(std::span<const Index> indices) const;

  Vector column_norms() const;

  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
    return a.entries_ == b.entries_;
  }

 private:
  Matrix entries_;
};

struct LeastSquaresSolution {
  Vector coeffs;
  double residual_norm = 0.0;
};

/// Minimizes ||y - A c||_2 with a column-pivoted Householder QR.
/// Throws RankDeficient when some pivot falls below kRankTol times the largest.
LeastSquaresSolution least_squares(const Matrix& a, const Vector& y);

/// Orthogonal projector onto the span of a set of columns.
struct Projector {
  IndexSet basis;
  Matrix matrix;

  /// I - P.
  Matrix complement() const;
};

/// P_Lambda built as Q1 Q1^T from a thin orthogonal factor of Phi_Lambda.
/// An empty `lambda` yields the zero projector.
Projector projector(const DenseMatrix& phi, std::span<const Index> lambda);

/// A_Lambda = (I - P_Lambda) Phi: Phi with every column orthogonalized
/// against span(Phi_Lambda).
Matrix orthogonalized_matrix(const DenseMatrix& phi, std::span<const Index> lambda);

/// Throws BadDimensions unless every index lies in [0, n) with no repeats.
void check_index_set(std::span<const Index> indices, Index n, const char* what);

}  // namespace greedylab

#endif  // GREEDYLAB_LINALG_HPP
