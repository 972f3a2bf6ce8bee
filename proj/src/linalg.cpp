#include "greedylab/linalg.hpp"

#include <algorithm>
#include <string>

namespace greedylab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::BadDimensions: return "BadDimensions";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ColumnsNotNormalized: return "ColumnsNotNormalized";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::DeltaOutOfRange: return "DeltaOutOfRange";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::EmptyCandidates: return "EmptyCandidates";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

DenseMatrix::DenseMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 1 || entries_.cols() < 1) {
    throw Error(ErrorCode::BadDimensions,
                "matrix must have at least one row and one column, got " +
                    std::to_string(entries_.rows()) + "x" + std::to_string(entries_.cols()));
  }
  if (!entries_.allFinite()) {
    throw Error(ErrorCode::NonFinite, "matrix has NaN or infinite entries");
  }
}

DenseMatrix DenseMatrix::identity(Index n) { return DenseMatrix(Matrix::Identity(n, n)); }

Matrix DenseMatrix::columns(std::span<const Index> indices) const {
  Matrix out(rows(), static_cast<Index>(indices.size()));
  for (Index k = 0; k < out.cols(); ++k) {
    out.col(k) = entries_.col(indices[static_cast<std::size_t>(k)]);
  }
  return out;
}

Vector DenseMatrix::column_norms() const { return entries_.colwise().norm().transpose(); }

void check_index_set(std::span<const Index> indices, Index n, const char* what) {
  IndexSet sorted(indices.begin(), indices.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::BadDimensions, std::string(what) + " has repeated indices");
  }
  if (!sorted.empty() && (sorted.front() < 0 || sorted.back() >= n)) {
    throw Error(ErrorCode::BadDimensions,
                std::string(what) + " index out of range [0, " + std::to_string(n) + ")");
  }
}

namespace {

Eigen::ColPivHouseholderQR<Matrix> full_rank_qr(const Matrix& a) {
  if (a.cols() > a.rows()) {
    throw Error(ErrorCode::RankDeficient,
                "more columns (" + std::to_string(a.cols()) + ") than rows (" +
                    std::to_string(a.rows()) + ")");
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(a.rows(), a.cols());
  qr.setThreshold(kRankTol);
  qr.compute(a);
  if (qr.rank() < a.cols()) {
    throw Error(ErrorCode::RankDeficient,
                "selected columns are linearly dependent (rank " + std::to_string(qr.rank()) +
                    " < " + std::to_string(a.cols()) + ")");
  }
  return qr;
}

}  // namespace

LeastSquaresSolution least_squares(const Matrix& a, const Vector& y) {
  if (a.rows() != y.size()) {
    throw Error(ErrorCode::BadDimensions, "least_squares: A has " + std::to_string(a.rows()) +
                                              " rows but y has length " +
                                              std::to_string(y.size()));
  }
  LeastSquaresSolution out;
  if (a.cols() == 0) {
    out.coeffs = Vector(0);
    out.residual_norm = y.norm();
    return out;
  }
  const auto qr = full_rank_qr(a);
  out.coeffs = qr.solve(y);
  out.residual_norm = (y - a * out.coeffs).norm();
  return out;
}

Matrix Projector::complement() const {
  return Matrix::Identity(matrix.rows(), matrix.cols()) - matrix;
}

Projector projector(const DenseMatrix& phi, std::span<const Index> lambda) {
  check_index_set(lambda, phi.cols(), "projector support");
  Projector p;
  p.basis.assign(lambda.begin(), lambda.end());
  const Index m = phi.rows();
  if (lambda.empty()) {
    p.matrix = Matrix::Zero(m, m);
    return p;
  }
  const auto qr = full_rank_qr(phi.columns(lambda));
  const Index k = static_cast<Index>(lambda.size());
  const Matrix q1 = qr.householderQ() * Matrix::Identity(m, k);
  p.matrix = q1 * q1.transpose();
  return p;
}

Matrix orthogonalized_matrix(const DenseMatrix& phi, std::span<const Index> lambda) {
  if (lambda.empty()) {
    check_index_set(lambda, phi.cols(), "orthogonalization support");
    return phi.eigen();
  }
  const Projector p = projector(phi, lambda);
  return phi.eigen() - p.matrix * phi.eigen();
}

}  // namespace greedylab
