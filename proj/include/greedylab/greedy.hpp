#ifndef GREEDYLAB_GREEDY_HPP
#define GREEDYLAB_GREEDY_HPP

#include <optional>
#include <string_view>
#include <vector>

#include "greedylab/linalg.hpp"
#include "greedylab/model.hpp"

namespace greedylab {

/// Loop control for OMP and ROMP: run at most `max_iterations` rounds and stop
/// early once ||r|| <= residual_tol * ||y||.
struct StoppingRule {
  Index max_iterations = 1;
  double residual_tol = 1e-10;

  /// K rounds, matching the K-iteration guarantees for K-sparse signals.
  static StoppingRule for_sparsity(Index k) { return {k, 1e-10}; }

  /// Throws InvalidArgument on a nonpositive iteration cap or negative tolerance.
  void validate() const;
};

enum class Algorithm { Omp, Romp };

std::string_view to_string(Algorithm a);

/// One identify/update round.
struct IterationRecord {
  Index iteration = 0;     // zero-based round number l
  Vector residual;         // r^l, the residual correlated in this round
  Vector match;            // h^l = Phi^T r^l
  IndexSet chosen;         // one index for OMP, Omega_0^l for ROMP (ascending)
  IndexSet support_after;  // Lambda^{l+1}, ascending
  double residual_norm_after = 0.0;
};

struct RecoveryTrace {
  Algorithm algorithm = Algorithm::Omp;
  std::vector<IterationRecord> iterations;
  Vector estimate;  // x-hat, dense length N
  double measurement_norm = 0.0;
  bool converged = false;  // residual criterion met on exit

  Index iterations_run() const { return static_cast<Index>(iterations.size()); }

  /// Lambda^l before round l (empty for l = 0).
  IndexSet support_before(Index l) const;

  /// Indices in the order they entered Lambda.
  IndexSet selection_order() const;

  /// x-hat as a sparse signal (exact zeros dropped).
  SparseSignal estimate_signal() const { return SparseSignal::from_dense(estimate); }
};

/// Raised when the selected columns stop being linearly independent. Carries
/// the trace up to the failing round.
class RecoveryError : public Error {
 public:
  RecoveryError(const Error& cause, RecoveryTrace partial)
      : Error(cause.code(), cause.what()), partial_(std::move(partial)) {}

  const RecoveryTrace& partial() const noexcept { return partial_; }

 private:
  RecoveryTrace partial_;
};

/// Orthogonal Matching Pursuit. Identification takes the largest |h(j)| with
/// ties going to the smallest index; entries already in Lambda and exact zeros
/// are never selected. The loop also ends when nothing selectable remains.
RecoveryTrace omp_recover(const DenseMatrix& phi, const Vector& y, const StoppingRule& stop);

/// Maximal-energy subset of `candidates` among those whose |h| values lie
/// within a factor 2 of each other. Returned ascending.
///
/// Any such set sits inside a band [m, 2m] whose floor m is one of its own
/// magnitudes, so scanning the |candidates| bands finds the optimum. Equal
/// energies go to the band whose floor element has the smallest index.
/// Throws EmptyCandidates for an empty candidate set and InvalidArgument if
/// any candidate has h = 0.
IndexSet regularized_subset(const Vector& h, std::span<const Index> candidates);

/// Membership test for the regularized family: |h(i)| <= 2 |h(j)| for all i, j.
bool is_regularized(const Vector& h, std::span<const Index> subset);

/// The up-to-k indices with the largest nonzero |h|, skipping `excluded`;
/// ties go to the smallest index. Returned ascending.
IndexSet top_k_nonzero(const Vector& h, Index k, std::span<const Index> excluded);

/// Regularized OMP: each round adds regularized_subset(top-K of |h|) to Lambda.
/// Stops on the residual criterion, on reaching |Lambda| >= 2K, or after
/// max_iterations rounds.
RecoveryTrace romp_recover(const DenseMatrix& phi, const Vector& y, Index k,
                           const StoppingRule& stop);

/// Relative coefficient error accepted as exact recovery.
inline constexpr double kExactRecoveryTol = 1e-6;

/// supp(x) inside the final support, off-support entries below tol ||x||,
/// and ||x-hat - x|| <= tol ||x||.
bool exact_recovery(const RecoveryTrace& trace, const SparseSignal& truth,
                    double rel_tol = kExactRecoveryTol);

}  // namespace greedylab

#endif  // GREEDYLAB_GREEDY_HPP
