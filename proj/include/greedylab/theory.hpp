#ifndef GREEDYLAB_THEORY_HPP
#define GREEDYLAB_THEORY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "greedylab/greedy.hpp"
#include "greedylab/linalg.hpp"
#include "greedylab/model.hpp"

namespace greedylab {

/// Where a check came from; exported alongside the verdict.
struct CheckContext {
  Index rows = 0;
  Index cols = 0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::string note;
};

/// Verdict for one inequality lhs <= rhs, allowing `slack` for rounding.
struct BoundCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool satisfied = false;
  CheckContext context;

  static BoundCheck make(std::string name, double lhs, double rhs, double slack,
                         CheckContext context = {});
};

/// Absolute slack for an inequality with right-hand side `rhs`:
/// 1e-9 * max(1, |rhs|). Only absorbs floating-point rounding.
double default_slack(double rhs);

/// |<Psi u, Psi v> - <u, v>| <= delta ||u|| ||v||, where delta must be an
/// isometry constant of Psi at order max(||u + v||_0, ||u - v||_0).
BoundCheck check_inner_product_lemma(const DenseMatrix& psi, const SparseSignal& u,
                                     const SparseSignal& v, double delta);

/// Sparsity order the inner-product bound needs for (u, v).
Index inner_product_order(const SparseSignal& u, const SparseSignal& v);

/// (1 - delta/(1-delta)) ||u||^2 <= ||A_Lambda u||^2 <= (1 + delta) ||u||^2
/// with delta = delta_K of Phi. lhs/rhs record the worse of the two margins
/// as a single inequality: lhs = max(lower*||u||^2 - ||Au||^2,
/// ||Au||^2 - upper*||u||^2), rhs = 0.
/// Throws PreconditionViolated if |Lambda| >= K, ||u||_0 > K - |Lambda|, or
/// supp(u) meets Lambda.
BoundCheck check_modified_rip(const DenseMatrix& phi, std::span<const Index> lambda,
                              const SparseSignal& u, Index k, double delta);

/// For h = A_Lambda^T A_Lambda x~, one check per j outside Lambda:
/// |h(j) - x~(j)| <= delta/(1-delta) ||x~||. delta must be an isometry
/// constant of order ||x~||_0 + |Lambda| + 1 and lie in [0, 1).
std::vector<BoundCheck> check_h_bound(const DenseMatrix& phi, std::span<const Index> lambda,
                                      const SparseSignal& x_tilde, double delta);

/// ||x~||_inf > 2 delta / (1 - delta) ||x~||_2: the condition under which the
/// largest |h(j)| lies on supp(x~).
bool identification_guarantee(const SparseSignal& x_tilde, double delta);

/// 1 / (3 sqrt(K)); compare against delta_{K+1}.
double theorem1_condition(Index k);

/// 2 delta / (1 - delta) < 1 / sqrt(K).
bool theorem1_threshold_consistent(double delta, Index k);

/// ||u||_2 / sqrt(||u||_0) <= ||u||_inf. Throws ZeroVector for u = 0.
BoundCheck infinity_norm_floor(const Vector& u);

/// Smallest admissible decay ratio for a (delta, K) pair:
/// (1 + 2 c sqrt(K - 1)) / (1 - 2 c), c = delta / (1 - delta).
/// Throws DeltaOutOfRange unless 0 <= delta < 1/3.
double theorem2_alpha_threshold(double delta, Index k);

/// mu < 1 / (2K - 1).
bool coherence_condition(double mu, Index k);

/// ||(Psi^T Psi x)|_Gamma - x|_Gamma|| <= delta ||x|| with delta an isometry
/// constant of order |supp(x) u Gamma|.
BoundCheck check_prop32(const DenseMatrix& psi, const SparseSignal& x,
                        std::span<const Index> gamma, double delta);

/// Builds the best factor-2 band Gamma of u and checks
/// ||u|_Gamma|| >= ||u|| / (2.5 sqrt(log2 K)) (as rhs <= lhs form: lhs is the
/// bound, rhs the band energy). Throws TooSmall for K < 2.
std::pair<IndexSet, BoundCheck> check_lemma37(const Vector& u);

/// 0.13 / sqrt(log2 K); compare against delta_{3K}. Throws TooSmall for K < 2.
double theorem3_condition(Index k);

// Trace verifiers. Each returns one BoundCheck per (round, property) with
// lhs = observed deviation and rhs = the tolerance.

/// Relative tolerance for the residual and match identities.
inline constexpr double kObservationTol = 1e-10;

/// For every round l of an OMP or ROMP trace:
///  - r^l equals (I - P_{Lambda^l}) y
///  - Phi^T r^l, A^T r^l and A^T y agree (A = A_{Lambda^l})
///  - h^l vanishes on Lambda^l
///  - |Lambda^l| = l (OMP only)
///  - no index is selected twice
/// With `truth` given (noise-free y = Phi x) also r^l = A x~^l.
std::vector<BoundCheck> check_observations(const DenseMatrix& phi, const Vector& y,
                                           const RecoveryTrace& trace,
                                           const SparseSignal* truth = nullptr);

/// |Omega_0^l n supp(x)| >= |Omega_0^l| / 2 and |Lambda^{l+1}| <= 2K for every
/// round of a ROMP trace.
std::vector<BoundCheck> check_romp_invariants(const RecoveryTrace& trace, const SparseSignal& x,
                                              Index k);

/// True if OMP's selection order lists supp(x) by strictly decreasing |x(j)|.
bool selected_in_magnitude_order(const RecoveryTrace& trace, const SparseSignal& x);

// Counterexample search for the K = 2 case.

struct CounterexampleOptions {
  double delta_ceiling = 0.70710678118654752;  // 1/sqrt(2)
  std::uint64_t budget = 2000;                  // candidate evaluations
  std::uint64_t seed = 0;
  Index rows = 3;                               // embedding dimension, >= 3
};

struct Counterexample {
  DenseMatrix phi;
  SparseSignal x;
  RipReport certificate;  // exact delta_3
  RecoveryTrace trace;    // OMP, 2 iterations, on y = Phi x
};

struct CounterexampleOutcome {
  std::optional<Counterexample> found;
  std::uint64_t candidates_evaluated = 0;
};

/// Searches three-column families where two support columns are symmetric and
/// a decoy column correlates with their sum strongly enough to win the first
/// match, then hill-climbs to push delta_3 down. Succeeds once a candidate has
/// delta_3 <= ceiling + 1e-9 and OMP misses supp(x) in two iterations.
CounterexampleOutcome counterexample_search(const CounterexampleOptions& options);

struct CounterexampleReplay {
  RipReport certificate;
  RecoveryTrace trace;
  bool omp_failed = false;
  bool first_pick_off_support = false;
};

/// Runs rip_exact(Phi, 3) and two OMP iterations on y = Phi x.
CounterexampleReplay replay_counterexample(const DenseMatrix& phi, const SparseSignal& x);

}  // namespace greedylab

#endif  // GREEDYLAB_THEORY_HPP
