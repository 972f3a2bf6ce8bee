#include <array>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "greedylab/theory.hpp"

namespace greedylab {

namespace {

constexpr Index kSparsity = 2;
constexpr Index kOrder = kSparsity + 1;
constexpr double kCertificateSlack = 1e-9;

struct Candidate {
  DenseMatrix phi;
  SparseSignal x;
};

// Three unit columns with Gram
//   [ 1  c  g ]
//   [ c  1  g ]
//   [ g  g  1 ]
// where columns 0, 1 carry the signal and column 2 is the decoy. With
// x = (a, b, 0) and a ~ b ~ 1 the first match gives |h| ~ 1 + c on the
// support and ~2g on the decoy, so 2g > 1 + c makes OMP pick the decoy.
std::optional<Candidate> family_member(Rng& rng, Index rows) {
  std::uniform_real_distribution<double> corr(-0.6, 0.0);
  std::uniform_real_distribution<double> margin(0.005, 0.06);
  std::uniform_real_distribution<double> wobble(0.0, 0.03);
  std::bernoulli_distribution coin(0.5);

  const double c = corr(rng);
  const double g = 0.5 * (1.0 + c) * (1.0 + margin(rng));
  Matrix gram(3, 3);
  gram << 1.0, c, g, c, 1.0, g, g, g, 1.0;
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) return std::nullopt;

  // Phi0^T Phi0 = gram, then a random rotation into R^rows.
  const Matrix phi0 = llt.matrixU();
  const Matrix q = random_orthogonal(rows, rng);
  Matrix embedded = q.leftCols(3) * phi0;

  // Random column order so the decoy is not always last.
  std::array<Index, 3> order{0, 1, 2};
  std::shuffle(order.begin(), order.end(), rng);
  Matrix phi(rows, 3);
  for (Index j = 0; j < 3; ++j) phi.col(order[static_cast<std::size_t>(j)]) = embedded.col(j);

  const double sign = coin(rng) ? 1.0 : -1.0;
  IndexSet support{order[0], order[1]};
  std::vector<double> values{sign * (1.0 + wobble(rng)), sign * (1.0 + wobble(rng))};
  if (support[0] > support[1]) {
    std::swap(support[0], support[1]);
    std::swap(values[0], values[1]);
  }
  return Candidate{DenseMatrix(std::move(phi)), SparseSignal(3, std::move(support), std::move(values))};
}

// Small Gaussian move on the matrix entries, columns renormalized.
Candidate perturb(const Candidate& base, double scale, Rng& rng) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix a = base.phi.eigen();
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i) a(i, j) += normal(rng);
  a.colwise().normalize();
  return Candidate{DenseMatrix(std::move(a)), base.x};
}

}  // namespace

CounterexampleReplay replay_counterexample(const DenseMatrix& phi, const SparseSignal& x) {
  if (phi.cols() < kOrder || phi.rows() < kOrder) {
    throw Error(ErrorCode::BadDimensions, "counterexample matrix needs at least 3 rows and columns");
  }
  if (x.dimension() != phi.cols() || x.sparsity() != kSparsity) {
    throw Error(ErrorCode::BadDimensions, "counterexample signal must be 2-sparse in R^N");
  }
  CounterexampleReplay out;
  out.certificate = rip_exact(phi, kOrder);
  const Vector y = phi.eigen() * x.to_dense();
  out.trace = omp_recover(phi, y, StoppingRule::for_sparsity(kSparsity));
  out.omp_failed = !exact_recovery(out.trace, x);
  out.first_pick_off_support =
      !out.trace.iterations.empty() && !x.contains(out.trace.iterations.front().chosen.front());
  return out;
}

CounterexampleOutcome counterexample_search(const CounterexampleOptions& options) {
  if (options.rows < kOrder) {
    throw Error(ErrorCode::BadDimensions, "counterexample search needs rows >= 3");
  }
  CounterexampleOutcome outcome;
  Rng rng = make_rng(options.seed, {0x636f756e74ULL});
  const double ceiling = options.delta_ceiling + kCertificateSlack;
  constexpr int kRefineSteps = 40;

  while (outcome.candidates_evaluated < options.budget) {
    auto member = family_member(rng, options.rows);
    ++outcome.candidates_evaluated;
    if (!member) continue;

    Candidate current = std::move(*member);
    CounterexampleReplay replay = replay_counterexample(current.phi, current.x);
    if (!replay.omp_failed) continue;

    double scale = 0.02;
    for (int step = 0;; ++step) {
      if (replay.certificate.delta <= ceiling) {
        outcome.found = Counterexample{current.phi, current.x, replay.certificate, replay.trace};
        return outcome;
      }
      if (step >= kRefineSteps || outcome.candidates_evaluated >= options.budget) break;
      Candidate next = perturb(current, scale, rng);
      ++outcome.candidates_evaluated;
      CounterexampleReplay next_replay = replay_counterexample(next.phi, next.x);
      if (next_replay.omp_failed && next_replay.certificate.delta < replay.certificate.delta) {
        current = std::move(next);
        replay = std::move(next_replay);
      } else {
        scale *= 0.8;
      }
    }
  }
  return outcome;
}

}  // namespace greedylab
