#include "greedylab/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace greedylab {

void StoppingRule::validate() const {
  if (max_iterations < 1) {
    throw Error(ErrorCode::InvalidArgument, "max_iterations must be positive");
  }
  if (!(residual_tol >= 0.0) || !std::isfinite(residual_tol)) {
    throw Error(ErrorCode::InvalidArgument, "residual_tol must be a nonnegative number");
  }
}

std::string_view to_string(Algorithm a) { return a == Algorithm::Omp ? "omp" : "romp"; }

IndexSet RecoveryTrace::support_before(Index l) const {
  if (l <= 0) return {};
  return iterations.at(static_cast<std::size_t>(l - 1)).support_after;
}

IndexSet RecoveryTrace::selection_order() const {
  IndexSet out;
  for (const auto& rec : iterations) out.insert(out.end(), rec.chosen.begin(), rec.chosen.end());
  return out;
}

namespace {

bool in_set(std::span<const Index> sorted, Index j) {
  return std::binary_search(sorted.begin(), sorted.end(), j);
}

// Shared match / identify / update loop. `identify` maps (h, Lambda) to the
// indices to add; an empty result ends the run.
template <class Identify>
RecoveryTrace pursue(Algorithm algorithm, const DenseMatrix& phi, const Vector& y,
                     const StoppingRule& stop, Index support_cap, Identify identify) {
  stop.validate();
  if (y.size() != phi.rows()) {
    throw Error(ErrorCode::BadDimensions, "measurement length " + std::to_string(y.size()) +
                                              " does not match M=" + std::to_string(phi.rows()));
  }
  if (!y.allFinite()) throw Error(ErrorCode::NonFinite, "measurement has NaN or Inf");

  RecoveryTrace trace;
  trace.algorithm = algorithm;
  trace.measurement_norm = y.norm();
  trace.estimate = Vector::Zero(phi.cols());
  const double threshold = stop.residual_tol * trace.measurement_norm;

  IndexSet lambda;
  Vector residual = y;
  double residual_norm = trace.measurement_norm;

  for (Index l = 0; l < stop.max_iterations; ++l) {
    if (residual_norm <= threshold) break;
    if (static_cast<Index>(lambda.size()) >= support_cap) break;

    Vector h = phi.eigen().transpose() * residual;
    IndexSet chosen = identify(h, lambda);
    if (chosen.empty()) break;

    IndexSet next;
    std::set_union(lambda.begin(), lambda.end(), chosen.begin(), chosen.end(),
                   std::back_inserter(next));
    const Matrix phi_lambda = phi.columns(next);
    LeastSquaresSolution ls;
    try {
      ls = least_squares(phi_lambda, y);
    } catch (const Error& e) {
      throw RecoveryError(e, trace);
    }
    lambda = std::move(next);
    Vector previous = std::move(residual);
    trace.estimate.setZero();
    for (std::size_t i = 0; i < lambda.size(); ++i) {
      trace.estimate(lambda[i]) = ls.coeffs(static_cast<Index>(i));
    }
    residual = y - phi_lambda * ls.coeffs;
    residual_norm = residual.norm();

    trace.iterations.push_back(
        IterationRecord{l, std::move(previous), std::move(h), std::move(chosen), lambda, residual_norm});
  }
  trace.converged = residual_norm <= threshold;
  return trace;
}

}  // namespace

RecoveryTrace omp_recover(const DenseMatrix& phi, const Vector& y, const StoppingRule& stop) {
  auto identify = [](const Vector& h, const IndexSet& lambda) -> IndexSet {
    Index best = -1;
    double best_abs = 0.0;
    for (Index j = 0; j < h.size(); ++j) {
      if (in_set(lambda, j)) continue;
      const double a = std::abs(h(j));
      if (a > best_abs) {
        best_abs = a;
        best = j;
      }
    }
    if (best < 0) return {};
    return {best};
  };
  return pursue(Algorithm::Omp, phi, y, stop, phi.cols(), identify);
}

IndexSet top_k_nonzero(const Vector& h, Index k, std::span<const Index> excluded) {
  IndexSet sorted_excluded(excluded.begin(), excluded.end());
  std::sort(sorted_excluded.begin(), sorted_excluded.end());
  IndexSet pool;
  for (Index j = 0; j < h.size(); ++j) {
    if (h(j) != 0.0 && !in_set(sorted_excluded, j)) pool.push_back(j);
  }
  const auto take = static_cast<std::size_t>(std::max<Index>(0, std::min<Index>(k, pool.size())));
  std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take), pool.end(),
                    [&h](Index a, Index b) {
                      const double ha = std::abs(h(a)), hb = std::abs(h(b));
                      return ha != hb ? ha > hb : a < b;
                    });
  pool.resize(take);
  std::sort(pool.begin(), pool.end());
  return pool;
}

bool is_regularized(const Vector& h, std::span<const Index> subset) {
  if (subset.empty()) return true;
  double lo = std::abs(h(subset[0])), hi = lo;
  for (Index i : subset) {
    lo = std::min(lo, std::abs(h(i)));
    hi = std::max(hi, std::abs(h(i)));
  }
  return hi <= 2.0 * lo;
}

IndexSet regularized_subset(const Vector& h, std::span<const Index> candidates) {
  if (candidates.empty()) {
    throw Error(ErrorCode::EmptyCandidates, "regularized_subset called with no candidates");
  }
  check_index_set(candidates, h.size(), "candidate set");
  IndexSet omega(candidates.begin(), candidates.end());
  std::sort(omega.begin(), omega.end());
  for (Index i : omega) {
    if (h(i) == 0.0) {
      throw Error(ErrorCode::InvalidArgument,
                  "candidate " + std::to_string(i) + " has zero correlation");
    }
  }

  IndexSet best;
  double best_energy = -1.0;
  for (Index floor_index : omega) {  // ascending, so ties keep the smallest floor
    const double m = std::abs(h(floor_index));
    IndexSet band;
    double energy = 0.0;
    for (Index i : omega) {
      const double a = std::abs(h(i));
      if (a >= m && a <= 2.0 * m) {
        band.push_back(i);
        energy += a * a;
      }
    }
    if (energy > best_energy) {
      best_energy = energy;
      best = std::move(band);
    }
  }
  return best;
}

RecoveryTrace romp_recover(const DenseMatrix& phi, const Vector& y, Index k,
                           const StoppingRule& stop) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "ROMP needs K >= 1");
  auto identify = [k](const Vector& h, const IndexSet& lambda) -> IndexSet {
    const IndexSet omega = top_k_nonzero(h, k, lambda);
    if (omega.empty()) return {};
    return regularized_subset(h, omega);
  };
  return pursue(Algorithm::Romp, phi, y, stop, 2 * k, identify);
}

bool exact_recovery(const RecoveryTrace& trace, const SparseSignal& truth, double rel_tol) {
  if (trace.estimate.size() != truth.dimension()) {
    throw Error(ErrorCode::BadDimensions, "estimate and truth differ in dimension");
  }
  // Every true index must have been selected. Off-support entries only need to
  // be below tol: ROMP can keep extra indices whose least-squares coefficients
  // are at rounding level, and tiny true entries must still count as found.
  const IndexSet empty;
  const IndexSet& lambda = trace.iterations.empty() ? empty : trace.iterations.back().support_after;
  if (!std::includes(lambda.begin(), lambda.end(), truth.support().begin(), truth.support().end())) {
    return false;
  }
  const double floor = rel_tol * truth.norm();
  for (Index j = 0; j < trace.estimate.size(); ++j) {
    if (!truth.contains(j) && std::abs(trace.estimate(j)) > floor) return false;
  }
  return (trace.estimate - truth.to_dense()).norm() <= rel_tol * truth.norm();
}

}  // namespace greedylab
