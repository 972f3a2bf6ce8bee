#include "greedylab/theory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace greedylab {

BoundCheck BoundCheck::make(std::string name, double lhs, double rhs, double slack,
                            CheckContext context) {
  BoundCheck c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  c.slack = slack;
  c.satisfied = lhs <= rhs + slack;
  c.context = std::move(context);
  return c;
}

double default_slack(double rhs) { return 1e-9 * std::max(1.0, std::abs(rhs)); }

namespace {

CheckContext context_of(const DenseMatrix& m, double delta) {
  CheckContext ctx;
  ctx.rows = m.rows();
  ctx.cols = m.cols();
  ctx.delta = delta;
  return ctx;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::PreconditionViolated, message);
}

void require_dimension(const DenseMatrix& m, const SparseSignal& s, const char* what) {
  if (s.dimension() != m.cols()) {
    throw Error(ErrorCode::BadDimensions, std::string(what) + " has dimension " +
                                              std::to_string(s.dimension()) + ", matrix has " +
                                              std::to_string(m.cols()) + " columns");
  }
}

bool disjoint(std::span<const Index> sorted_a, std::span<const Index> b) {
  return std::none_of(b.begin(), b.end(), [&](Index j) {
    return std::find(sorted_a.begin(), sorted_a.end(), j) != sorted_a.end();
  });
}

void require_unit_delta(double delta) {
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::DeltaOutOfRange, "need 0 <= delta < 1, got " + std::to_string(delta));
  }
}

}  // namespace

Index inner_product_order(const SparseSignal& u, const SparseSignal& v) {
  const Vector du = u.to_dense(), dv = v.to_dense();
  const Index plus = ((du + dv).array() != 0.0).count();
  const Index minus = ((du - dv).array() != 0.0).count();
  return std::max(plus, minus);
}

BoundCheck check_inner_product_lemma(const DenseMatrix& psi, const SparseSignal& u,
                                     const SparseSignal& v, double delta) {
  require_dimension(psi, u, "u");
  require_dimension(psi, v, "v");
  const Vector du = u.to_dense(), dv = v.to_dense();
  const Vector pu = psi.eigen() * du, pv = psi.eigen() * dv;
  const double lhs = std::abs(pu.dot(pv) - du.dot(dv));
  const double rhs = delta * u.norm() * v.norm();
  return BoundCheck::make("ip", lhs, rhs, default_slack(rhs), context_of(psi, delta));
}

BoundCheck check_modified_rip(const DenseMatrix& phi, std::span<const Index> lambda,
                              const SparseSignal& u, Index k, double delta) {
  require_dimension(phi, u, "u");
  check_index_set(lambda, phi.cols(), "Lambda");
  const auto lambda_size = static_cast<Index>(lambda.size());
  require(lambda_size < k, "modified RIP needs |Lambda| < K");
  require(u.sparsity() <= k - lambda_size, "modified RIP needs ||u||_0 <= K - |Lambda|");
  require(disjoint(u.support(), lambda), "modified RIP needs supp(u) disjoint from Lambda");
  const SquaredNormBounds bounds = modified_rip_bounds(delta, k, lambda_size);

  const Matrix a = orthogonalized_matrix(phi, lambda);
  const double image = (a * u.to_dense()).squaredNorm();
  const double energy = u.norm() * u.norm();
  const double lower = bounds.lower * energy;
  const double upper = bounds.upper * energy;
  const double margin = std::max(lower - image, image - upper);

  CheckContext ctx = context_of(phi, delta);
  ctx.note = "norm2=" + std::to_string(image) + " lower=" + std::to_string(lower) +
             " upper=" + std::to_string(upper);
  return BoundCheck::make("prip", margin, 0.0, default_slack(upper), std::move(ctx));
}

std::vector<BoundCheck> check_h_bound(const DenseMatrix& phi, std::span<const Index> lambda,
                                      const SparseSignal& x_tilde, double delta) {
  require_dimension(phi, x_tilde, "x~");
  check_index_set(lambda, phi.cols(), "Lambda");
  require(disjoint(x_tilde.support(), lambda), "h bound needs supp(x~) disjoint from Lambda");
  require_unit_delta(delta);

  const Matrix a = orthogonalized_matrix(phi, lambda);
  const Vector xt = x_tilde.to_dense();
  const Vector h = a.transpose() * (a * xt);
  const double rhs = delta / (1.0 - delta) * x_tilde.norm();

  std::vector<BoundCheck> out;
  for (Index j = 0; j < phi.cols(); ++j) {
    if (std::find(lambda.begin(), lambda.end(), j) != lambda.end()) continue;
    CheckContext ctx = context_of(phi, delta);
    ctx.note = "j=" + std::to_string(j + 1);
    out.push_back(BoundCheck::make("hbound", std::abs(h(j) - xt(j)), rhs, default_slack(rhs),
                                   std::move(ctx)));
  }
  return out;
}

bool identification_guarantee(const SparseSignal& x_tilde, double delta) {
  require_unit_delta(delta);
  return x_tilde.max_abs() > 2.0 * delta / (1.0 - delta) * x_tilde.norm();
}

double theorem1_condition(Index k) {
  if (k < 1) throw Error(ErrorCode::TooSmall, "sparsity K must be >= 1");
  return 1.0 / (3.0 * std::sqrt(static_cast<double>(k)));
}

bool theorem1_threshold_consistent(double delta, Index k) {
  require_unit_delta(delta);
  return 2.0 * delta / (1.0 - delta) < 1.0 / std::sqrt(static_cast<double>(k));
}

BoundCheck infinity_norm_floor(const Vector& u) {
  const Index nnz = (u.array() != 0.0).count();
  if (nnz == 0) throw Error(ErrorCode::ZeroVector, "infinity-norm floor needs u != 0");
  const double lhs = u.norm() / std::sqrt(static_cast<double>(nnz));
  const double rhs = u.lpNorm<Eigen::Infinity>();
  CheckContext ctx;
  ctx.cols = u.size();
  return BoundCheck::make("linf", lhs, rhs, 1e-12 * rhs, std::move(ctx));
}

double theorem2_alpha_threshold(double delta, Index k) {
  if (!(delta >= 0.0 && delta < 1.0 / 3.0)) {
    throw Error(ErrorCode::DeltaOutOfRange,
                "decay threshold needs 0 <= delta < 1/3, got " + std::to_string(delta));
  }
  if (k < 1) throw Error(ErrorCode::TooSmall, "sparsity K must be >= 1");
  const double c = delta / (1.0 - delta);
  return (1.0 + 2.0 * c * std::sqrt(static_cast<double>(k - 1))) / (1.0 - 2.0 * c);
}

bool coherence_condition(double mu, Index k) {
  if (!(mu >= 0.0 && mu <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "coherence must lie in [0, 1]");
  }
  if (k < 1) throw Error(ErrorCode::TooSmall, "sparsity K must be >= 1");
  return mu < 1.0 / static_cast<double>(2 * k - 1);
}

BoundCheck check_prop32(const DenseMatrix& psi, const SparseSignal& x,
                        std::span<const Index> gamma, double delta) {
  require_dimension(psi, x, "x");
  check_index_set(gamma, psi.cols(), "Gamma");
  const Vector dx = x.to_dense();
  const Vector g = psi.eigen().transpose() * (psi.eigen() * dx);
  double sq = 0.0;
  for (Index j : gamma) sq += (g(j) - dx(j)) * (g(j) - dx(j));
  const double lhs = std::sqrt(sq);
  const double rhs = delta * x.norm();
  return BoundCheck::make("prop32", lhs, rhs, default_slack(rhs), context_of(psi, delta));
}

std::pair<IndexSet, BoundCheck> check_lemma37(const Vector& u) {
  const Index k = u.size();
  if (k < 2) throw Error(ErrorCode::TooSmall, "band-energy bound needs K >= 2");
  IndexSet nonzero;
  for (Index i = 0; i < k; ++i)
    if (u(i) != 0.0) nonzero.push_back(i);

  IndexSet gamma;
  double band = 0.0;
  if (!nonzero.empty()) {
    gamma = regularized_subset(u, nonzero);
    for (Index i : gamma) band += u(i) * u(i);
    band = std::sqrt(band);
  }
  const double bound = u.norm() / (2.5 * std::sqrt(std::log2(static_cast<double>(k))));
  CheckContext ctx;
  ctx.cols = k;
  return {gamma, BoundCheck::make("lemma37", bound, band, default_slack(band), std::move(ctx))};
}

double theorem3_condition(Index k) {
  if (k < 2) throw Error(ErrorCode::TooSmall, "ROMP threshold needs K >= 2 (use K = 1 with OMP)");
  return 0.13 / std::sqrt(std::log2(static_cast<double>(k)));
}

std::vector<BoundCheck> check_observations(const DenseMatrix& phi, const Vector& y,
                                           const RecoveryTrace& trace,
                                           const SparseSignal* truth) {
  std::vector<BoundCheck> out;
  const double y_norm = y.norm();
  const double match_scale = std::max(phi.eigen().norm() * y_norm, 1e-300);
  const double col_scale = std::max(phi.column_norms().maxCoeff(), 1.0);
  const double tol_r = kObservationTol * y_norm;
  const double tol_h = kObservationTol * match_scale;

  auto push = [&](const char* name, Index l, double lhs, double rhs) {
    CheckContext ctx = context_of(phi, 0.0);
    ctx.note = "l=" + std::to_string(l);
    out.push_back(BoundCheck::make(name, lhs, rhs, 0.0, std::move(ctx)));
  };

  for (const auto& rec : trace.iterations) {
    const Index l = rec.iteration;
    const IndexSet lambda = trace.support_before(l);
    const Projector p = projector(phi, lambda);
    const Matrix a = phi.eigen() - p.matrix * phi.eigen();

    push("residual_projection", l, (rec.residual - (y - p.matrix * y)).norm(), tol_r);
    push("match_via_orthogonalized_residual", l, (rec.match - a.transpose() * rec.residual).norm(),
         tol_h);
    push("match_via_orthogonalized_measurement", l, (rec.match - a.transpose() * y).norm(), tol_h);

    double on_lambda = 0.0;
    for (Index j : lambda) on_lambda = std::max(on_lambda, std::abs(rec.match(j)));
    push("match_zero_on_support", l, on_lambda, tol_r * col_scale);

    if (trace.algorithm == Algorithm::Omp) {
      push("support_size", l,
           std::abs(static_cast<double>(rec.support_after.size()) - static_cast<double>(l + 1)),
           0.0);
    }
    const bool fresh = std::none_of(rec.chosen.begin(), rec.chosen.end(), [&](Index j) {
      return std::binary_search(lambda.begin(), lambda.end(), j);
    });
    push("no_reselection", l, fresh ? 0.0 : 1.0, 0.0);

    if (truth != nullptr) {
      const Vector x_tilde = truth->without(lambda).to_dense();
      push("residual_factorization", l, (rec.residual - a * x_tilde).norm(), tol_r);
    }
  }

  if (truth != nullptr && !trace.iterations.empty()) {
    const IndexSet& final_support = trace.iterations.back().support_after;
    const bool contained = std::all_of(
        truth->support().begin(), truth->support().end(),
        [&](Index j) { return std::binary_search(final_support.begin(), final_support.end(), j); });
    if (contained) {
      const Index l = trace.iterations_run();
      push("contained_support_exact", l,
           (trace.estimate - truth->to_dense()).norm(), 1e-9 * truth->norm());
      push("contained_support_zero_residual", l, trace.iterations.back().residual_norm_after,
           tol_r);
    }
  }
  return out;
}

std::vector<BoundCheck> check_romp_invariants(const RecoveryTrace& trace, const SparseSignal& x,
                                              Index k) {
  std::vector<BoundCheck> out;
  for (const auto& rec : trace.iterations) {
    const auto hits = std::count_if(rec.chosen.begin(), rec.chosen.end(),
                                    [&](Index j) { return x.contains(j); });
    CheckContext ctx;
    ctx.cols = x.dimension();
    ctx.note = "l=" + std::to_string(rec.iteration);
    out.push_back(BoundCheck::make("romp_success", 0.5 * static_cast<double>(rec.chosen.size()),
                                   static_cast<double>(hits), 0.0, ctx));
    out.push_back(BoundCheck::make("romp_support_cap",
                                   static_cast<double>(rec.support_after.size()),
                                   static_cast<double>(2 * k), 0.0, ctx));
  }
  return out;
}

bool selected_in_magnitude_order(const RecoveryTrace& trace, const SparseSignal& x) {
  const OrderedMagnitudes ordered = ordered_magnitudes(x);
  for (std::size_t j = 0; j + 1 < ordered.sorted.size(); ++j) {
    if (!(ordered.sorted[j] > ordered.sorted[j + 1])) return false;
  }
  return trace.selection_order() == ordered.permutation;
}

}  // namespace greedylab
