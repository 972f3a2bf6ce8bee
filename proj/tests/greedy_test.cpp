#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "greedylab/error.hpp"
#include "greedylab/greedy.hpp"
#include "greedylab/model.hpp"
#include "greedylab/random.hpp"
#include "greedylab/theory.hpp"

namespace greedylab {
namespace {

double energy(const Vector& h, const IndexSet& s) {
  double e = 0.0;
  for (Index i : s) e += h(i) * h(i);
  return e;
}

// Best regularized subset by trying every nonempty subset.
IndexSet brute_force_regularized(const Vector& h, const IndexSet& omega) {
  const std::size_t n = omega.size();
  IndexSet best;
  double best_energy = -1.0;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    IndexSet s;
    double lo = INFINITY, hi = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      if (mask & (1u << b)) {
        s.push_back(omega[b]);
        lo = std::min(lo, std::abs(h(omega[b])));
        hi = std::max(hi, std::abs(h(omega[b])));
      }
    }
    if (hi > 2.0 * lo) continue;
    const double e = energy(h, s);
    if (e > best_energy) {
      best_energy = e;
      best = s;
    }
  }
  return best;
}

TEST(StoppingRule, Validation) {
  EXPECT_NO_THROW(StoppingRule::for_sparsity(3).validate());
  EXPECT_THROW((StoppingRule{0, 1e-10}.validate()), Error);
  EXPECT_THROW((StoppingRule{2, -1.0}.validate()), Error);
}

TEST(Omp, IdentityPicksLargestRemaining) {
  const auto phi = DenseMatrix::identity(8);
  Vector y = Vector::Zero(8);
  y(1) = -0.5;
  y(4) = 3.0;
  y(6) = 1.5;
  const auto trace = omp_recover(phi, y, StoppingRule::for_sparsity(3));
  ASSERT_EQ(trace.iterations_run(), 3);
  EXPECT_EQ(trace.selection_order(), (IndexSet{4, 6, 1}));
  EXPECT_EQ(trace.iterations.back().residual_norm_after, 0.0);
  EXPECT_TRUE(exact_recovery(trace, SparseSignal::from_dense(y)));
  EXPECT_TRUE(trace.converged);
}

TEST(Omp, SingleAtom) {
  const auto phi = normalize_columns(gen_matrix(ensemble::Gaussian{}, 6, 10, 3));
  ASSERT_LT(coherence(phi), 1.0);
  const Vector y = -2.5 * phi.column(7);
  const auto trace = omp_recover(phi, y, StoppingRule{5, 1e-10});
  ASSERT_EQ(trace.iterations_run(), 1);
  EXPECT_EQ(trace.iterations[0].chosen, (IndexSet{7}));
  EXPECT_LE(trace.iterations[0].residual_norm_after, 1e-12);
}

TEST(Omp, TiesGoToSmallestIndex) {
  Vector y = Vector::Zero(4);
  y(2) = 1.0;
  y(3) = -1.0;
  const auto trace = omp_recover(DenseMatrix::identity(4), y, StoppingRule{1, 0.0});
  EXPECT_EQ(trace.iterations[0].chosen, (IndexSet{2}));
}

TEST(Omp, StopsWhenOnlyZerosRemain) {
  Vector y = Vector::Zero(5);
  y(3) = 2.0;
  const auto trace = omp_recover(DenseMatrix::identity(5), y, StoppingRule{4, 0.0});
  EXPECT_EQ(trace.iterations_run(), 1);
}

TEST(Omp, RankDeficientCarriesPartialTrace) {
  const auto phi = gen_matrix(ensemble::Gaussian{}, 2, 4, 9);
  Vector y(2);
  y << 0.7, -1.3;
  try {
    omp_recover(phi, y, StoppingRule{3, 0.0});
    FAIL() << "expected RankDeficient";
  } catch (const RecoveryError& e) {
    EXPECT_EQ(e.code(), ErrorCode::RankDeficient);
    EXPECT_EQ(e.partial().iterations_run(), 2);
  }
}

TEST(Omp, DimensionMismatch) {
  EXPECT_THROW(omp_recover(DenseMatrix::identity(3), Vector::Ones(4), StoppingRule{1, 0}), Error);
}

TEST(Omp, RecoversAllSupportsUnderSmallDelta) {
  const Index k = 2;
  const auto phi = gen_matrix(ensemble::IdentityPerturbed{0.03}, 10, 10, 4);
  ASSERT_LT(rip_exact(phi, k + 1).delta, theorem1_condition(k));
  Rng rng = make_rng(4, {1});
  std::bernoulli_distribution coin(0.5);
  for (const auto& support : all_supports(10, k)) {
    const SparseSignal x(10, support, {coin(rng) ? 1.0 : -1.0, coin(rng) ? 1.0 : -1.0});
    const auto trace = omp_recover(phi, phi.eigen() * x.to_dense(), StoppingRule::for_sparsity(k));
    EXPECT_EQ(trace.iterations_run(), k);
    EXPECT_TRUE(exact_recovery(trace, x));
  }
}

TEST(Omp, NeverReselects) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto phi = gen_matrix(ensemble::Gaussian{}, 20, 40, s);
    const auto x = gen_sparse(40, 6, ValueDistribution::Gaussian, s);
    const auto trace = omp_recover(phi, phi.eigen() * x.to_dense(), StoppingRule{15, 1e-10});
    auto order = trace.selection_order();
    std::sort(order.begin(), order.end());
    EXPECT_EQ(std::adjacent_find(order.begin(), order.end()), order.end());
  }
}

TEST(RegularizedSubset, Examples) {
  Vector h(3);
  h << 4, 3, 1;
  const IndexSet all{0, 1, 2};
  EXPECT_EQ(regularized_subset(h, all), (IndexSet{0, 1}));
  EXPECT_DOUBLE_EQ(energy(h, regularized_subset(h, all)), 25.0);

  Vector flat = Vector::Constant(5, -0.7);
  const IndexSet five{0, 1, 2, 3, 4};
  EXPECT_EQ(regularized_subset(flat, five), five);

  const IndexSet one{2};
  EXPECT_EQ(regularized_subset(h, one), one);
}

TEST(RegularizedSubset, Errors) {
  Vector h(3);
  h << 1, 0, 2;
  try {
    regularized_subset(h, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyCandidates);
  }
  const IndexSet with_zero{0, 1};
  EXPECT_THROW(regularized_subset(h, with_zero), Error);
}

TEST(RegularizedSubset, MatchesBruteForce) {
  Rng rng = make_rng(31);
  std::lognormal_distribution<double> mag(0.0, 0.8);
  std::uniform_int_distribution<Index> size(1, 12);
  for (int t = 0; t < 300; ++t) {
    const Index n = size(rng);
    Vector h(n + 3);
    for (Index i = 0; i < h.size(); ++i) h(i) = (rng() & 1 ? 1.0 : -1.0) * mag(rng);
    IndexSet omega(static_cast<std::size_t>(n));
    std::iota(omega.begin(), omega.end(), Index{2});
    const auto got = regularized_subset(h, omega);
    EXPECT_TRUE(is_regularized(h, got));
    EXPECT_EQ(got, brute_force_regularized(h, omega));
  }
}

TEST(TopK, SkipsZerosAndExcluded) {
  Vector h(6);
  h << 0.5, 0.0, -3.0, 2.0, 2.0, 0.1;
  const IndexSet excluded{3};
  EXPECT_EQ(top_k_nonzero(h, 2, excluded), (IndexSet{2, 4}));
  EXPECT_EQ(top_k_nonzero(h, 10, {}), (IndexSet{0, 2, 3, 4, 5}));
  EXPECT_EQ(top_k_nonzero(h, 2, {}), (IndexSet{2, 3}));
}

TEST(Romp, ReducesToOmpAtK1) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto phi = gen_matrix(ensemble::Gaussian{}, 12, 24, s);
    // generic y, so both rounds allowed under the 2K cap do real work
    const Vector y = phi.eigen() * gen_sparse(24, 5, ValueDistribution::Gaussian, s).to_dense();
    const StoppingRule stop{2, 0.0};
    const auto a = omp_recover(phi, y, stop);
    const auto b = romp_recover(phi, y, 1, stop);
    ASSERT_EQ(a.iterations_run(), b.iterations_run());
    for (Index l = 0; l < a.iterations_run(); ++l) {
      EXPECT_EQ(a.iterations[l].chosen, b.iterations[l].chosen);
      EXPECT_EQ(a.iterations[l].residual_norm_after, b.iterations[l].residual_norm_after);
    }
    EXPECT_EQ(a.estimate, b.estimate);
  }
}

TEST(Romp, IdentityEqualMagnitudesOneRound) {
  Vector y = Vector::Zero(9);
  y(0) = 1;
  y(4) = -1;
  y(7) = 1;
  const auto trace = romp_recover(DenseMatrix::identity(9), y, 3, StoppingRule::for_sparsity(3));
  EXPECT_EQ(trace.iterations_run(), 1);
  EXPECT_TRUE(exact_recovery(trace, SparseSignal::from_dense(y)));
}

TEST(Romp, RecoversAllSupportsUnderSmallDelta) {
  const Index k = 2;
  const auto phi = gen_matrix(ensemble::IdentityPerturbed{0.01}, 8, 8, 2);
  ASSERT_LE(rip_exact(phi, 3 * k).delta, theorem3_condition(k));
  Rng rng = make_rng(2, {5});
  std::normal_distribution<double> g;
  for (const auto& support : all_supports(8, k)) {
    const SparseSignal x(8, support, {g(rng), g(rng)});
    const auto trace =
        romp_recover(phi, phi.eigen() * x.to_dense(), k, StoppingRule::for_sparsity(k));
    EXPECT_LE(trace.iterations_run(), k);
    EXPECT_TRUE(exact_recovery(trace, x));
    for (const auto& c : check_romp_invariants(trace, x, k)) EXPECT_TRUE(c.satisfied) << c.name;
  }
}

TEST(Romp, SupportCap) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto phi = gen_matrix(ensemble::Gaussian{}, 16, 30, s);
    const auto x = gen_sparse(30, 4, ValueDistribution::Gaussian, s);
    const auto trace =
        romp_recover(phi, phi.eigen() * x.to_dense(), 4, StoppingRule{20, 1e-10});
    // the last round may overshoot; no round starts at or above 2K
    for (Index l = 0; l < trace.iterations_run(); ++l) {
      EXPECT_LT(static_cast<Index>(trace.support_before(l).size()), 8);
    }
  }
}

TEST(ExactRecovery, Predicate) {
  RecoveryTrace t;
  t.estimate = Vector::Zero(4);
  t.estimate(1) = 1.0 + 1e-9;
  t.iterations.push_back({0, {}, {}, {1}, {1}, 0.0});
  EXPECT_TRUE(exact_recovery(t, SparseSignal(4, {1}, {1.0})));
  EXPECT_FALSE(exact_recovery(t, SparseSignal(4, {2}, {1.0})));
  t.estimate(3) = 0.5;
  EXPECT_FALSE(exact_recovery(t, SparseSignal(4, {1}, {1.0})));
  EXPECT_THROW(exact_recovery(t, SparseSignal(5, {1}, {1.0})), Error);
}

TEST(ExactRecovery, TinyTrueEntriesAndRoundingLevelExtras) {
  RecoveryTrace t;
  t.estimate = Vector::Zero(5);
  t.estimate(0) = 4e-8;
  t.estimate(2) = -0.5;
  t.estimate(4) = 1e-17;  // extra index kept at rounding level
  t.iterations.push_back({0, {}, {}, {0, 2, 4}, {0, 2, 4}, 0.0});
  EXPECT_TRUE(exact_recovery(t, SparseSignal(5, {0, 2}, {4e-8, -0.5})));

  // same estimate, but index 0 was never selected
  t.iterations.back().support_after = {2, 4};
  t.estimate(0) = 0.0;
  EXPECT_FALSE(exact_recovery(t, SparseSignal(5, {0, 2}, {4e-8, -0.5})));
}

}  // namespace
}  // namespace greedylab
