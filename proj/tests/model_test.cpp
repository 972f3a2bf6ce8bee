#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>

#include "greedylab/error.hpp"
#include "greedylab/model.hpp"
#include "greedylab/random.hpp"

namespace greedylab {
namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

DenseMatrix two_columns_at(double inner) {
  Matrix m(2, 2);
  m << 1.0, inner, 0.0, std::sqrt(1.0 - inner * inner);
  return DenseMatrix(m);
}

// Tests the isometry inequality directly on unit 2-sparse vectors
// (cos t, sin t) for each pair of columns and returns the largest
// | ||Phi x||^2 - 1 |.
double grid_delta2(const DenseMatrix& phi, int steps) {
  const double pi = std::acos(-1.0);
  double worst = 0.0;
  for (Index i = 0; i < phi.cols(); ++i) {
    for (Index j = i + 1; j < phi.cols(); ++j) {
      for (int s = 0; s < steps; ++s) {
        const double t = pi * s / steps;
        const Vector v = std::cos(t) * phi.column(i) + std::sin(t) * phi.column(j);
        worst = std::max(worst, std::abs(v.squaredNorm() - 1.0));
      }
    }
  }
  return worst;
}

TEST(SparseSignal, Validation) {
  EXPECT_NO_THROW(SparseSignal(5, {0, 3}, {1.0, -2.0}));
  EXPECT_THROW(SparseSignal(5, {3, 0}, {1.0, -2.0}), Error);
  EXPECT_THROW(SparseSignal(5, {1, 1}, {1.0, -2.0}), Error);
  EXPECT_THROW(SparseSignal(5, {5}, {1.0}), Error);
  EXPECT_THROW(SparseSignal(5, {2}, {0.0}), Error);
  EXPECT_THROW(SparseSignal(5, {2}, {1.0, 2.0}), Error);
}

TEST(SparseSignal, DenseRoundTripAndMasking) {
  Vector d(6);
  d << 0, 2, 0, -1, 0, 0.5;
  const auto x = SparseSignal::from_dense(d);
  EXPECT_EQ(x.support(), (IndexSet{1, 3, 5}));
  EXPECT_EQ(x.to_dense(), d);
  EXPECT_DOUBLE_EQ(x.max_abs(), 2.0);
  EXPECT_DOUBLE_EQ(x.norm(), d.norm());
  const IndexSet lambda{3, 4};
  const auto masked = x.without(lambda);
  EXPECT_EQ(masked.support(), (IndexSet{1, 5}));
  EXPECT_TRUE(x.contains(3));
  EXPECT_FALSE(masked.contains(3));
}

TEST(OrderedMagnitudes, Empty) {
  const auto om = ordered_magnitudes(SparseSignal(4, {}, {}));
  EXPECT_TRUE(om.sorted.empty());
  EXPECT_EQ(om.at(0), 0.0);
}

TEST(OrderedMagnitudes, Example) {
  // indices 2, 5, 9 one-based
  const SparseSignal x(10, {1, 4, 8}, {-3.0, 1.0, 2.0});
  const auto om = ordered_magnitudes(x);
  EXPECT_EQ(om.sorted, (std::vector<double>{3.0, 2.0, 1.0}));
  EXPECT_EQ(om.permutation, (IndexSet{1, 8, 4}));
  EXPECT_EQ(om.at(3), 0.0);
}

TEST(OrderedMagnitudes, TiesByIndex) {
  const SparseSignal x(6, {0, 2, 5}, {1.0, -2.0, 2.0});
  EXPECT_EQ(ordered_magnitudes(x).permutation, (IndexSet{2, 5, 0}));
}

TEST(OrderedMagnitudes, PermutationReconstructs) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto x = gen_sparse(30, 7, ValueDistribution::Gaussian, s);
    const auto om = ordered_magnitudes(x);
    const Vector dense = x.to_dense();
    Vector rebuilt = Vector::Zero(30);
    for (std::size_t p = 0; p < om.sorted.size(); ++p) {
      const Index i = om.permutation[p];
      EXPECT_EQ(std::abs(dense(i)), om.sorted[p]);
      rebuilt(i) = dense(i);
      if (p > 0) EXPECT_GE(om.sorted[p - 1], om.sorted[p]);
    }
    EXPECT_EQ(rebuilt, dense);
  }
}

TEST(GenMatrix, Deterministic) {
  EXPECT_EQ(gen_matrix(ensemble::Gaussian{}, 4, 6, 7), gen_matrix(ensemble::Gaussian{}, 4, 6, 7));
  EXPECT_FALSE(gen_matrix(ensemble::Gaussian{}, 4, 6, 7) ==
               gen_matrix(ensemble::Gaussian{}, 4, 6, 8));
}

TEST(GenMatrix, BernoulliEntries) {
  const auto phi = gen_matrix(ensemble::Bernoulli{}, 8, 20, 3);
  const double a = 1.0 / std::sqrt(8.0);
  int plus = 0;
  for (Index i = 0; i < 8; ++i) {
    for (Index j = 0; j < 20; ++j) {
      EXPECT_TRUE(phi(i, j) == a || phi(i, j) == -a);
      plus += phi(i, j) > 0;
    }
  }
  EXPECT_GT(plus, 40);
  EXPECT_LT(plus, 120);
}

TEST(GenMatrix, IdentityPerturbedZeroIsOrthonormal) {
  const auto phi = gen_matrix(ensemble::IdentityPerturbed{0.0}, 5, 5, 1);
  EXPECT_LE((phi.eigen().transpose() * phi.eigen() - Matrix::Identity(5, 5)).norm(), 1e-12);
  for (Index k = 1; k <= 5; ++k) EXPECT_LE(rip_exact(phi, k).delta, 1e-12);
}

TEST(GenMatrix, IdentityPerturbedUnitColumns) {
  const auto phi = gen_matrix(ensemble::IdentityPerturbed{0.2}, 8, 8, 1);
  for (Index j = 0; j < 8; ++j) EXPECT_NEAR(phi.column(j).norm(), 1.0, 1e-14);
}

TEST(GenMatrix, Guards) {
  EXPECT_THROW(gen_matrix(ensemble::Gaussian{}, 0, 3, 1), Error);
  EXPECT_THROW(gen_matrix(ensemble::IdentityPerturbed{0.1}, 3, 4, 1), Error);
  EXPECT_THROW(gen_matrix(ensemble::IdentityPerturbed{-0.1}, 3, 3, 1), Error);
  EXPECT_THROW(gen_matrix(ensemble::Explicit{Matrix::Ones(2, 2)}, 2, 3, 1), Error);
  Matrix e(2, 3);
  e << 1, 2, 3, 4, 5, 6;
  EXPECT_EQ(gen_matrix(ensemble::Explicit{e}, 2, 3, 1).eigen(), e);
}

TEST(GenSparse, FullSupport) {
  const auto x = gen_sparse(5, 5, ValueDistribution::UnitSigns, 2);
  EXPECT_EQ(x.support(), (IndexSet{0, 1, 2, 3, 4}));
  for (double v : x.values()) EXPECT_EQ(std::abs(v), 1.0);
}

TEST(GenSparse, DeterministicAndGuarded) {
  EXPECT_EQ(gen_sparse(40, 6, ValueDistribution::Gaussian, 9),
            gen_sparse(40, 6, ValueDistribution::Gaussian, 9));
  EXPECT_THROW(gen_sparse(4, 5, ValueDistribution::Gaussian, 1), Error);
  EXPECT_THROW(gen_sparse(4, 0, ValueDistribution::Gaussian, 1), Error);
}

TEST(GenSparse, SupportFrequenciesAreBinomial) {
  constexpr int kDraws = 10000;
  constexpr Index n = 6, k = 2;
  std::vector<int> hits(n, 0);
  Rng rng = make_rng(2024);
  for (int d = 0; d < kDraws; ++d) {
    const auto x = gen_sparse(n, k, ValueDistribution::Gaussian, rng);
    for (Index i : x.support()) ++hits[static_cast<std::size_t>(i)];
  }
  const double p = static_cast<double>(k) / n;
  const double mean = kDraws * p;
  const double sigma = std::sqrt(kDraws * p * (1 - p));
  for (int h : hits) EXPECT_NEAR(h, mean, 3 * sigma);
}

TEST(GenDecaying, RatioHolds) {
  const auto one = gen_decaying(10, 1, 3.0, 1);
  EXPECT_EQ(one.sparsity(), 1);
  for (std::uint64_t s = 0; s < 200; ++s) {
    const double alpha = 1.0 + 0.05 * static_cast<double>(s % 40);
    const Index k = 1 + static_cast<Index>(s % 6);
    const auto x = gen_decaying(16, k, alpha + 0.01, s);
    EXPECT_EQ(x.sparsity(), k);
    EXPECT_GE(min_decay_ratio(x), alpha + 0.01);
    const auto om = ordered_magnitudes(x);
    for (std::size_t j = 1; j < om.sorted.size(); ++j) EXPECT_GE(om.sorted[j - 1], om.sorted[j]);
  }
  const auto x = gen_decaying(12, 3, 2.0, 5);
  const auto om = ordered_magnitudes(x);
  EXPECT_GE(om.sorted[0] / om.sorted[1], 2.0);
  EXPECT_GE(om.sorted[1] / om.sorted[2], 2.0);
  EXPECT_THROW(gen_decaying(12, 3, 1.0, 5), Error);
}

TEST(Coherence, Examples) {
  EXPECT_EQ(coherence(DenseMatrix::identity(4)), 0.0);
  EXPECT_NEAR(coherence(two_columns_at(kInvSqrt2)), kInvSqrt2, 1e-12);
  try {
    coherence(DenseMatrix(Matrix::Ones(3, 3)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ColumnsNotNormalized);
  }
}

TEST(Coherence, MatchesDoubleLoop) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto phi = normalize_columns(gen_matrix(ensemble::Gaussian{}, 10, 20, s));
    double oracle = 0.0;
    for (Index i = 0; i < 20; ++i) {
      for (Index j = 0; j < 20; ++j) {
        if (i == j) continue;
        double dot = 0.0;
        for (Index r = 0; r < 10; ++r) dot += phi(r, i) * phi(r, j);
        oracle = std::max(oracle, std::abs(dot));
      }
    }
    EXPECT_NEAR(coherence(phi), oracle, 1e-14);
  }
}

TEST(Binomial, Values) {
  EXPECT_EQ(binomial(20, 3), 1140u);
  EXPECT_EQ(binomial(5, 0), 1u);
  EXPECT_EQ(binomial(3, 5), 0u);
  EXPECT_EQ(binomial(200, 100), std::numeric_limits<std::uint64_t>::max());
}

TEST(Colex, EnumeratesAllSubsetsInOrder) {
  const auto all = all_supports(5, 3);
  ASSERT_EQ(all.size(), 10u);
  EXPECT_EQ(all.front(), (IndexSet{0, 1, 2}));
  EXPECT_EQ(all[1], (IndexSet{0, 1, 3}));
  EXPECT_EQ(all[2], (IndexSet{0, 2, 3}));
  EXPECT_EQ(all[3], (IndexSet{1, 2, 3}));
  EXPECT_EQ(all.back(), (IndexSet{2, 3, 4}));
}

TEST(RipExact, Orthonormal) {
  const auto r = rip_exact(DenseMatrix::identity(6), 3);
  EXPECT_LE(r.delta, 1e-15);
  EXPECT_EQ(r.mode, RipMode::Exact);
  EXPECT_EQ(r.supports_examined, 20u);
  EXPECT_EQ(r.witness.size(), 3u);
}

TEST(RipExact, TwoColumnsFormula) {
  EXPECT_NEAR(rip_exact(two_columns_at(kInvSqrt2), 2).delta, kInvSqrt2, 1e-12);
}

TEST(RipExact, MatchesGridOracle) {
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto phi = gen_matrix(ensemble::Gaussian{}, 6, 8, 40 + s);
    const double grid = grid_delta2(phi, 1 << 14);
    const double exact = rip_exact(phi, 2).delta;
    EXPECT_GE(exact + 1e-12, grid);
    EXPECT_NEAR(exact, grid, 1e-6);
  }
}

TEST(RipExact, Delta2EqualsCoherenceForUnitColumns) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto phi = normalize_columns(gen_matrix(ensemble::Bernoulli{}, 7, 11, s));
    EXPECT_NEAR(rip_exact(phi, 2).delta, coherence(phi), 1e-10);
  }
}

TEST(RipExact, NondecreasingInOrder) {
  const auto phi = gen_matrix(ensemble::Gaussian{}, 8, 10, 77);
  double prev = 0.0;
  for (Index k = 1; k <= 6; ++k) {
    const double d = rip_exact(phi, k).delta;
    EXPECT_GE(d + 1e-12, prev);
    prev = d;
  }
}

TEST(RipExact, WitnessIsTight) {
  const auto phi = gen_matrix(ensemble::Gaussian{}, 6, 9, 5);
  const auto r = rip_exact(phi, 3);
  const Matrix sub = phi.columns(r.witness);
  Eigen::SelfAdjointEigenSolver<Matrix> es(sub.transpose() * sub);
  const Vector lo = es.eigenvectors().col(0);
  const Vector hi = es.eigenvectors().col(2);
  const double at_lo = 1.0 - (sub * lo).squaredNorm() / lo.squaredNorm();
  const double at_hi = (sub * hi).squaredNorm() / hi.squaredNorm() - 1.0;
  EXPECT_NEAR(std::max(at_lo, at_hi), r.delta, 1e-10);
}

TEST(RipExact, Guards) {
  const auto phi = gen_matrix(ensemble::Gaussian{}, 6, 30, 5);
  try {
    rip_exact(phi, 5, 1000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BudgetExceeded);
  }
  EXPECT_THROW(rip_exact(phi, 0), Error);
  EXPECT_THROW(rip_exact(phi, 7), Error);
}

TEST(RipSampled, ExhaustiveEqualsExact) {
  const auto phi = gen_matrix(ensemble::Gaussian{}, 8, 12, 3);
  const auto exact = rip_exact(phi, 2);
  const auto sampled = rip_sampled(phi, 2, 66, 1);
  EXPECT_EQ(sampled.mode, RipMode::SampledLowerBound);
  EXPECT_EQ(sampled.delta, exact.delta);
  EXPECT_EQ(sampled.witness, exact.witness);
}

TEST(RipSampled, LowerBoundAndMonotone) {
  const auto phi = gen_matrix(ensemble::Gaussian{}, 8, 12, 3);
  const double exact = rip_exact(phi, 2).delta;
  double prev = 0.0;
  for (std::uint64_t t : {1, 5, 20, 50}) {
    const auto r = rip_sampled(phi, 2, t, 17);
    EXPECT_LE(r.delta, exact);
    EXPECT_GE(r.delta, prev);
    EXPECT_EQ(r.supports_examined, t);
    prev = r.delta;
  }
  EXPECT_THROW(rip_sampled(phi, 2, 0, 1), Error);
}

TEST(ModifiedRipBounds, Values) {
  auto b = modified_rip_bounds(0.0, 3, 1);
  EXPECT_EQ(b.lower, 1.0);
  EXPECT_EQ(b.upper, 1.0);
  b = modified_rip_bounds(1.0 / 3.0, 3, 1);
  EXPECT_NEAR(b.lower, 0.5, 1e-15);
  EXPECT_NEAR(b.upper, 4.0 / 3.0, 1e-15);
  b = modified_rip_bounds(0.1, 3, 2);
  EXPECT_NEAR(b.lower, 1.0 - 1.0 / 9.0, 1e-15);
  EXPECT_NEAR(b.upper, 1.1, 1e-15);
  EXPECT_THROW(modified_rip_bounds(1.0, 3, 1), Error);
  EXPECT_THROW(modified_rip_bounds(-0.1, 3, 1), Error);
  EXPECT_THROW(modified_rip_bounds(0.1, 3, 3), Error);
}

}  // namespace
}  // namespace greedylab
