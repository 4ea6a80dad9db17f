#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gspn/error.hpp"
#include "gspn/optimizer.hpp"
#include "oracles.hpp"

namespace gspn {
namespace {

const LatencyFit kMeasuredFit{25.06, 1.57, 1, 10, 0.0};

TEST(EffectiveBatchSize, CountLimitedBranch) { EXPECT_EQ(effective_batch_size(10, 1.0, 20.0), 10u); }

TEST(EffectiveBatchSize, TimeoutLimitedBranch) { EXPECT_EQ(effective_batch_size(5, 0.026, 143.0), 4u); }

TEST(EffectiveBatchSize, BoundaryTakesCount) {
  EXPECT_EQ(effective_batch_size(4, 2.0, 2.0), 4u);  // lambda == n / t
}

TEST(EffectiveBatchSize, SingleMessageBlocks) {
  for (double t : {0.001, 0.5, 30.0})
    for (double lambda : {0.1, 143.0, 5000.0}) EXPECT_EQ(effective_batch_size(1, t, lambda), 1u);
}

TEST(EffectiveBatchSize, RejectsBadInputs) {
  EXPECT_THROW(effective_batch_size(0, 1.0, 1.0), OptimizerError);
  EXPECT_THROW(effective_batch_size(1, 0.0, 1.0), OptimizerError);
  EXPECT_THROW(effective_batch_size(1, 1.0, 0.0), OptimizerError);
}

TEST(EffectiveBatchSize, MonotoneAndBoundedByCount) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::uint32_t> n_d(1, 50);
  std::uniform_real_distribution<double> t_d(0.001, 2.0), l_d(0.1, 500.0);
  for (int i = 0; i < 20000; ++i) {
    auto n = n_d(rng);
    double t = t_d(rng), lambda = l_d(rng);
    auto g = effective_batch_size(n, t, lambda);
    ASSERT_GE(g, 1u);
    ASSERT_LE(g, n);
    ASSERT_LE(g, effective_batch_size(n + 1, t, lambda));
    ASSERT_LE(g, effective_batch_size(n, t * 1.1, lambda));
    ASSERT_LE(g, effective_batch_size(n, t, lambda * 1.1));
  }
}

TEST(FitCommitLatency, ExactLineRecovered) {
  std::vector<LatencySample> samples;
  for (int n = 1; n <= 10; ++n) samples.push_back({double(n), 25.06 + 1.57 * n});
  auto fit = fit_commit_latency(samples);
  EXPECT_NEAR(fit.a, 25.06, 1e-9);
  EXPECT_NEAR(fit.b, 1.57, 1e-9);
  EXPECT_NEAR(fit.residual_rms, 0.0, 1e-9);
  EXPECT_EQ(fit.n_min, 1.0);
  EXPECT_EQ(fit.n_max, 10.0);
}

TEST(FitCommitLatency, TwoPoints) {
  std::vector<LatencySample> samples{{1, 10}, {2, 12}};
  auto fit = fit_commit_latency(samples);
  EXPECT_DOUBLE_EQ(fit.a, 8.0);
  EXPECT_DOUBLE_EQ(fit.b, 2.0);
}

TEST(FitCommitLatency, NoisySamplesAgreeWithNormalEquations) {
  std::mt19937_64 rng(2019);
  std::normal_distribution<double> noise(0.0, 0.5);
  std::vector<LatencySample> samples;
  std::vector<double> xs, ys;
  for (int i = 0; i < 50; ++i) {
    double n = 1 + i % 10;
    double y = 25.06 + 1.57 * n + noise(rng);
    samples.push_back({n, y});
    xs.push_back(n);
    ys.push_back(y);
  }
  auto fit = fit_commit_latency(samples);
  auto [a, b] = oracle::normal_equations_fit(xs, ys);
  EXPECT_NEAR(fit.a, a, 1e-9);
  EXPECT_NEAR(fit.b, b, 1e-9);
  EXPECT_LT(std::abs(fit.a - 25.06), 0.5);
  EXPECT_LT(std::abs(fit.b - 1.57), 0.1);
  EXPECT_GT(fit.residual_rms, 0.2);
  EXPECT_LT(fit.residual_rms, 0.8);
}

TEST(FitCommitLatency, Errors) {
  std::vector<LatencySample> one{{3, 30}};
  EXPECT_THROW(fit_commit_latency(one), OptimizerError);
  std::vector<LatencySample> same_n{{3, 30}, {3, 31}};
  EXPECT_THROW(fit_commit_latency(same_n), OptimizerError);
  std::vector<LatencySample> negative{{1, 30}, {2, -1}};
  EXPECT_THROW(fit_commit_latency(negative), OptimizerError);
  EXPECT_THROW(fit_commit_latency({}), OptimizerError);
}

TEST(MaxThroughput, EndorsementLimited) {
  EXPECT_DOUBLE_EQ(max_throughput(143.0, kMeasuredFit, 5, 0.03), 143.0);
}

TEST(MaxThroughput, SingleTransactionBlocks) {
  EXPECT_NEAR(max_throughput(143.0, kMeasuredFit, 1, 0.03), 1000.0 / 26.63, 1e-9);
  EXPECT_NEAR(max_throughput(143.0, kMeasuredFit, 1, 0.03), 37.5516, 1e-4);
}

TEST(MaxThroughput, TimeoutCanLimit) {
  // Cut-off batch floor(0.026 * 143) + 1 = 4 < 5.
  EXPECT_NEAR(max_throughput(143.0, kMeasuredFit, 5, 0.026), oracle::commit_capacity(25.06, 1.57, 4), 1e-9);
}

TEST(MaxThroughput, VanishingEndorsementRate) {
  EXPECT_LT(max_throughput(1e-9, kMeasuredFit, 5, 1.0), 1e-8);
}

TEST(MaxThroughput, MalformedFit) {
  LatencyFit bad{-10.0, 1.0, 1, 5, 0.0};
  EXPECT_THROW(max_throughput(143.0, bad, 5, 1.0), OptimizerError);
}

TEST(MaxThroughput, MonotoneInCountAndTimeout) {
  for (std::uint32_t n = 1; n < 30; ++n) {
    for (double t = 0.001; t < 0.2; t += 0.0013) {
      double here = max_throughput(143.0, kMeasuredFit, n, t);
      ASSERT_LE(here, max_throughput(143.0, kMeasuredFit, n + 1, t));
      ASSERT_LE(here, max_throughput(143.0, kMeasuredFit, n, t + 0.0013));
    }
  }
}

TEST(MinBatchParams, MeasuredConfiguration) {
  auto r = min_batch_params(143.0, kMeasuredFit);
  EXPECT_EQ(r.theta_max, 143.0);
  EXPECT_EQ(r.n_min, 5u);
  EXPECT_EQ(r.n_min, oracle::enumerate_n_min(25.06, 1.57, 143.0));
  EXPECT_NEAR(r.t_min, 2808.09 / 110895.07, 1e-12);
  EXPECT_NEAR(r.t_min, 0.02532, 1e-5);
  EXPECT_DOUBLE_EQ(r.t_min_rounded, 0.026);
  EXPECT_DOUBLE_EQ(r.t_sufficient, 4.0 / 143.0);
  EXPECT_EQ(r.limiting_phase, "Endorsement");
}

TEST(MinBatchParams, TinyEndorsementRate) {
  auto r = min_batch_params(1.0, kMeasuredFit);
  EXPECT_EQ(r.n_min, 1u);
  EXPECT_EQ(r.t_min, 0.0);
  EXPECT_EQ(r.theta_max, 1.0);
}

TEST(MinBatchParams, FlatCommitLatency) {
  LatencyFit flat{25.0, 0.0, 1, 10, 0.0};
  for (double mu : {10.0, 100.0, 143.0, 400.0}) {
    auto r = min_batch_params(mu, flat);
    EXPECT_EQ(r.n_min, static_cast<std::uint32_t>(std::ceil(25.0 * mu / 1000.0)));
  }
}

TEST(MinBatchParams, ExactIntegerBoundaryIsNotRoundedUp) {
  // a mu / (1000 - b mu) = 2400 / 600 = 4 exactly.
  LatencyFit fit{30.0, 5.0, 1, 10, 0.0};
  auto r = min_batch_params(80.0, fit);
  EXPECT_EQ(r.n_min, 4u);
  EXPECT_EQ(r.n_min, oracle::enumerate_n_min(30.0, 5.0, 80.0));
}

TEST(MinBatchParams, RegimeViolation) {
  EXPECT_THROW(min_batch_params(1000.0 / 1.57, kMeasuredFit), OptimizerError);
  EXPECT_THROW(min_batch_params(700.0, kMeasuredFit), OptimizerError);
  EXPECT_THROW(min_batch_params(0.0, kMeasuredFit), OptimizerError);
}

TEST(MinBatchParams, CountBelowMinimumFallsShort) {
  auto r = min_batch_params(143.0, kMeasuredFit);
  for (std::uint32_t n = 1; n < r.n_min; ++n) EXPECT_LT(max_throughput(143.0, kMeasuredFit, n, 10.0), 143.0);
}

TEST(MinBatchParams, SufficientConfigurationReachesEndorsementRate) {
  for (double mu : {50.0, 100.0, 143.0, 250.0, 400.0}) {
    auto r = min_batch_params(mu, kMeasuredFit);
    ASSERT_EQ(r.n_min, oracle::enumerate_n_min(25.06, 1.57, mu));
    for (std::uint32_t n = r.n_min; n <= r.n_min + 20; ++n) {
      for (int k = 0; k < 25; ++k) {
        double t = r.t_sufficient + 0.004 * k;
        if (t <= 0.0) continue;
        ASSERT_EQ(max_throughput(mu, kMeasuredFit, n, t), mu) << "mu=" << mu << " n=" << n << " t=" << t;
      }
    }
  }
}

TEST(MinBatchParams, ClosedFormTimeoutCanUndershoot) {
  // Between the closed-form bound and the sufficient timeout the cut-off
  // batch is one short of n_min.
  auto r = min_batch_params(143.0, kMeasuredFit);
  ASSERT_LT(r.t_min, r.t_sufficient);
  EXPECT_LT(max_throughput(143.0, kMeasuredFit, r.n_min, r.t_min_rounded), 143.0);
  EXPECT_EQ(max_throughput(143.0, kMeasuredFit, r.n_min, r.t_sufficient), 143.0);
}

}  // namespace
}  // namespace gspn
