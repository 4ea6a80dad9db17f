#include "gspn/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "gspn/error.hpp"

namespace gspn {

namespace {

// Values within this relative distance of an integer are treated as that
// integer before ceil/floor, so exact boundaries are not pushed over by
// rounding error.
constexpr double kIntegerSnap = 1e-9;

double snap(double x) {
  double r = std::round(x);
  return std::abs(x - r) <= kIntegerSnap * std::max(1.0, std::abs(x)) ? r : x;
}

}  // namespace

std::uint32_t effective_batch_size(std::uint32_t n, double t, double lambda) {
  if (n == 0) throw OptimizerError("n must be at least 1");
  if (!(t > 0.0)) throw OptimizerError("t must be positive");
  if (!(lambda > 0.0)) throw OptimizerError("lambda must be positive");
  if (lambda >= static_cast<double>(n) / t) return n;
  // lambda < n / t implies t * lambda < n, so the result never exceeds n.
  return static_cast<std::uint32_t>(std::floor(t * lambda)) + 1;
}

double LatencyFit::block_rate(double batch_n) const {
  double h = latency_ms(batch_n);
  if (!(h > 0.0)) throw OptimizerError(fmt::format("commit latency fit is non-positive at N={}", batch_n));
  return 1000.0 / h;
}

LatencyFit fit_commit_latency(std::span<const LatencySample> samples) {
  std::set<double> distinct;
  for (const auto& s : samples) {
    if (!std::isfinite(s.batch_n) || !std::isfinite(s.latency_ms))
      throw OptimizerError("latency samples must be finite");
    if (s.latency_ms < 0.0) throw OptimizerError("latency samples must be non-negative");
    distinct.insert(s.batch_n);
  }
  if (distinct.size() < 2) throw OptimizerError("need >= 2 distinct N");

  const double count = static_cast<double>(samples.size());
  double x_mean = 0.0, y_mean = 0.0;
  for (const auto& s : samples) {
    x_mean += s.batch_n;
    y_mean += s.latency_ms;
  }
  x_mean /= count;
  y_mean /= count;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& s : samples) {
    sxx += (s.batch_n - x_mean) * (s.batch_n - x_mean);
    sxy += (s.batch_n - x_mean) * (s.latency_ms - y_mean);
  }

  LatencyFit fit;
  fit.b = sxy / sxx;
  fit.a = y_mean - fit.b * x_mean;
  fit.n_min = *distinct.begin();
  fit.n_max = *distinct.rbegin();
  double ss = 0.0;
  for (const auto& s : samples) {
    double r = s.latency_ms - fit.latency_ms(s.batch_n);
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / count);
  return fit;
}

double max_throughput(double mu_e, const LatencyFit& fit, std::uint32_t n, double t) {
  if (!(mu_e > 0.0)) throw OptimizerError("mu_e must be positive");
  if (n == 0) throw OptimizerError("n must be at least 1");
  if (!(t > 0.0)) throw OptimizerError("t must be positive");
  const double by_count = static_cast<double>(n) * fit.block_rate(n);
  const double cut = std::floor(snap(t * mu_e)) + 1.0;
  const double by_timeout = cut * fit.block_rate(cut);
  return std::min({mu_e, by_count, by_timeout});
}

OptimizationResult min_batch_params(double mu_e, const LatencyFit& fit) {
  if (!(mu_e > 0.0)) throw OptimizerError("mu_e must be positive");
  if (!(fit.a > 0.0) || fit.b < 0.0) throw OptimizerError("commit latency fit needs a > 0 and b >= 0");
  const double headroom = 1000.0 - fit.b * mu_e;
  if (!(headroom > 1e-9 * 1000.0))
    throw OptimizerError(fmt::format("endorsement rate unreachable for any N: 1000 <= b*mu_e = {}", fit.b * mu_e));

  OptimizationResult result;
  result.theta_max = mu_e;
  const double n_bound = snap(fit.a * mu_e / headroom);
  result.n_min = static_cast<std::uint32_t>(std::max(1.0, std::ceil(n_bound)));

  const double t_bound = ((fit.a + fit.b) * mu_e - 1000.0) / (mu_e * headroom);
  result.t_min = t_bound > 0.0 ? t_bound : 0.0;
  result.t_min_rounded = std::ceil(snap(result.t_min * 1000.0)) / 1000.0;
  result.t_sufficient = static_cast<double>(result.n_min - 1) / mu_e;
  return result;
}

}  // namespace gspn
