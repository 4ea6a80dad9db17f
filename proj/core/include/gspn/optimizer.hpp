#pragma once

// Ordering-service configuration selection.
//
// The committing phase serves blocks of N transactions at f(N) blocks/s,
// with commit latency h(N) = 1000 / f(N) = a + b*N ms, so it sustains
// N * f(N) requests/s. The pipeline throughput is the smallest phase
// throughput; the goal is to pick the ordering limits (n, t) so that the
// endorsement rate mu_e, not committing, is the limit.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gspn {

struct OrderingConfig {
  std::uint32_t n = 1;  // MaxMessageCount
  double t = 1.0;       // BatchTimeout, seconds
};

// Transactions per block when blocks are cut at n messages or after t
// seconds: n if lambda >= n / t, otherwise floor(t * lambda) + 1.
std::uint32_t effective_batch_size(std::uint32_t n, double t, double lambda);

struct LatencySample {
  double batch_n = 0.0;
  double latency_ms = 0.0;
};

// Affine commit-latency model h(N) = a + b*N (ms).
struct LatencyFit {
  double a = 0.0;  // ms
  double b = 0.0;  // ms per transaction
  double n_min = 0.0;
  double n_max = 0.0;
  double residual_rms = 0.0;  // ms

  double latency_ms(double batch_n) const { return a + b * batch_n; }
  // Blocks per second; throws OptimizerError when a + b*N <= 0.
  double block_rate(double batch_n) const;
};

// Ordinary least squares. Needs two distinct N values and non-negative
// latencies.
LatencyFit fit_commit_latency(std::span<const LatencySample> samples);

// min(mu_e, n f(n), g f(g)) with g = floor(t mu_e) + 1: the best
// throughput reachable when arrivals run at the endorsement rate.
double max_throughput(double mu_e, const LatencyFit& fit, std::uint32_t n, double t);

struct OptimizationResult {
  double theta_max = 0.0;     // requests per second
  std::uint32_t n_min = 1;
  double t_min = 0.0;         // seconds, closed form; 0 when any t works
  double t_min_rounded = 0.0; // t_min rounded up to whole milliseconds
  // Smallest t whose cut-off batch floor(t mu_e) + 1 reaches n_min. Can
  // exceed t_min: the closed form bounds t*mu_e + 1, not its floor.
  double t_sufficient = 0.0;
  std::string limiting_phase = "Endorsement";
};

// Closed-form smallest (n, t) reaching theta_max = mu_e:
//   n >= ceil(a mu_e / (1000 - b mu_e))
//   t >= ((a + b) mu_e - 1000) / (mu_e (1000 - b mu_e))
// Throws OptimizerError when 1000 <= b mu_e (no batch size keeps up).
OptimizationResult min_batch_params(double mu_e, const LatencyFit& fit);

}  // namespace gspn
