#pragma once

// Performance metrics derived from a simulation trace.
//
// Per place, over an observation window of T seconds with phi departures
// and total sojourn S:
//   throughput   theta = phi / T
//   mean latency L     = S / phi          (undefined when phi == 0)
//   queue length Q     = theta * L = S / T
//
// Phase latencies add waiting and service sojourns; parallel units take the
// slowest unit, the response phase is the sojourn in the end place. System
// latency is the sum of the five phase latencies and system throughput is
// the throughput of the end place.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gspn/phase.hpp"
#include "gspn/simulator.hpp"

namespace gspn {

struct PlaceMetrics {
  double throughput = 0.0;            // departures per second
  std::optional<double> latency_ms;   // nullopt: no departures, no data
  double queue_length = 0.0;          // tokens
};

PlaceMetrics place_metrics(const SimulationTrace& trace, PlaceId place);

// Time-average #(place) from the token integral; independent of the
// departure counters.
double time_average_tokens(const SimulationTrace& trace, PlaceId place);

struct UnitReport {
  PlaceMetrics wait;
  PlaceMetrics serve;
  std::optional<double> total_ms;  // wait + serve
};

struct PhaseReport {
  Phase phase = Phase::kHttp;
  std::optional<double> delta_ms;
  std::vector<UnitReport> units;
  std::optional<PlaceMetrics> delay;  // response phase
  // Index into `units` of the unit that sets delta (the slowest one).
  std::optional<std::size_t> limiting_unit;
  // Mean waiting-queue length; the largest over parallel units.
  double queue_length = 0.0;
};

PhaseReport phase_report(const SimulationTrace& trace, const PhaseLabeling& labeling, Phase phase);
std::optional<double> phase_latency(const SimulationTrace& trace, const PhaseLabeling& labeling, Phase phase);

struct PhaseGrowth {
  Phase phase = Phase::kHttp;
  std::vector<double> window_queue;  // mean waiting-queue length per window
  double slope = 0.0;                // tokens per window (least squares)
};

struct BottleneckReport {
  std::optional<Phase> phase;  // nullopt: stable
  std::vector<PhaseGrowth> evidence;
};

inline constexpr double kDefaultGrowthThreshold = 1.0;  // tokens per window

// Flags the phase whose waiting queue grows fastest across the trace's
// observation windows, provided the growth exceeds `threshold`.
BottleneckReport bottleneck(const SimulationTrace& trace, const PhaseLabeling& labeling,
                            double threshold = kDefaultGrowthThreshold);
// Same rule with each successive trace acting as one window.
BottleneckReport bottleneck(std::span<const SimulationTrace> sequence, const PhaseLabeling& labeling,
                            double threshold = kDefaultGrowthThreshold);

struct SystemReport {
  std::vector<PhaseReport> phases;     // in kAllPhases order
  std::optional<double> delta_ms;      // nullopt if any phase lacks data
  double throughput = 0.0;             // requests per second
  BottleneckReport bottleneck;
  // Mean tag-based arrival-to-completion time. Only present when tags were
  // tracked; not the same quantity as delta_ms under batching.
  std::optional<double> end_to_end_ms;

  const PhaseReport& phase(Phase p) const { return phases.at(static_cast<std::size_t>(p)); }
};

SystemReport system_report(const SimulationTrace& trace, const PhaseLabeling& labeling);

// Mean and sample standard deviation over replications.
struct Estimate {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t samples = 0;
};

Estimate estimate(std::span<const double> values);

struct ReplicatedReport {
  std::array<std::optional<Estimate>, 5> delta_ms;  // per phase
  std::optional<Estimate> delta_total_ms;
  Estimate throughput;
  std::array<Estimate, 5> queue_length;             // per phase
  std::optional<Phase> bottleneck;                  // most frequent verdict
  std::size_t replications = 0;
};

// Phase values without data in some replication are averaged over the
// replications that have data.
ReplicatedReport summarize(std::span<const SystemReport> reports);

std::string bottleneck_label(const std::optional<Phase>& phase);

}  // namespace gspn
