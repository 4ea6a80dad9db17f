#include "gspn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "gspn/error.hpp"

namespace gspn {

namespace {

void check_place(const SimulationTrace& trace, PlaceId place) {
  if (place.index >= trace.places.size())
    throw MetricsError(fmt::format("unknown place id {} in trace", place.index));
}

double window_of(const SimulationTrace& trace) {
  double T = trace.observation_window();
  if (!(T > 0.0)) throw MetricsError("trace observation window must be positive");
  return T;
}

std::optional<double> add(std::optional<double> a, std::optional<double> b) {
  if (!a || !b) return std::nullopt;
  return *a + *b;
}

// Least-squares slope of ys against 0, 1, 2, ...
double slope(std::span<const double> ys) {
  const double n = static_cast<double>(ys.size());
  const double x_mean = (n - 1.0) / 2.0;
  const double y_mean = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    double dx = static_cast<double>(i) - x_mean;
    sxy += dx * (ys[i] - y_mean);
    sxx += dx * dx;
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

BottleneckReport decide(std::vector<PhaseGrowth> evidence, double threshold) {
  BottleneckReport report;
  double best = threshold;
  for (auto& g : evidence) {
    g.slope = slope(g.window_queue);
    if (g.slope > best) {
      best = g.slope;
      report.phase = g.phase;
    }
  }
  report.evidence = std::move(evidence);
  return report;
}

}  // namespace

PlaceMetrics place_metrics(const SimulationTrace& trace, PlaceId place) {
  check_place(trace, place);
  const double T = window_of(trace);
  const auto& s = trace.stats(place);
  PlaceMetrics m;
  if (s.departures == 0) return m;
  const double phi = static_cast<double>(s.departures);
  m.throughput = phi / T;
  const double latency_s = s.sojourn_sum / phi;
  m.latency_ms = latency_s * 1000.0;
  m.queue_length = m.throughput * latency_s;
  return m;
}

double time_average_tokens(const SimulationTrace& trace, PlaceId place) {
  check_place(trace, place);
  return trace.stats(place).token_integral / window_of(trace);
}

PhaseReport phase_report(const SimulationTrace& trace, const PhaseLabeling& labeling, Phase phase) {
  const auto& layout = labeling.layout(phase);
  if (layout.units.empty() && !layout.delay)
    throw MetricsError(fmt::format("phase {} is not present in the net", to_string(phase)));

  PhaseReport report;
  report.phase = phase;
  if (layout.delay) {
    report.delay = place_metrics(trace, *layout.delay);
    report.delta_ms = report.delay->latency_ms;
    return report;
  }

  bool complete = true;
  for (std::size_t i = 0; i < layout.units.size(); ++i) {
    const auto& unit = layout.units[i];
    UnitReport u{place_metrics(trace, unit.wait), place_metrics(trace, unit.serve), std::nullopt};
    u.total_ms = add(u.wait.latency_ms, u.serve.latency_ms);
    report.queue_length = std::max(report.queue_length, u.wait.queue_length);
    if (!u.total_ms) {
      complete = false;
    } else if (!report.limiting_unit || *u.total_ms > *report.units[*report.limiting_unit].total_ms) {
      report.limiting_unit = i;
    }
    report.units.push_back(u);
  }
  if (complete && report.limiting_unit) report.delta_ms = report.units[*report.limiting_unit].total_ms;
  return report;
}

std::optional<double> phase_latency(const SimulationTrace& trace, const PhaseLabeling& labeling, Phase phase) {
  return phase_report(trace, labeling, phase).delta_ms;
}

BottleneckReport bottleneck(const SimulationTrace& trace, const PhaseLabeling& labeling, double threshold) {
  if (trace.windows < 2) throw MetricsError("bottleneck detection needs at least 2 observation windows");
  const double len = trace.window_length();
  std::vector<PhaseGrowth> evidence;
  for (auto phase : kAllPhases) {
    const auto& layout = labeling.layout(phase);
    if (layout.units.empty()) continue;
    PhaseGrowth g{phase, std::vector<double>(trace.windows, 0.0), 0.0};
    for (const auto& unit : layout.units) {
      check_place(trace, unit.wait);
      const auto& w = trace.stats(unit.wait).window_integrals;
      for (std::size_t k = 0; k < trace.windows; ++k) g.window_queue[k] = std::max(g.window_queue[k], w[k] / len);
    }
    evidence.push_back(std::move(g));
  }
  return decide(std::move(evidence), threshold);
}

BottleneckReport bottleneck(std::span<const SimulationTrace> sequence, const PhaseLabeling& labeling,
                            double threshold) {
  if (sequence.size() < 2) throw MetricsError("bottleneck detection needs at least 2 observation windows");
  std::vector<PhaseGrowth> evidence;
  for (auto phase : kAllPhases) {
    const auto& layout = labeling.layout(phase);
    if (layout.units.empty()) continue;
    PhaseGrowth g{phase, {}, 0.0};
    for (const auto& trace : sequence) {
      double q = 0.0;
      for (const auto& unit : layout.units) q = std::max(q, time_average_tokens(trace, unit.wait));
      g.window_queue.push_back(q);
    }
    evidence.push_back(std::move(g));
  }
  return decide(std::move(evidence), threshold);
}

SystemReport system_report(const SimulationTrace& trace, const PhaseLabeling& labeling) {
  SystemReport report;
  std::optional<double> total = 0.0;
  for (auto phase : kAllPhases) {
    report.phases.push_back(phase_report(trace, labeling, phase));
    total = add(total, report.phases.back().delta_ms);
  }
  report.delta_ms = total;
  report.throughput = place_metrics(trace, labeling.end_place()).throughput;
  if (trace.windows >= 2) report.bottleneck = bottleneck(trace, labeling);
  if (!trace.completions.empty()) {
    double sum = 0.0;
    for (const auto& c : trace.completions) sum += c.completed - c.arrived;
    report.end_to_end_ms = 1000.0 * sum / static_cast<double>(trace.completions.size());
  }
  return report;
}

Estimate estimate(std::span<const double> values) {
  Estimate e;
  e.samples = values.size();
  if (values.empty()) return e;
  e.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - e.mean) * (v - e.mean);
    e.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return e;
}

ReplicatedReport summarize(std::span<const SystemReport> reports) {
  ReplicatedReport out;
  out.replications = reports.size();
  if (reports.empty()) return out;

  auto collect = [&](auto&& get) {
    std::vector<double> values;
    for (const auto& r : reports) {
      if (auto v = get(r)) values.push_back(*v);
    }
    return values.empty() ? std::optional<Estimate>{} : std::optional<Estimate>{estimate(values)};
  };

  for (auto phase : kAllPhases) {
    auto i = static_cast<std::size_t>(phase);
    out.delta_ms[i] = collect([&](const SystemReport& r) { return r.phase(phase).delta_ms; });
    out.queue_length[i] =
        *collect([&](const SystemReport& r) { return std::optional<double>(r.phase(phase).queue_length); });
  }
  out.delta_total_ms = collect([](const SystemReport& r) { return r.delta_ms; });
  out.throughput = *collect([](const SystemReport& r) { return std::optional<double>(r.throughput); });

  // Most frequent verdict; ties go to the earlier phase, "stable" last.
  std::map<int, std::size_t> votes;
  for (const auto& r : reports) votes[r.bottleneck.phase ? static_cast<int>(*r.bottleneck.phase) : 99]++;
  auto best = std::max_element(votes.begin(), votes.end(),
                               [](const auto& a, const auto& b) { return a.second < b.second; });
  if (best->first != 99) out.bottleneck = static_cast<Phase>(best->first);
  return out;
}

std::string bottleneck_label(const std::optional<Phase>& phase) {
  return phase ? std::string(to_string(*phase)) : std::string("none");
}

}  // namespace gspn
