#include "gspn/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include <fmt/format.h>

#include "gspn/error.hpp"
#include "gspn/rng.hpp"

namespace gspn {

void SimConfig::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw SimulationError("horizon must be positive");
  if (!(warmup >= 0.0)) throw SimulationError("warmup must be non-negative");
  if (!(warmup < horizon)) throw SimulationError("warmup must be shorter than the horizon");
  if (max_immediate_chain == 0) throw SimulationError("max_immediate_chain must be positive");
  if (windows == 0) throw SimulationError("windows must be positive");
}

namespace {

// Accumulates PlaceStats from token movements reported by fire().
class TraceRecorder final : public FireObserver {
 public:
  TraceRecorder(const PetriNet& net, const SimConfig& config, SimulationTrace& trace)
      : net_(net), config_(config), trace_(trace), counts_(net.place_count(), 0),
        last_change_(net.place_count(), 0.0) {
    trace_.places.assign(net.place_count(), PlaceStats{});
    for (auto& s : trace_.places) s.window_integrals.assign(config.windows, 0.0);
    window_length_ = (config.horizon - config.warmup) / config.windows;
  }

  void on_consume(PlaceId place, const Token& token, double now) override {
    integrate(place, now);
    --counts_[place.index];
    if (token.created_at >= config_.warmup) {
      auto& s = trace_.places[place.index];
      ++s.departures;
      s.sojourn_sum += now - token.created_at;
    }
  }

  void on_produce(PlaceId place, const Token& token, double now) override {
    integrate(place, now);
    ++counts_[place.index];
    if (now >= config_.warmup) ++trace_.places[place.index].arrivals;
    if (config_.track_tags && !token.tags.empty() && net_.consumers(place).empty()) {
      for (auto tag : token.tags) {
        double arrived = births_.at(tag);
        if (arrived >= config_.warmup) trace_.completions.push_back(Completion{tag, arrived, now});
      }
    }
  }

  std::optional<RequestTag> next_tag() override {
    if (!config_.track_tags) return std::nullopt;
    births_.push_back(now_);
    return births_.size() - 1;
  }

  void set_clock(double now) { now_ = now; }

  void finish(const Marking& marking) {
    for (std::uint32_t i = 0; i < net_.place_count(); ++i) {
      PlaceId id{i};
      integrate(id, config_.horizon);
      auto& s = trace_.places[i];
      for (const auto& token : marking.tokens(id)) {
        if (token.created_at >= config_.warmup) s.residual_sum += config_.horizon - token.created_at;
      }
    }
  }

 private:
  // Adds #(place) * dt for [last_change, now] clipped to the observation
  // window, split across the equal sub-windows.
  void integrate(PlaceId place, double now) {
    double from = std::max(last_change_[place.index], config_.warmup);
    double to = std::min(now, config_.horizon);
    last_change_[place.index] = now;
    const auto count = counts_[place.index];
    if (count == 0 || !(to > from)) return;
    auto& s = trace_.places[place.index];
    s.token_integral += static_cast<double>(count) * (to - from);

    const auto last_window = static_cast<std::int64_t>(config_.windows) - 1;
    auto window_of = [&](double t) {
      auto k = static_cast<std::int64_t>((t - config_.warmup) / window_length_);
      return std::clamp<std::int64_t>(k, 0, last_window);
    };
    for (auto k = window_of(from); k <= window_of(to); ++k) {
      double lo = std::max(from, config_.warmup + static_cast<double>(k) * window_length_);
      double hi = k == last_window ? to : std::min(to, config_.warmup + static_cast<double>(k + 1) * window_length_);
      if (hi > lo) s.window_integrals[static_cast<std::size_t>(k)] += static_cast<double>(count) * (hi - lo);
    }
  }

  const PetriNet& net_;
  const SimConfig& config_;
  SimulationTrace& trace_;
  std::vector<std::size_t> counts_;
  std::vector<double> last_change_;
  std::vector<double> births_;
  double window_length_ = 0.0;
  double now_ = 0.0;
};

[[noreturn]] void throw_livelock(const PetriNet& net, const std::vector<std::uint64_t>& chain_counts,
                                 double now) {
  std::vector<std::pair<std::uint64_t, std::string>> fired;
  for (std::size_t i = 0; i < chain_counts.size(); ++i) {
    if (chain_counts[i] > 0) fired.emplace_back(chain_counts[i], net.transition(TransitionId{static_cast<std::uint32_t>(i)}).name);
  }
  std::stable_sort(fired.begin(), fired.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::string> names;
  std::string joined;
  for (const auto& [count, name] : fired) {
    if (!joined.empty()) joined += ", ";
    joined += name;
    names.push_back(name);
  }
  throw LivelockError(fmt::format("immediate transitions livelock at t={}: {}", now, joined), std::move(names));
}

}  // namespace

SimulationTrace simulate(const PetriNet& net, const SimConfig& config) {
  config.validate();

  SimulationTrace trace;
  trace.warmup = config.warmup;
  trace.horizon = config.horizon;
  trace.windows = config.windows;
  trace.seed = config.seed;
  trace.rng = ExponentialStream::kEngineName;
  for (const auto& p : net.places()) trace.place_names.push_back(p.name);
  for (const auto& t : net.transitions()) trace.transition_names.push_back(t.name);
  trace.firings.assign(net.transition_count(), 0);

  std::vector<TransitionId> immediates;
  std::vector<TransitionId> timed;
  for (std::uint32_t i = 0; i < net.transition_count(); ++i) {
    (net.transition(TransitionId{i}).is_immediate() ? immediates : timed).push_back(TransitionId{i});
  }
  std::stable_sort(immediates.begin(), immediates.end(), [&](TransitionId a, TransitionId b) {
    return std::get<Immediate>(net.transition(a).kind).priority <
           std::get<Immediate>(net.transition(b).kind).priority;
  });

  TraceRecorder recorder(net, config, trace);
  ExponentialStream rng(config.seed);
  Marking marking(net.place_count());
  for (std::uint32_t i = 0; i < net.place_count(); ++i) {
    for (std::uint32_t k = 0; k < net.place(PlaceId{i}).initial_tokens; ++k) {
      Token token{};
      recorder.on_produce(PlaceId{i}, token, 0.0);
      marking.push(PlaceId{i}, std::move(token));
    }
  }

  auto record_firing = [&](TransitionId t, double now) {
    ++trace.total_firings;
    if (now >= config.warmup) ++trace.firings[t.index];
  };

  std::vector<std::uint64_t> chain_counts(net.transition_count(), 0);
  double clock = 0.0;
  while (true) {
    // Vanishing markings: drain immediate transitions at the current instant.
    std::uint32_t chain = 0;
    std::fill(chain_counts.begin(), chain_counts.end(), 0);
    while (true) {
      auto it = std::find_if(immediates.begin(), immediates.end(),
                             [&](TransitionId t) { return is_enabled(net, marking, t); });
      if (it == immediates.end()) break;
      if (++chain > config.max_immediate_chain) throw_livelock(net, chain_counts, clock);
      ++chain_counts[it->index];
      fire_in_place(net, marking, *it, clock, &recorder);
      record_firing(*it, clock);
    }

    // Race between enabled timed transitions.
    double best_delay = std::numeric_limits<double>::infinity();
    std::optional<TransitionId> winner;
    for (auto t : timed) {
      auto degree = enabling_degree(net, marking, t);
      if (degree == 0) continue;
      const auto& kind = std::get<Timed>(net.transition(t).kind);
      double rate = kind.servers == ServerPolicy::kInfinite ? kind.rate * static_cast<double>(degree) : kind.rate;
      double delay = rng.exponential(rate);
      if (delay < best_delay) {
        best_delay = delay;
        winner = t;
      }
    }
    if (!winner) break;
    double next = clock + best_delay;
    if (next > config.horizon) break;
    clock = next;
    recorder.set_clock(clock);
    fire_in_place(net, marking, *winner, clock, &recorder);
    record_firing(*winner, clock);
  }

  recorder.finish(marking);
  trace.final_counts = marking.counts();
  return trace;
}

std::vector<SimulationTrace> replicate(const PetriNet& net, const SimConfig& config,
                                       std::uint32_t replications) {
  if (replications == 0) throw SimulationError("replications must be at least 1");
  config.validate();

  std::vector<SimulationTrace> traces(replications);
  std::vector<std::exception_ptr> errors(replications);
  std::atomic<std::uint32_t> next{0};
  auto worker = [&] {
    for (auto i = next++; i < replications; i = next++) {
      try {
        SimConfig run = config;
        run.seed = config.seed + i;
        traces[i] = simulate(net, run);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  auto workers = std::min<std::uint32_t>(replications, std::max(1u, std::thread::hardware_concurrency()));
  {
    std::vector<std::jthread> pool;
    for (std::uint32_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return traces;
}

}  // namespace gspn
