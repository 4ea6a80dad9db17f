#pragma once

// Discrete-event execution of a GSPN over simulated time.
//
// Each step first fires enabled immediate transitions (lowest priority
// value, then declaration order) until none is enabled, then draws an
// exponential delay for every enabled timed transition, advances the clock
// to the smallest draw and fires that transition. All delays are redrawn
// after every firing; with exponential delays this is equivalent in law to
// enabling- or age-memory policies.

#include <cstdint>
#include <string>
#include <vector>

#include "gspn/marking.hpp"
#include "gspn/net.hpp"

namespace gspn {

struct SimConfig {
  double horizon = 1000.0;  // seconds of simulated time
  double warmup = 0.0;      // seconds discarded from statistics
  std::uint64_t seed = 1;
  std::uint32_t max_immediate_chain = 10'000;
  // Equal-length observation windows over [warmup, horizon], used for
  // queue-growth (bottleneck) detection.
  std::uint32_t windows = 4;
  // Assign request tags at source transitions and record end-to-end
  // completion times at terminal places.
  bool track_tags = false;

  // Throws SimulationError when inconsistent.
  void validate() const;
};

struct PlaceStats {
  std::uint64_t arrivals = 0;    // tokens deposited inside the window
  std::uint64_t departures = 0;  // tokens removed whose arrival was inside the window
  double sojourn_sum = 0.0;      // seconds, departed tokens only
  double token_integral = 0.0;   // time integral of #(place) over the window, token-seconds
  double residual_sum = 0.0;     // in-window age at horizon of tokens still present
  std::vector<double> window_integrals;  // token_integral split per observation window

  bool operator==(const PlaceStats&) const = default;
};

// End-to-end record of one tagged request reaching a terminal place.
struct Completion {
  RequestTag tag = 0;
  double arrived = 0.0;
  double completed = 0.0;

  bool operator==(const Completion&) const = default;
};

struct SimulationTrace {
  std::vector<std::string> place_names;
  std::vector<std::string> transition_names;
  std::vector<PlaceStats> places;
  std::vector<std::uint64_t> firings;  // per transition, inside the window
  std::vector<std::size_t> final_counts;

  double warmup = 0.0;
  double horizon = 0.0;
  std::uint32_t windows = 1;
  std::uint64_t seed = 0;
  std::string rng = "mt19937_64";
  std::uint64_t total_firings = 0;  // whole run, including warmup
  std::vector<Completion> completions;

  double observation_window() const { return horizon - warmup; }
  double window_length() const { return observation_window() / windows; }

  const PlaceStats& stats(PlaceId place) const { return places.at(place.index); }

  bool operator==(const SimulationTrace&) const = default;
};

SimulationTrace simulate(const PetriNet& net, const SimConfig& config);

// Independent runs with seeds config.seed, config.seed + 1, ... executed
// concurrently; results are in seed order.
std::vector<SimulationTrace> replicate(const PetriNet& net, const SimConfig& config,
                                       std::uint32_t replications);

}  // namespace gspn
