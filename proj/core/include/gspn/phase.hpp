#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "gspn/net.hpp"

namespace gspn {

enum class Phase { kHttp, kEndorsement, kOrdering, kCommitting, kResponse };

inline constexpr std::array<Phase, 5> kAllPhases = {Phase::kHttp, Phase::kEndorsement, Phase::kOrdering,
                                                    Phase::kCommitting, Phase::kResponse};

std::string_view to_string(Phase phase);
std::optional<Phase> parse_phase(std::string_view name);

// A queue-plus-server processing unit: requests wait in `wait`, are
// admitted by the immediate `admit` transition when an idle token is in
// `idle`, and are held in `serve` until the timed `service` fires.
struct ServiceUnit {
  PlaceId wait;
  PlaceId serve;
  PlaceId idle;
  TransitionId admit;
  TransitionId service;
};

struct PhaseLayout {
  Phase phase = Phase::kHttp;
  // Parallel units; the phase latency is the largest unit latency.
  std::vector<ServiceUnit> units;
  // Pure-delay place whose sojourn is the phase latency (response phase).
  std::optional<PlaceId> delay;
  // Remaining places owned by the phase (join buffers, terminal sink).
  std::vector<PlaceId> other_places;
  std::vector<TransitionId> other_transitions;
};

// Maps every place of a model net to exactly one phase.
struct PhaseLabeling {
  std::array<PhaseLayout, 5> phases;

  const PhaseLayout& layout(Phase phase) const { return phases[static_cast<std::size_t>(phase)]; }
  PhaseLayout& layout(Phase phase) { return phases[static_cast<std::size_t>(phase)]; }

  // Place feeding the system throughput (tokens here are completed requests).
  PlaceId end_place() const { return *layout(Phase::kResponse).delay; }

  std::optional<Phase> phase_of(PlaceId place) const;
};

}  // namespace gspn
