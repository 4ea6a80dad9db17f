#include "gspn/phase.hpp"

#include <algorithm>

namespace gspn {

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::kHttp: return "HTTP";
    case Phase::kEndorsement: return "Endorsement";
    case Phase::kOrdering: return "Ordering";
    case Phase::kCommitting: return "Committing";
    case Phase::kResponse: return "Response";
  }
  return "?";
}

std::optional<Phase> parse_phase(std::string_view name) {
  for (auto phase : kAllPhases) {
    if (to_string(phase) == name) return phase;
  }
  return std::nullopt;
}

std::optional<Phase> PhaseLabeling::phase_of(PlaceId place) const {
  for (const auto& layout : phases) {
    for (const auto& unit : layout.units) {
      if (unit.wait == place || unit.serve == place || unit.idle == place) return layout.phase;
    }
    if (layout.delay == place) return layout.phase;
    if (std::find(layout.other_places.begin(), layout.other_places.end(), place) != layout.other_places.end())
      return layout.phase;
  }
  return std::nullopt;
}

}  // namespace gspn
