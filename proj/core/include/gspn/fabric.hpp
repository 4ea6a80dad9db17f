#pragma once

// GSPN model of the Hyperledger Fabric transaction flow:
//
//   T_arr -> [HTTP unit] -> [endorsement unit] -> [ordering unit, batches N]
//         -> block copied to two committer units -> T_join (waits for both,
//            expands the block back into N request tokens) -> P_end -> T_n
//
// Each unit is a wait place, an immediate admission transition guarded on
// the wait and idle places, a serve place and a timed service transition
// that returns the idle token. T_n is an infinite-server delay.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "gspn/net.hpp"
#include "gspn/phase.hpp"

namespace gspn {

inline constexpr std::uint32_t kCommitters = 2;

struct FabricParams {
  double lambda = 50.0;       // request arrivals per second
  double mu_http = 500.0;     // T_h
  double mu_endorse = 143.0;  // T_e
  double mu_order = 83.0;     // T_o, blocks per second
  double mu_commit = 37.0;    // T_c, blocks per second per committer
  double mu_net = 100.0;      // T_n
  std::uint32_t batch_n = 1;  // transactions per block
  std::uint32_t http_servers = 1;
  std::uint32_t endorsers = 1;
  std::uint32_t orderers = 1;

  // Throws NetError on a non-positive rate or count.
  void validate() const;
  bool operator==(const FabricParams&) const = default;
};

// Measured service latencies (2, 7, 12, 27, 10) ms as rates, N = 1.
FabricParams default_params();

struct FabricNet {
  PetriNet net;
  PhaseLabeling labeling;
};

FabricNet build_fabric_net(const FabricParams& params);

// Recovers the labeling of a net that uses the builder's place and
// transition names (for example one reloaded from a net file).
PhaseLabeling label_fabric_net(const PetriNet& net);

// Parameter documents are JSON objects with the FabricParams field names;
// missing keys keep their defaults, unknown keys are ignored.
FabricParams parse_fabric_params(std::string_view text, FabricParams base = default_params());
std::string serialize_fabric_params(const FabricParams& params);
FabricParams load_fabric_params(const std::filesystem::path& path);

}  // namespace gspn
