#pragma once

// Net-definition documents (JSON):
//
//   {
//     "places":      [ {"name": "P_wait", "initial": 0, "resource": false}, ... ],
//     "transitions": [ {"name": "T_arr", "kind": "timed", "rate": 50.0, "servers": "single"},
//                      {"name": "T_in", "kind": "immediate", "priority": 0,
//                       "guard": "#(P_wait) > 0 && #(P_idle) > 0"}, ... ],
//     "arcs":        [ {"source": "P_wait", "target": "T_in", "weight": 1, "kind": "normal"},
//                      {"source": "P_busy", "target": "T_x", "weight": 1, "kind": "inhibitor"}, ... ]
//   }
//
// Optional keys: "initial" (0), "resource" (false), "servers" ("single"),
// "priority" (0), "guard" (none), "weight" (1), "kind" on arcs ("normal").

#include <filesystem>
#include <string>
#include <string_view>

#include "gspn/net.hpp"

namespace gspn {

std::string serialize_net(const PetriNet& net);
PetriNet parse_net(std::string_view text);

PetriNet load_net(const std::filesystem::path& path);
void save_net(const PetriNet& net, const std::filesystem::path& path);

}  // namespace gspn
