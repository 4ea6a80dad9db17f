#include "gspn/fabric.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "gspn/error.hpp"

namespace gspn {

void FabricParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw NetError(fmt::format("{} must be finite and positive", name));
  };
  positive(lambda, "lambda");
  positive(mu_http, "mu_http");
  positive(mu_endorse, "mu_endorse");
  positive(mu_order, "mu_order");
  positive(mu_commit, "mu_commit");
  positive(mu_net, "mu_net");
  if (batch_n == 0) throw NetError("batch_n must be at least 1");
  if (http_servers == 0) throw NetError("http_servers must be at least 1");
  if (endorsers == 0) throw NetError("endorsers must be at least 1");
  if (orderers == 0) throw NetError("orderers must be at least 1");
}

FabricParams default_params() { return FabricParams{}; }

namespace {

struct UnitSpec {
  std::string suffix;
  double rate;
  std::uint32_t servers;
  std::uint32_t batch;
};

ServiceUnit add_unit(NetBuilder& b, const UnitSpec& spec) {
  ServiceUnit unit;
  unit.wait = b.add_place("P_wait_" + spec.suffix);
  unit.idle = b.add_place("P_idle_" + spec.suffix, spec.servers, /*resource=*/true);
  unit.serve = b.add_place("P_serve_" + spec.suffix);
  unit.admit = b.add_transition("T_in_" + spec.suffix, Immediate{0});
  unit.service = b.add_transition("T_" + spec.suffix, Timed{spec.rate, ServerPolicy::kSingle});
  b.add_arc(unit.wait, unit.admit, spec.batch);
  b.add_arc(unit.idle, unit.admit);
  b.add_arc(unit.admit, unit.serve);
  b.add_arc(unit.serve, unit.service);
  b.add_arc(unit.service, unit.idle);
  b.set_guard(unit.admit, fmt::format("#(P_wait_{0}) {1} {2} && #(P_idle_{0}) > 0", spec.suffix,
                                      spec.batch > 1 ? ">=" : ">", spec.batch > 1 ? spec.batch : 0));
  return unit;
}

}  // namespace

FabricNet build_fabric_net(const FabricParams& params) {
  params.validate();
  NetBuilder b;
  PhaseLabeling labeling;
  for (auto phase : kAllPhases) labeling.layout(phase).phase = phase;

  auto arrivals = b.add_transition("T_arr", Timed{params.lambda, ServerPolicy::kSingle});
  auto http = add_unit(b, {"h", params.mu_http, params.http_servers, 1});
  auto endorse = add_unit(b, {"e", params.mu_endorse, params.endorsers, 1});
  auto order = add_unit(b, {"o", params.mu_order, params.orderers, params.batch_n});
  b.add_arc(arrivals, http.wait);
  b.add_arc(http.service, endorse.wait);
  b.add_arc(endorse.service, order.wait);

  auto join = b.add_transition("T_join", Immediate{0});
  auto& committing = labeling.layout(Phase::kCommitting);
  for (std::uint32_t c = 0; c < kCommitters; ++c) {
    auto unit = add_unit(b, {fmt::format("c{}", c), params.mu_commit, 1, 1});
    auto done = b.add_place(fmt::format("P_done_c{}", c));
    b.add_arc(order.service, unit.wait);
    b.add_arc(unit.service, done);
    b.add_arc(done, join);
    committing.units.push_back(unit);
    committing.other_places.push_back(done);
  }
  committing.other_transitions.push_back(join);

  auto end = b.add_place("P_end");
  auto sink = b.add_place("P_out");
  auto network = b.add_transition("T_n", Timed{params.mu_net, ServerPolicy::kInfinite});
  b.add_arc(join, end, params.batch_n);
  b.add_arc(end, network);
  b.add_arc(network, sink);

  labeling.layout(Phase::kHttp).units.push_back(http);
  labeling.layout(Phase::kHttp).other_transitions.push_back(arrivals);
  labeling.layout(Phase::kEndorsement).units.push_back(endorse);
  labeling.layout(Phase::kOrdering).units.push_back(order);
  auto& response = labeling.layout(Phase::kResponse);
  response.delay = end;
  response.other_places.push_back(sink);
  response.other_transitions.push_back(network);

  return FabricNet{b.freeze(), std::move(labeling)};
}

PhaseLabeling label_fabric_net(const PetriNet& net) {
  PhaseLabeling labeling;
  for (auto phase : kAllPhases) labeling.layout(phase).phase = phase;
  auto unit = [&](const std::string& s) {
    return ServiceUnit{net.place_id("P_wait_" + s), net.place_id("P_serve_" + s), net.place_id("P_idle_" + s),
                       net.transition_id("T_in_" + s), net.transition_id("T_" + s)};
  };
  labeling.layout(Phase::kHttp).units.push_back(unit("h"));
  labeling.layout(Phase::kHttp).other_transitions.push_back(net.transition_id("T_arr"));
  labeling.layout(Phase::kEndorsement).units.push_back(unit("e"));
  labeling.layout(Phase::kOrdering).units.push_back(unit("o"));
  auto& committing = labeling.layout(Phase::kCommitting);
  for (std::uint32_t c = 0; c < kCommitters; ++c) {
    committing.units.push_back(unit(fmt::format("c{}", c)));
    committing.other_places.push_back(net.place_id(fmt::format("P_done_c{}", c)));
  }
  committing.other_transitions.push_back(net.transition_id("T_join"));
  auto& response = labeling.layout(Phase::kResponse);
  response.delay = net.place_id("P_end");
  response.other_places.push_back(net.place_id("P_out"));
  response.other_transitions.push_back(net.transition_id("T_n"));
  return labeling;
}

// ---------------------------------------------------------------------------

namespace {

template <typename T>
void read_field(const nlohmann::json& doc, const char* key, T& field) {
  if (auto it = doc.find(key); it != doc.end()) field = it->get<T>();
}

void read_count(const nlohmann::json& doc, const char* key, std::uint32_t& field) {
  if (auto it = doc.find(key); it != doc.end()) {
    if (!it->is_number_integer() || it->get<std::int64_t>() < 1)
      throw ParseError(fmt::format("'{}' must be a positive integer", key));
    field = it->get<std::uint32_t>();
  }
}

}  // namespace

FabricParams parse_fabric_params(std::string_view text, FabricParams base) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(fmt::format("parameter file is not valid JSON: {}", e.what()));
  }
  if (!doc.is_object()) throw ParseError("parameter file must contain a JSON object");
  try {
    read_field(doc, "lambda", base.lambda);
    read_field(doc, "mu_http", base.mu_http);
    read_field(doc, "mu_endorse", base.mu_endorse);
    read_field(doc, "mu_order", base.mu_order);
    read_field(doc, "mu_commit", base.mu_commit);
    read_field(doc, "mu_net", base.mu_net);
    read_count(doc, "batch_n", base.batch_n);
    read_count(doc, "http_servers", base.http_servers);
    read_count(doc, "endorsers", base.endorsers);
    read_count(doc, "orderers", base.orderers);
  } catch (const nlohmann::json::type_error& e) {
    throw ParseError(fmt::format("malformed parameter file: {}", e.what()));
  }
  return base;
}

std::string serialize_fabric_params(const FabricParams& p) {
  nlohmann::ordered_json doc{{"lambda", p.lambda},       {"mu_http", p.mu_http},
                             {"mu_endorse", p.mu_endorse}, {"mu_order", p.mu_order},
                             {"mu_commit", p.mu_commit}, {"mu_net", p.mu_net},
                             {"batch_n", p.batch_n},     {"http_servers", p.http_servers},
                             {"endorsers", p.endorsers}, {"orderers", p.orderers}};
  return doc.dump(2) + "\n";
}

FabricParams load_fabric_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open parameter file '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_fabric_params(buffer.str());
}

}  // namespace gspn
