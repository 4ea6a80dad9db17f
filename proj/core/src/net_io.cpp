#include "gspn/net_io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "gspn/error.hpp"

namespace gspn {

using nlohmann::ordered_json;

std::string serialize_net(const PetriNet& net) {
  ordered_json doc;
  doc["places"] = ordered_json::array();
  for (const auto& p : net.places()) {
    ordered_json jp;
    jp["name"] = p.name;
    jp["initial"] = p.initial_tokens;
    if (p.resource) jp["resource"] = true;
    doc["places"].push_back(std::move(jp));
  }

  doc["transitions"] = ordered_json::array();
  doc["arcs"] = ordered_json::array();
  for (const auto& t : net.transitions()) {
    ordered_json jt;
    jt["name"] = t.name;
    if (const auto* timed = std::get_if<Timed>(&t.kind)) {
      jt["kind"] = "timed";
      jt["rate"] = timed->rate;
      jt["servers"] = timed->servers == ServerPolicy::kInfinite ? "infinite" : "single";
    } else {
      jt["kind"] = "immediate";
      jt["priority"] = std::get<Immediate>(t.kind).priority;
    }
    if (t.guard) jt["guard"] = format_guard(*t.guard, net);
    doc["transitions"].push_back(std::move(jt));

    for (const auto& arc : t.inputs) {
      doc["arcs"].push_back(
          {{"source", net.place(arc.place).name}, {"target", t.name}, {"weight", arc.weight}, {"kind", "normal"}});
    }
    for (const auto& arc : t.outputs) {
      doc["arcs"].push_back(
          {{"source", t.name}, {"target", net.place(arc.place).name}, {"weight", arc.weight}, {"kind", "normal"}});
    }
    for (const auto& inh : t.inhibitors) {
      doc["arcs"].push_back({{"source", net.place(inh.place).name},
                             {"target", t.name},
                             {"weight", inh.threshold},
                             {"kind", "inhibitor"}});
    }
  }
  return doc.dump(2) + "\n";
}

namespace {

template <typename T>
T get_or(const ordered_json& obj, const char* key, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  return it->get<T>();
}

std::uint32_t get_count(const ordered_json& obj, const char* key, std::uint32_t fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer() || it->get<std::int64_t>() < 0)
    throw ParseError(fmt::format("'{}' must be a non-negative integer", key));
  return it->get<std::uint32_t>();
}

}  // namespace

PetriNet parse_net(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(fmt::format("net file is not valid JSON: {}", e.what()));
  }
  if (!doc.is_object()) throw ParseError("net file must contain a JSON object");

  try {
    NetBuilder builder;
    for (const auto& jp : doc.value("places", ordered_json::array())) {
      builder.add_place(jp.at("name").get<std::string>(), get_count(jp, "initial", 0),
                        get_or(jp, "resource", false));
    }

    std::vector<std::pair<TransitionId, std::string>> guards;
    for (const auto& jt : doc.value("transitions", ordered_json::array())) {
      auto name = jt.at("name").get<std::string>();
      auto kind = jt.at("kind").get<std::string>();
      TransitionId id;
      if (kind == "timed") {
        auto servers = get_or<std::string>(jt, "servers", "single");
        if (servers != "single" && servers != "infinite")
          throw ParseError(fmt::format("transition '{}': unknown servers '{}'", name, servers));
        id = builder.add_transition(
            name, Timed{jt.at("rate").get<double>(),
                        servers == "infinite" ? ServerPolicy::kInfinite : ServerPolicy::kSingle});
      } else if (kind == "immediate") {
        id = builder.add_transition(name, Immediate{get_count(jt, "priority", 0)});
      } else {
        throw ParseError(fmt::format("transition '{}': unknown kind '{}'", name, kind));
      }
      if (jt.contains("guard")) guards.emplace_back(id, jt["guard"].get<std::string>());
    }
    for (const auto& [id, text] : guards) builder.set_guard(id, text);

    for (const auto& ja : doc.value("arcs", ordered_json::array())) {
      auto source = ja.at("source").get<std::string>();
      auto target = ja.at("target").get<std::string>();
      auto weight = get_count(ja, "weight", 1);
      auto kind = get_or<std::string>(ja, "kind", "normal");
      if (kind == "normal") {
        builder.add_arc(source, target, weight);
      } else if (kind == "inhibitor") {
        auto place = builder.find_place(source);
        auto transition = builder.find_transition(target);
        if (!place || !transition)
          throw NetError(fmt::format("inhibitor arc {} -> {} must run from a place to a transition", source, target));
        builder.add_inhibitor_arc(*place, *transition, weight);
      } else {
        throw ParseError(fmt::format("arc {} -> {}: unknown kind '{}'", source, target, kind));
      }
    }
    return builder.freeze();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("malformed net file: {}", e.what()));
  }
}

PetriNet load_net(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open net file '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_net(buffer.str());
}

void save_net(const PetriNet& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(fmt::format("cannot write net file '{}'", path.string()));
  out << serialize_net(net);
}

}  // namespace gspn
