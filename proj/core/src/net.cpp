#include "gspn/net.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "gspn/error.hpp"

namespace gspn {

std::optional<PlaceId> PetriNet::find_place(std::string_view name) const {
  auto it = place_index_.find(std::string(name));
  if (it == place_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<TransitionId> PetriNet::find_transition(std::string_view name) const {
  auto it = transition_index_.find(std::string(name));
  if (it == transition_index_.end()) return std::nullopt;
  return it->second;
}

PlaceId PetriNet::place_id(std::string_view name) const {
  if (auto id = find_place(name)) return *id;
  throw NetError(fmt::format("unknown place '{}'", name));
}

TransitionId PetriNet::transition_id(std::string_view name) const {
  if (auto id = find_transition(name)) return *id;
  throw NetError(fmt::format("unknown transition '{}'", name));
}

// ---------------------------------------------------------------------------

void NetBuilder::check_open() const {
  if (frozen_) throw NetError("net builder already frozen");
}

void NetBuilder::check_place(PlaceId id) const {
  if (id.index >= net_.places_.size()) throw NetError(fmt::format("dangling place id {}", id.index));
}

void NetBuilder::check_transition(TransitionId id) const {
  if (id.index >= net_.transitions_.size())
    throw NetError(fmt::format("dangling transition id {}", id.index));
}

std::optional<PlaceId> NetBuilder::find_place(std::string_view name) const {
  return net_.find_place(name);
}

std::optional<TransitionId> NetBuilder::find_transition(std::string_view name) const {
  return net_.find_transition(name);
}

PlaceId NetBuilder::add_place(std::string name, std::uint32_t initial_tokens, bool resource) {
  check_open();
  if (name.empty()) throw NetError("place name must not be empty");
  if (net_.place_index_.contains(name) || net_.transition_index_.contains(name))
    throw NetError(fmt::format("duplicate name '{}'", name));
  PlaceId id{static_cast<std::uint32_t>(net_.places_.size())};
  net_.place_index_.emplace(name, id);
  net_.places_.push_back(PlaceDef{std::move(name), initial_tokens, resource});
  return id;
}

TransitionId NetBuilder::add_transition(std::string name, TransitionKind kind) {
  check_open();
  if (name.empty()) throw NetError("transition name must not be empty");
  if (net_.place_index_.contains(name) || net_.transition_index_.contains(name))
    throw NetError(fmt::format("duplicate name '{}'", name));
  if (const auto* timed = std::get_if<Timed>(&kind)) {
    if (!(timed->rate > 0.0) || !std::isfinite(timed->rate))
      throw NetError(fmt::format("transition '{}': rate must be finite and positive", name));
  }
  TransitionId id{static_cast<std::uint32_t>(net_.transitions_.size())};
  net_.transition_index_.emplace(name, id);
  net_.transitions_.push_back(TransitionDef{std::move(name), kind, {}, {}, {}, std::nullopt});
  return id;
}

void NetBuilder::add_arc(PlaceId from, TransitionId to, std::uint32_t weight) {
  check_open();
  check_place(from);
  check_transition(to);
  if (weight == 0) throw NetError("arc weight must be at least 1");
  auto& inputs = net_.transitions_[to.index].inputs;
  for (const auto& arc : inputs) {
    if (arc.place == from)
      throw NetError(fmt::format("duplicate arc {} -> {}", net_.places_[from.index].name,
                                 net_.transitions_[to.index].name));
  }
  inputs.push_back(Arc{from, weight});
}

void NetBuilder::add_arc(TransitionId from, PlaceId to, std::uint32_t weight) {
  check_open();
  check_transition(from);
  check_place(to);
  if (weight == 0) throw NetError("arc weight must be at least 1");
  auto& outputs = net_.transitions_[from.index].outputs;
  for (const auto& arc : outputs) {
    if (arc.place == to)
      throw NetError(fmt::format("duplicate arc {} -> {}", net_.transitions_[from.index].name,
                                 net_.places_[to.index].name));
  }
  outputs.push_back(Arc{to, weight});
}

void NetBuilder::add_arc(std::string_view source, std::string_view target, std::uint32_t weight) {
  check_open();
  auto sp = net_.find_place(source);
  auto st = net_.find_transition(source);
  auto tp = net_.find_place(target);
  auto tt = net_.find_transition(target);
  if (!sp && !st) throw NetError(fmt::format("arc source '{}' is not defined", source));
  if (!tp && !tt) throw NetError(fmt::format("arc target '{}' is not defined", target));
  if (sp && tt) return add_arc(*sp, *tt, weight);
  if (st && tp) return add_arc(*st, *tp, weight);
  throw NetError(fmt::format("arc {} -> {} must connect a place and a transition", source, target));
}

void NetBuilder::add_inhibitor_arc(PlaceId place, TransitionId transition, std::uint32_t threshold) {
  check_open();
  check_place(place);
  check_transition(transition);
  if (threshold == 0) throw NetError("inhibitor threshold must be at least 1");
  net_.transitions_[transition.index].inhibitors.push_back(InhibitorArc{place, threshold});
}

void NetBuilder::set_guard(TransitionId transition, Guard guard) {
  check_open();
  check_transition(transition);
  for (const auto& term : guard.terms) check_place(term.place);
  net_.transitions_[transition.index].guard = std::move(guard);
}

void NetBuilder::set_guard(TransitionId transition, std::string_view guard_text) {
  set_guard(transition, parse_guard(guard_text, net_.place_index_));
}

void NetBuilder::set_initial_tokens(PlaceId place, std::uint32_t count) {
  check_open();
  check_place(place);
  net_.places_[place.index].initial_tokens = count;
}

PetriNet NetBuilder::freeze() {
  check_open();
  for (const auto& t : net_.transitions_) {
    // A zero-delay transition with no inputs would fire forever at t = 0.
    if (t.is_immediate() && t.inputs.empty())
      throw NetError(fmt::format("immediate transition '{}' has no input place", t.name));
  }
  net_.consumers_.assign(net_.places_.size(), {});
  for (std::uint32_t i = 0; i < net_.transitions_.size(); ++i) {
    for (const auto& arc : net_.transitions_[i].inputs)
      net_.consumers_[arc.place.index].push_back(TransitionId{i});
  }
  frozen_ = true;
  return std::move(net_);
}

// ---------------------------------------------------------------------------
// Guard text

namespace {

class GuardLexer {
 public:
  explicit GuardLexer(std::string_view text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool done() {
    skip_ws();
    return pos_ >= text_.size();
  }
  bool consume(std::string_view token) {
    skip_ws();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view token) {
    if (!consume(token)) fail(fmt::format("expected '{}'", token));
  }
  std::string_view name_until(char stop) {
    skip_ws();
    auto end = text_.find(stop, pos_);
    if (end == std::string_view::npos) fail(fmt::format("expected '{}'", stop));
    auto name = text_.substr(pos_, end - pos_);
    while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back())))
      name.remove_suffix(1);
    pos_ = end;
    return name;
  }
  std::int64_t integer() {
    skip_ws();
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
    if (ec != std::errc()) fail("expected integer");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return value;
  }
  CompareOp op() {
    // Two-character operators first.
    if (consume(">=")) return CompareOp::kGreaterEqual;
    if (consume("<=")) return CompareOp::kLessEqual;
    if (consume("==")) return CompareOp::kEqual;
    if (consume("!=")) return CompareOp::kNotEqual;
    if (consume(">")) return CompareOp::kGreater;
    if (consume("<")) return CompareOp::kLess;
    fail("expected comparison operator");
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(fmt::format("guard '{}': {} at offset {}", text_, what, pos_));
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Guard parse_guard(std::string_view text, const std::unordered_map<std::string, PlaceId>& places) {
  GuardLexer lex(text);
  Guard guard;
  if (lex.done()) return guard;
  do {
    lex.expect("#(");
    auto name = lex.name_until(')');
    lex.expect(")");
    auto it = places.find(std::string(name));
    if (it == places.end()) lex.fail(fmt::format("unknown place '{}'", name));
    CompareOp op = lex.op();
    std::int64_t value = lex.integer();
    guard.terms.push_back(GuardTerm{it->second, op, value});
  } while (lex.consume("&&"));
  if (!lex.done()) lex.fail("trailing input");
  return guard;
}

Guard parse_guard(std::string_view text, const PetriNet& net) {
  std::unordered_map<std::string, PlaceId> places;
  for (std::uint32_t i = 0; i < net.place_count(); ++i) places.emplace(net.place(PlaceId{i}).name, PlaceId{i});
  return parse_guard(text, places);
}

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::kLess: return "<";
    case CompareOp::kLessEqual: return "<=";
    case CompareOp::kGreater: return ">";
    case CompareOp::kGreaterEqual: return ">=";
    case CompareOp::kEqual: return "==";
    case CompareOp::kNotEqual: return "!=";
  }
  return "?";
}

std::string format_guard(const Guard& guard, const PetriNet& net) {
  std::string out;
  for (std::size_t i = 0; i < guard.terms.size(); ++i) {
    const auto& term = guard.terms[i];
    if (i > 0) out += " && ";
    out += fmt::format("#({}) {} {}", net.place(term.place).name, to_string(term.op), term.value);
  }
  return out;
}

}  // namespace gspn
