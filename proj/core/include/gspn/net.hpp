#pragma once

// Generalised stochastic Petri net structure: places, timed and immediate
// transitions, weighted arcs, inhibitor arcs and marking guards.

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace gspn {

struct PlaceId {
  std::uint32_t index = 0;
  auto operator<=>(const PlaceId&) const = default;
};

struct TransitionId {
  std::uint32_t index = 0;
  auto operator<=>(const TransitionId&) const = default;
};

// Single-server: one firing in progress at a time, at `rate`.
// Infinite-server: every enabled instance races independently, so the
// aggregate rate is `rate` times the enabling degree (pure delay stations).
enum class ServerPolicy { kSingle, kInfinite };

struct Timed {
  double rate = 1.0;  // firings per second
  ServerPolicy servers = ServerPolicy::kSingle;
  bool operator==(const Timed&) const = default;
};

struct Immediate {
  std::uint32_t priority = 0;  // lower fires first
  bool operator==(const Immediate&) const = default;
};

using TransitionKind = std::variant<Timed, Immediate>;

struct Arc {
  PlaceId place;
  std::uint32_t weight = 1;
  bool operator==(const Arc&) const = default;
};

struct InhibitorArc {
  PlaceId place;
  std::uint32_t threshold = 1;
  bool operator==(const InhibitorArc&) const = default;
};

enum class CompareOp { kLess, kLessEqual, kGreater, kGreaterEqual, kEqual, kNotEqual };

// One clause `#(place) <op> value`.
struct GuardTerm {
  PlaceId place;
  CompareOp op = CompareOp::kGreater;
  std::int64_t value = 0;
  bool operator==(const GuardTerm&) const = default;
};

// Conjunction of marking comparisons. An empty guard is always true.
struct Guard {
  std::vector<GuardTerm> terms;
  bool operator==(const Guard&) const = default;
};

struct PlaceDef {
  std::string name;
  std::uint32_t initial_tokens = 0;
  // Resource places (idle servers) hold anonymous tokens; request tags are
  // never propagated into them.
  bool resource = false;
  bool operator==(const PlaceDef&) const = default;
};

struct TransitionDef {
  std::string name;
  TransitionKind kind;
  std::vector<Arc> inputs;
  std::vector<Arc> outputs;
  std::vector<InhibitorArc> inhibitors;
  std::optional<Guard> guard;
  bool operator==(const TransitionDef&) const = default;

  bool is_immediate() const { return std::holds_alternative<Immediate>(kind); }
  bool is_source() const { return inputs.empty(); }
};

class NetBuilder;

// Immutable net; produced by NetBuilder::freeze() and safe to share
// between threads.
class PetriNet {
 public:
  PetriNet() = default;

  std::size_t place_count() const { return places_.size(); }
  std::size_t transition_count() const { return transitions_.size(); }

  const PlaceDef& place(PlaceId id) const { return places_.at(id.index); }
  const TransitionDef& transition(TransitionId id) const { return transitions_.at(id.index); }
  std::span<const PlaceDef> places() const { return places_; }
  std::span<const TransitionDef> transitions() const { return transitions_; }

  std::optional<PlaceId> find_place(std::string_view name) const;
  std::optional<TransitionId> find_transition(std::string_view name) const;
  // Throws NetError when the name is unknown.
  PlaceId place_id(std::string_view name) const;
  TransitionId transition_id(std::string_view name) const;

  // Transitions that consume from the place through a normal arc.
  std::span<const TransitionId> consumers(PlaceId id) const { return consumers_.at(id.index); }

  bool operator==(const PetriNet& other) const {
    return places_ == other.places_ && transitions_ == other.transitions_;
  }

 private:
  friend class NetBuilder;

  std::vector<PlaceDef> places_;
  std::vector<TransitionDef> transitions_;
  std::vector<std::vector<TransitionId>> consumers_;
  std::unordered_map<std::string, PlaceId> place_index_;
  std::unordered_map<std::string, TransitionId> transition_index_;
};

class NetBuilder {
 public:
  PlaceId add_place(std::string name, std::uint32_t initial_tokens = 0, bool resource = false);
  TransitionId add_transition(std::string name, TransitionKind kind);

  // Direction is taken from the endpoint types.
  void add_arc(PlaceId from, TransitionId to, std::uint32_t weight = 1);
  void add_arc(TransitionId from, PlaceId to, std::uint32_t weight = 1);
  // Name-based form used by the net-file reader; rejects place->place and
  // transition->transition arcs.
  void add_arc(std::string_view source, std::string_view target, std::uint32_t weight = 1);

  void add_inhibitor_arc(PlaceId place, TransitionId transition, std::uint32_t threshold = 1);
  void set_guard(TransitionId transition, Guard guard);
  // Parses `#(P) >= k && #(Q) > 0` against the places registered so far.
  void set_guard(TransitionId transition, std::string_view guard_text);
  void set_initial_tokens(PlaceId place, std::uint32_t count);

  // Validates and yields the immutable net. The builder is left empty.
  PetriNet freeze();

  std::optional<PlaceId> find_place(std::string_view name) const;
  std::optional<TransitionId> find_transition(std::string_view name) const;

 private:
  void check_open() const;
  void check_place(PlaceId id) const;
  void check_transition(TransitionId id) const;

  PetriNet net_;
  bool frozen_ = false;
};

// Parses the guard grammar: term ( "&&" term )*, term = "#(" name ")" op int.
Guard parse_guard(std::string_view text, const std::unordered_map<std::string, PlaceId>& places);
Guard parse_guard(std::string_view text, const PetriNet& net);
std::string format_guard(const Guard& guard, const PetriNet& net);

std::string_view to_string(CompareOp op);

}  // namespace gspn
