#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "gspn/net.hpp"

namespace gspn {

using RequestTag = std::uint64_t;

struct Token {
  double created_at = 0.0;  // seconds on the simulation clock
  // Request identifiers carried by this token: one for a request token,
  // the whole batch for a block token, none for resource tokens.
  std::vector<RequestTag> tags;
};

// Per-place FIFO token queues. #(place) is the queue length.
class Marking {
 public:
  Marking() = default;
  explicit Marking(std::size_t places) : queues_(places) {}

  // Initial marking of `net`; every initial token is created at time 0.
  static Marking initial(const PetriNet& net);

  std::size_t place_count() const { return queues_.size(); }
  std::size_t count(PlaceId place) const { return queues_.at(place.index).size(); }
  std::size_t total() const;
  const std::deque<Token>& tokens(PlaceId place) const { return queues_.at(place.index); }

  void push(PlaceId place, Token token) { queues_.at(place.index).push_back(std::move(token)); }
  Token pop(PlaceId place);

  std::vector<std::size_t> counts() const;

 private:
  std::vector<std::deque<Token>> queues_;
};

bool evaluate(const Guard& guard, const Marking& marking);

// True iff every input place holds at least the arc weight, every
// inhibitor place holds fewer tokens than the threshold, and the guard
// (if any) holds.
bool is_enabled(const PetriNet& net, const Marking& marking, TransitionId transition);

// Number of times the transition could fire concurrently in this marking
// (0 when disabled). Source transitions report 1.
std::size_t enabling_degree(const PetriNet& net, const Marking& marking, TransitionId transition);

// Callbacks the simulator uses to account for token movement.
class FireObserver {
 public:
  virtual ~FireObserver() = default;
  virtual void on_consume(PlaceId place, const Token& token, double now) = 0;
  virtual void on_produce(PlaceId place, const Token& token, double now) = 0;
  // Fresh tag for a token produced by a source transition, or nullopt when
  // tags are not tracked.
  virtual std::optional<RequestTag> next_tag() { return std::nullopt; }
};

// Fires `transition` in place. Consumes the oldest `weight` tokens of every
// input place and appends `weight` fresh tokens (created_at = now) to every
// output place. Asserts that the transition is enabled.
void fire_in_place(const PetriNet& net, Marking& marking, TransitionId transition, double now,
                   FireObserver* observer = nullptr);

// Value form of fire_in_place().
Marking fire(const PetriNet& net, const Marking& marking, TransitionId transition, double now);

}  // namespace gspn
