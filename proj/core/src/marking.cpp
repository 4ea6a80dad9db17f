#include "gspn/marking.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "gspn/error.hpp"

namespace gspn {

Marking Marking::initial(const PetriNet& net) {
  Marking m(net.place_count());
  for (std::uint32_t i = 0; i < net.place_count(); ++i) {
    for (std::uint32_t k = 0; k < net.place(PlaceId{i}).initial_tokens; ++k) m.push(PlaceId{i}, Token{});
  }
  return m;
}

std::size_t Marking::total() const {
  return std::accumulate(queues_.begin(), queues_.end(), std::size_t{0},
                         [](std::size_t acc, const auto& q) { return acc + q.size(); });
}

Token Marking::pop(PlaceId place) {
  auto& q = queues_.at(place.index);
  assert(!q.empty());
  Token t = std::move(q.front());
  q.pop_front();
  return t;
}

std::vector<std::size_t> Marking::counts() const {
  std::vector<std::size_t> out;
  out.reserve(queues_.size());
  for (const auto& q : queues_) out.push_back(q.size());
  return out;
}

namespace {

bool compare(std::int64_t lhs, CompareOp op, std::int64_t rhs) {
  switch (op) {
    case CompareOp::kLess: return lhs < rhs;
    case CompareOp::kLessEqual: return lhs <= rhs;
    case CompareOp::kGreater: return lhs > rhs;
    case CompareOp::kGreaterEqual: return lhs >= rhs;
    case CompareOp::kEqual: return lhs == rhs;
    case CompareOp::kNotEqual: return lhs != rhs;
  }
  return false;
}

void append_unique(std::vector<RequestTag>& pool, const std::vector<RequestTag>& tags) {
  for (auto tag : tags) {
    if (std::find(pool.begin(), pool.end(), tag) == pool.end()) pool.push_back(tag);
  }
}

}  // namespace

bool evaluate(const Guard& guard, const Marking& marking) {
  return std::all_of(guard.terms.begin(), guard.terms.end(), [&](const GuardTerm& term) {
    return compare(static_cast<std::int64_t>(marking.count(term.place)), term.op, term.value);
  });
}

std::size_t enabling_degree(const PetriNet& net, const Marking& marking, TransitionId transition) {
  const auto& t = net.transition(transition);
  for (const auto& inh : t.inhibitors) {
    if (marking.count(inh.place) >= inh.threshold) return 0;
  }
  if (t.guard && !evaluate(*t.guard, marking)) return 0;
  if (t.inputs.empty()) return 1;
  std::size_t degree = std::numeric_limits<std::size_t>::max();
  for (const auto& arc : t.inputs) degree = std::min(degree, marking.count(arc.place) / arc.weight);
  return degree;
}

bool is_enabled(const PetriNet& net, const Marking& marking, TransitionId transition) {
  return enabling_degree(net, marking, transition) > 0;
}

void fire_in_place(const PetriNet& net, Marking& marking, TransitionId transition, double now,
                   FireObserver* observer) {
  const auto& t = net.transition(transition);
  if (!is_enabled(net, marking, transition))
    throw std::logic_error(fmt::format("firing disabled transition '{}'", t.name));

  // Tags of all consumed tokens, first-seen order, duplicates merged (a
  // join sees the same block from both committers).
  std::vector<RequestTag> pool;
  for (const auto& arc : t.inputs) {
    for (std::uint32_t k = 0; k < arc.weight; ++k) {
      Token token = marking.pop(arc.place);
      if (observer) observer->on_consume(arc.place, token, now);
      append_unique(pool, token.tags);
    }
  }

  const bool source = t.inputs.empty();
  for (const auto& arc : t.outputs) {
    const bool resource = net.place(arc.place).resource;
    for (std::uint32_t k = 0; k < arc.weight; ++k) {
      Token token{now, {}};
      if (!resource) {
        if (source) {
          if (observer) {
            if (auto tag = observer->next_tag()) token.tags.push_back(*tag);
          }
        } else if (arc.weight == 1) {
          token.tags = pool;  // copy (1:1) or batch (k:1)
        } else if (pool.size() == arc.weight) {
          token.tags.push_back(pool[k]);  // expansion (1:k)
        } else {
          token.tags = pool;
        }
      }
      if (observer) observer->on_produce(arc.place, token, now);
      marking.push(arc.place, std::move(token));
    }
  }
}

Marking fire(const PetriNet& net, const Marking& marking, TransitionId transition, double now) {
  Marking next = marking;
  fire_in_place(net, next, transition, now);
  return next;
}

}  // namespace gspn
