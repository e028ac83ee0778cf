#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <variant>

#include "residuum/dfa.hpp"

namespace residuum {

// Set of event names, used by the must-effect system.  Kept sorted so that
// equality is structural.
using EventSet = std::set<std::string>;

// A single effect value.  The representation depends on the effect system
// that produced it:
//   - finite systems store an index into their carrier,
//   - the must system stores a set of event names,
//   - the trace system stores a canonical minimal DFA.
//
// Effects are immutable and cheap to copy; the payload is shared.
// Every effect remembers which system minted it so that mixing values from
// two different systems is caught at runtime instead of producing garbage.
class Effect {
public:
  using Payload = std::variant<std::uint32_t, EventSet, Dfa>;

  Effect() = default;
  Effect(std::string systemId, Payload payload)
      : systemId_(std::move(systemId)),
        payload_(std::make_shared<const Payload>(std::move(payload))) {}

  const std::string& systemId() const { return systemId_; }

  std::uint32_t index() const { return std::get<std::uint32_t>(*payload_); }
  const EventSet& events() const { return std::get<EventSet>(*payload_); }
  const Dfa& dfa() const { return std::get<Dfa>(*payload_); }

  bool valid() const { return payload_ != nullptr; }

  friend bool operator==(const Effect& a, const Effect& b) {
    if (a.systemId_ != b.systemId_) return false;
    if (a.payload_ == b.payload_) return true;
    if (!a.payload_ || !b.payload_) return false;
    return *a.payload_ == *b.payload_;
  }
  friend bool operator!=(const Effect& a, const Effect& b) { return !(a == b); }

private:
  std::string systemId_;
  std::shared_ptr<const Payload> payload_;
};

}  // namespace residuum
