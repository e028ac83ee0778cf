#pragma once

#include <memory>
#include <string>

#include "residuum/effect_system.hpp"

namespace residuum {

// Builds the effect system named by a registry key:
//   atomicity | reentrancy | trace:<symbols> | must:<events>
//   | pmonad:<states> | custom:<path-to-json>
// Symbol/event/state lists are comma-separated.  Throws
// std::invalid_argument on unknown keys or malformed specs.
std::shared_ptr<const EffectSystem> makeSystem(const std::string& key);

}  // namespace residuum
