#include "residuum/effect_system.hpp"

#include <stdexcept>

namespace residuum {

bool EffectSystem::le(const Effect& a, const Effect& b) const {
  std::optional<Effect> j = join(a, b);
  return j.has_value() && *j == b;
}

void EffectSystem::requireMine(const Effect& e) const {
  if (!e.valid())
    throw std::invalid_argument("effect value is empty");
  if (e.systemId() != id())
    throw std::invalid_argument("effect from system '" + e.systemId() +
                                "' used with system '" + id() + "'");
}

}  // namespace residuum
