#include "residuum/registry.hpp"

#include <stdexcept>

#include "residuum/instances.hpp"
#include "residuum/trace.hpp"

namespace residuum {

namespace {

std::vector<std::string> splitNames(const std::string& spec) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    std::size_t comma = spec.find(',', pos);
    std::string name = spec.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!name.empty()) out.push_back(name);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

std::shared_ptr<const EffectSystem> makeSystem(const std::string& key) {
  if (key == "atomicity")
    return std::make_shared<FiniteQuantale>(atomicityQuantale());
  if (key == "reentrancy")
    return std::make_shared<FiniteQuantale>(reentrancyQuantale());
  if (key.rfind("trace:", 0) == 0)
    return std::make_shared<TraceSystem>(splitNames(key.substr(6)), key);
  if (key.rfind("must:", 0) == 0)
    return std::make_shared<MustSystem>(splitNames(key.substr(5)), key);
  if (key.rfind("pmonad:", 0) == 0)
    return std::make_shared<FiniteQuantale>(
        pmonadQuantale(splitNames(key.substr(7)), key));
  if (key.rfind("custom:", 0) == 0)
    return std::make_shared<FiniteQuantale>(
        FiniteQuantale::fromJsonFile(key.substr(7), key));
  throw std::invalid_argument("unknown effect system key '" + key + "'");
}

}  // namespace residuum
