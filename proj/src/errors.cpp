#include "tve/errors.hpp"

namespace tve {

namespace {

std::string join(const std::vector<std::string>& problems) {
  std::string out = "invalid configuration:";
  for (const auto& p : problems) out += "\n  " + p;
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> problems)
    : Error(join(problems)), violations(std::move(problems)) {}

}  // namespace tve
