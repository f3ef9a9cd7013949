#pragma once

#include <stdexcept>
#include <string>

namespace brqw {

// Thrown when an enumeration or evolution would exceed its configured
// resource budget (path count, basis-state count, ...).
class BudgetExceeded : public std::runtime_error {
public:
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace brqw
