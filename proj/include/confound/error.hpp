#pragma once

#include <stdexcept>
#include <string>

namespace confound {

// Library-wide error type; messages are meant to be shown to CLI users as-is.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace confound
