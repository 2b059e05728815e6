#pragma once

#include <stdexcept>
#include <string>

namespace tiham {

// Raised for contract violations: bad shapes, out-of-range indices,
// non-unitary gates, malformed input files.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tiham
