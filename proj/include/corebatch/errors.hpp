#pragma once

#include <stdexcept>
#include <string>

namespace corebatch {

// Malformed or truncated file content (cache files, checkpoints, CSV import).
// Distinct from std::invalid_argument so callers can map it to a data error
// rather than a usage error.
class FormatError : public std::runtime_error {
  public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace corebatch
