#pragma once

#include <stdexcept>
#include <string>

namespace msde {

// Bad config, bad CLI input, precondition violations on user-supplied data.
// CLI exit code 1.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runtime numerical failure: blow-up, degenerate solves, violated centering
// conditions. CLI exit code 2.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace msde
