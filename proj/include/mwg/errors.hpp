#pragma once

#include <stdexcept>
#include <string>

namespace mwg {

/// Raised when a numerical routine fails to converge or meets NaN/degenerate
/// input. Domain violations use std::domain_error instead.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mwg
