#pragma once

#include <stdexcept>
#include <string>

namespace ragds {

/// Base for every typed failure raised by the library. The CLI maps
/// subclasses onto exit codes, so new error types should derive from here.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace ragds
