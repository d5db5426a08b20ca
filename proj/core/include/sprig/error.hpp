#pragma once

#include <stdexcept>
#include <string>

namespace sprig {

// Bad input: unreadable file, malformed rule line, malformed CoNLL-U.
// The command line tool maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Broken internal invariant. Maps to exit code 3.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace sprig
