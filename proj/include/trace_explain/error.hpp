#pragma once

#include <stdexcept>
#include <string>

namespace trace_explain {

// Base for every error the library raises on bad input.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed external input (CoNLL-U, bundle files, JSON).
class FormatError : public Error {
 public:
  using Error::Error;
};

// A lookup for an id/key that does not exist.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

// A call whose arguments violate the operation's contract.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace trace_explain
