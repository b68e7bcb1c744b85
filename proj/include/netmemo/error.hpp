#pragma once

#include <stdexcept>
#include <string>

namespace netmemo {

/// Caller passed arguments outside an operation's domain.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed, truncated or inconsistent coded data.
class CorruptStreamError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Encoder and decoder do not share the same memory/model.
class SyncError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A corpus is too short for the requested slicing.
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace netmemo
