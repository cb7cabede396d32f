#pragma once

#include <stdexcept>
#include <string>

namespace detnet {

// Bad input data: malformed files, schema violations, incompatible artifacts.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Bad invocation: unknown flags, missing arguments, invalid combinations.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace detnet
