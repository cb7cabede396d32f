#pragma once

#include <stdexcept>
#include <string>

namespace detnet {

// Always-on internal consistency check (shape mismatches and the like).
// These guard programming errors, so they throw logic_error and stay enabled
// in release builds.
#define DETNET_CHECK(cond, msg)                                      \
  do {                                                               \
    if (!(cond))                                                     \
      throw std::logic_error(std::string("detnet internal: ") + msg); \
  } while (0)

}  // namespace detnet
