#pragma once

#include <stdexcept>

namespace lerg {

inline void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace lerg
