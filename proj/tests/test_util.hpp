#pragma once

#include <optional>

#include "ratebound/error.hpp"

// Kind of the ratebound::Error thrown by f, or nullopt when nothing is thrown.
template <class F>
std::optional<ratebound::ErrorKind> error_kind(F &&f) {
  try {
    f();
  } catch (const ratebound::Error &e) {
    return e.kind();
  }
  return std::nullopt;
}
