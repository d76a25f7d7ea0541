#pragma once

#include <stdexcept>
#include <string>

namespace permitmc {

/// Bad caller input: unknown names, malformed profiles, syntax errors.
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A configured size guard (profile cap, agent cap, atom cap) was exceeded.
class CapacityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace permitmc
