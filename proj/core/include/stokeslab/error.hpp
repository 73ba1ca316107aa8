#pragma once

#include <stdexcept>
#include <string>

namespace stokeslab {

/// Two objects built over different truncations (or dimensions) were combined.
class DimensionMismatch : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// A quantity that is non-negative for every physical state came out negative
/// beyond round-off. This points at an operator-construction bug, not at the state.
class NumericalGuardError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Malformed state spec, sweep spec, or serialized file. `token()` names the offending input.
class SpecError : public std::invalid_argument {
   public:
    SpecError(const std::string &message, std::string token)
        : std::invalid_argument(message + " (at '" + token + "')"), token_(std::move(token)) {
    }

    const std::string &token() const {
        return token_;
    }

   private:
    std::string token_;
};

}  // namespace stokeslab
