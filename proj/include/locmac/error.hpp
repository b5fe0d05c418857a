#ifndef LOCMAC_ERROR_HPP
#define LOCMAC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace locmac {

/// Malformed arguments: dimension mismatches, out-of-range parameters, bad files.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A factorization or solve failed even after jitter escalation.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested object would be too large to materialize.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace locmac

#endif  // LOCMAC_ERROR_HPP
