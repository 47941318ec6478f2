#pragma once

#include <stdexcept>
#include <string>

namespace gelfand {

// Argument outside the function's domain (|x| > 1, |z| > 1, ...).
class domain_error : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Invalid structural parameter (negative degree, d < 1, alpha <= -1, ...).
class parameter_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Caller combined objects that do not belong together (index/pair mismatch,
// incompatible rule, non-hermitian input to a hermitian routine).
class usage_error : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

// An iterative numerical routine failed to converge, or an exact integer
// computation overflowed.
class numeric_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Data contradicts itself, e.g. a truncated spec carries more mass at the
// identity than the function it is supposed to approximate.
class inconsistency_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace gelfand
