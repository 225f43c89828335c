#pragma once

#include <stdexcept>
#include <string>

namespace phsdcs {

// Malformed or inconsistent input data: bad files, mismatched dimensions,
// invalid parameters coming from outside the library.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical construction or iteration failed (singular system, failed
// factorization, divergence).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace phsdcs
