#pragma once

#include <stdexcept>
#include <string>

namespace hartogs {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed parameters: non-coprime (m,n), exponents below 1, bad ranges.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// The monomial (or its norm) does not exist in the requested L^p class.
class NotAllowable : public Error {
 public:
  using Error::Error;
};

class PointTooCloseToBoundary : public Error {
 public:
  using Error::Error;
};

class TorusOutsideDomain : public Error {
 public:
  using Error::Error;
};

}  // namespace hartogs
