#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace shapbox {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Two objects built over different feature spaces were combined.
struct SpaceMismatchError : Error {
  using Error::Error;
};

/// An operation would introduce a squared variable into a multilinear
/// polynomial.
struct MultilinearityError : Error {
  using Error::Error;
};

/// A size guard tripped: the operation is defined but would exceed the
/// resource bound this code path is willing to pay.
struct GuardError : Error {
  using Error::Error;
};

/// Malformed input text.  `position` is a byte offset into the input when
/// known, `npos` otherwise.
struct ParseError : Error {
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  explicit ParseError(const std::string& msg, std::size_t pos = npos)
      : Error(pos == npos ? msg : msg + " (at offset " + std::to_string(pos) + ")"),
        position(pos) {}

  std::size_t position;
};

}  // namespace shapbox
