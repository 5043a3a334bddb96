#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace markov_embed {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: unknown symbols, out-of-domain queries, invalid parameters.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A configurable size cap would be exceeded.
class ResourceError : public Error {
 public:
  ResourceError(const std::string& what, std::size_t cap)
      : Error(what + " (cap " + std::to_string(cap) + ")"), cap_(cap) {}
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t cap_;
};

/// Regex text could not be parsed.
class SyntaxError : public InputError {
 public:
  SyntaxError(const std::string& what, std::size_t offset)
      : InputError("syntax error at offset " + std::to_string(offset) + ": " + what),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// The requested construction does not apply to this source or transformation.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Floating-mode partition refinement hit a non-transitive tie.
class AmbiguityError : public Error {
 public:
  using Error::Error;
};

}  // namespace markov_embed
