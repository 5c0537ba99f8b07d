#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace keeper {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed template text (unbalanced braces, unterminated bracket, ...).
class TemplateError : public Error {
public:
  TemplateError(const std::string& msg, std::size_t offset)
      : Error(msg + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

// A field expression referenced a root or key that is not bound.
class LookupError : public Error {
public:
  using Error::Error;
};

// A value had the wrong shape for the requested operation.
class TypeError : public Error {
public:
  using Error::Error;
};

// The YAML document could not be parsed at all.
class YamlError : public Error {
public:
  using Error::Error;
};

// The YAML document parsed but does not have the expected shape.
class ShapeError : public Error {
public:
  using Error::Error;
};

// A well-formed specification violates a semantic rule.
class ValidationError : public Error {
public:
  using Error::Error;
};

// Failure while turning a specification into a concrete plan.
class PlanError : public Error {
public:
  using Error::Error;
};

// An unrecognized or malformed rebuild directive.
class DirectiveError : public Error {
public:
  using Error::Error;
};

// A network request failed after all retries.
class TransportError : public Error {
public:
  using Error::Error;
};

// A remote endpoint answered with an unexpected payload.
class ProtocolError : public Error {
public:
  using Error::Error;
};

// Local file or environment trouble (missing input, unwritable output, ...).
class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace keeper
