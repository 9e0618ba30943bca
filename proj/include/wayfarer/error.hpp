#pragma once

#include <stdexcept>
#include <string>

namespace wayfarer {

// Base for every domain error. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// Thrown when loaded data breaks an invariant; the message names the field.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class EmptyTranscript : public Error {
 public:
  EmptyTranscript() : Error("transcript is empty") {}
};

class BackendError : public Error {
 public:
  using Error::Error;
};

class ScriptError : public Error {
 public:
  using Error::Error;
};

class TooFewSamples : public Error {
 public:
  using Error::Error;
};

class DegenerateBaseline : public Error {
 public:
  using Error::Error;
};

class TooFewRows : public Error {
 public:
  using Error::Error;
};

class DegenerateGroups : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class SessionNotFound : public Error {
 public:
  explicit SessionNotFound(const std::string& id) : Error("no such session: " + id) {}
};

}  // namespace wayfarer
