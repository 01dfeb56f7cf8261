#pragma once

#include <stdexcept>
#include <string>

namespace dgrc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed stimulus or name files. `line` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : Error(line == 0 ? message
                        : "line " + std::to_string(line) + ": " + message),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Transport failure that survived every retry attempt.
class TransportError : public Error {
 public:
  TransportError(const std::string& message, int attempts)
      : Error(message + " (after " + std::to_string(attempts) + " attempts)"),
        attempts_(attempts) {}
  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

// Server answered but the payload breaks the wire contract (e.g. missing
// logprobs). Never retried.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// HTTP 4xx: the request itself is wrong, retrying would not help.
class BackendRejected : public Error {
 public:
  BackendRejected(const std::string& message, int status)
      : Error(message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

}  // namespace dgrc
