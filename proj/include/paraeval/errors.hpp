#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace paraeval {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data: unparsable records, missing fields, broken invariants.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A record at a known line of an input file could not be read.
class ParseError : public DataError {
 public:
  ParseError(std::string path, std::size_t line, const std::string& message)
      : DataError(path + ":" + std::to_string(line) + ": " + message),
        path_(std::move(path)),
        line_(line) {}

  const std::string& path() const noexcept { return path_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Failures of an upstream service (embedding provider or chat endpoint).
class UpstreamError : public Error {
 public:
  using Error::Error;
};

/// The embedding provider could not be reached or is not ready.
class ProviderUnavailable : public UpstreamError {
 public:
  using UpstreamError::UpstreamError;
};

/// The provider refused a specific text (unknown to a store, too long, ...).
class TextRejected : public UpstreamError {
 public:
  using UpstreamError::UpstreamError;
};

/// No usable chat response could be obtained after all transport retries.
class TransportError : public UpstreamError {
 public:
  using UpstreamError::UpstreamError;
};

}  // namespace paraeval
