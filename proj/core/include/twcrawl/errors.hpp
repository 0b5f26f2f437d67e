#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "twcrawl/time.hpp"

namespace twcrawl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// record_codec

class FieldCountError : public Error {
 public:
  explicit FieldCountError(std::size_t count)
      : Error("expected 7 fields, found " + std::to_string(count)), count_(count) {}
  std::size_t count() const { return count_; }

 private:
  std::size_t count_;
};

class InvalidRecordError : public Error {
 public:
  using Error::Error;
};

// Search API

class AuthError : public Error {
 public:
  using Error::Error;
};

class RateLimitError : public Error {
 public:
  explicit RateLimitError(Timestamp reset_at)
      : Error("rate limit exhausted until " + format_iso8601(reset_at)), reset_at_(reset_at) {}
  Timestamp reset_at() const { return reset_at_; }

 private:
  Timestamp reset_at_;
};

class BadTokenError : public Error {
 public:
  using Error::Error;
};

// Transient transport failure; the crawler retries these.
class NetworkError : public Error {
 public:
  using Error::Error;
};

// Line-oriented config files (regex specs, rules, registries, gazetteers).

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class RegexError : public ParseError {
 public:
  using ParseError::ParseError;
};

// privacy gateway / ledger

class UnknownFieldError : public Error {
 public:
  using Error::Error;
};

class UnknownCodeError : public Error {
 public:
  using Error::Error;
};

class UnknownUserError : public Error {
 public:
  using Error::Error;
};

class NoServiceForCategoryError : public Error {
 public:
  using Error::Error;
};

class VaultError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace twcrawl
