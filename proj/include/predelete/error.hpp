#pragma once

#include <stdexcept>
#include <string>

namespace predelete {

// Each kind maps to one CLI exit code (usage 2, data 3, model 4, internal 5).
enum class ErrorKind { Usage, Data, Model, Internal };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

// Malformed line in an input file; line numbers are 1-based.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : DataError("line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ModelError : public Error {
 public:
  explicit ModelError(const std::string& what) : Error(ErrorKind::Model, what) {}
};

class VersionError : public ModelError {
 public:
  VersionError(int found, int supported)
      : ModelError("bundle format version " + std::to_string(found) +
                   " is not supported (this build reads version " + std::to_string(supported) + ")"),
        found_(found),
        supported_(supported) {}
  int found() const noexcept { return found_; }
  int supported() const noexcept { return supported_; }

 private:
  int found_;
  int supported_;
};

class ChecksumError : public ModelError {
 public:
  explicit ChecksumError(const std::string& what) : ModelError(what) {}
};

}  // namespace predelete
