#pragma once

#include <stdexcept>
#include <string>

namespace terraindiff {

// Bad arguments or shapes supplied by the caller. Maps to exit code 2 in the CLI.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// Missing or unreadable files. Maps to exit code 66.
class FileError : public std::runtime_error {
 public:
  explicit FileError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite training loss. Maps to exit code 70.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace terraindiff
