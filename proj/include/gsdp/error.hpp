#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gsdp {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a type invariant (bad header, duplicate id, non-finite value, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A category has no member that passes the Top-1 typicality filter.
class NoTypicalMembers : public ValidationError {
 public:
  explicit NoTypicalMembers(std::size_t category)
      : ValidationError("category " + std::to_string(category) +
                        " has no typical members"),
        category_(category) {}
  std::size_t category() const noexcept { return category_; }

 private:
  std::size_t category_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionMismatch(std::string(what) + ": expected dimension " +
                            std::to_string(want) + ", got " +
                            std::to_string(got));
  }
}

}  // namespace detail
}  // namespace gsdp
