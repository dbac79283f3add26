#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace brickctl {

/// Raised while assembling automata from ill-formed inputs.
class ModelError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Raised when an explicit state space grows past the configured cap.
class ResourceLimitError : public std::runtime_error {
public:
  explicit ResourceLimitError(std::size_t cap)
      : std::runtime_error("state cap of " + std::to_string(cap) + " explicit states exceeded"),
        cap_(cap) {}

  std::size_t cap() const noexcept { return cap_; }

private:
  std::size_t cap_;
};

inline constexpr std::size_t kDefaultStateCap = 5'000'000;

} // namespace brickctl
