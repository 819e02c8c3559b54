#pragma once

#include <stdexcept>
#include <string>

namespace polcomp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument violated an operation's precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The ITU band cannot hold every channel pair the topology needs.
class ChannelExhausted : public Error {
 public:
  ChannelExhausted(int required, int available)
      : Error("channel band exhausted: " + std::to_string(required) +
              " channels required, " + std::to_string(available) +
              " available"),
        required_(required),
        available_(available) {}

  int required() const noexcept { return required_; }
  int available() const noexcept { return available_; }

 private:
  int required_;
  int available_;
};

/// The cross-correlation histogram has no peak that stands out of the
/// background, so the inter-user delay cannot be established.
class DelayNotFound : public Error {
 public:
  DelayNotFound(double confidence, double threshold)
      : Error("no significant correlation peak (confidence " +
              std::to_string(confidence) + " < " + std::to_string(threshold) +
              ")"),
        confidence_(confidence) {}

  double confidence() const noexcept { return confidence_; }

 private:
  double confidence_;
};

/// Malformed scenario or stream file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace polcomp
