#pragma once

#include <stdexcept>
#include <string>

namespace cdlab {

// Every failure the library reports derives from Error so front-ends can map
// it onto an exit code with a single catch.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// The configured working precision cannot carry a weight to the required
// accuracy. Raise precision_bits or lower the degree/k being requested.
class PrecisionExhausted : public Error {
 public:
  using Error::Error;
};

class GrowthViolation : public Error {
 public:
  using Error::Error;
};

class PointOutsideDomain : public Error {
 public:
  using Error::Error;
};

class SpanningFailure : public Error {
 public:
  SpanningFailure(const std::string& what, long rank, long dim)
      : Error(what), rank_(rank), dim_(dim) {}
  long rank() const noexcept { return rank_; }
  long dim() const noexcept { return dim_; }

 private:
  long rank_;
  long dim_;
};

// A shift needed by the extraction recursion leaves what the series can
// represent (window reach) or the target lies outside the frame window.
class TruncationExhausted : public Error {
 public:
  using Error::Error;
};

class MissingLowerLayer : public Error {
 public:
  using Error::Error;
};

class BoundViolation : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class MissingInput : public Error {
 public:
  using Error::Error;
};

}  // namespace cdlab
