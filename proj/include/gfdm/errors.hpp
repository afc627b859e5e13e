#pragma once

#include <stdexcept>
#include <string>

namespace gfdm {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad call-site input: out-of-range sizes, mismatched lengths, invalid enums.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Operation only defined for a subset of {1,2,3} spatial dimensions.
class UnsupportedDimension : public Error {
 public:
  using Error::Error;
};

// A point cloud violates its structural invariants, or generation gave up.
class DegenerateCloud : public Error {
 public:
  using Error::Error;
};

// Malformed text input; message carries "<path>:<line>:" with 1-based line.
class ParseError : public Error {
 public:
  ParseError(const std::string& path, long line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what),
        line_(line) {}

  long line() const { return line_; }

 private:
  long line_;
};

// Too few effective (positive-weight) neighbors to determine the Taylor
// coefficients; the least-squares system cannot have full rank.
class RankDeficiencyError : public Error {
 public:
  using Error::Error;
};

// No stencil has a positive center coefficient, so no stable time step exists.
class DegenerateStencilError : public Error {
 public:
  using Error::Error;
};

// Moment matrix of a star is numerically rank deficient: the neighbor
// geometry does not determine all Taylor coefficients.
class SingularStarError : public Error {
 public:
  SingularStarError(int node, const std::string& what)
      : Error("star at node " + std::to_string(node) + ": " + what +
              " (increase the star size M or change the weight function)"),
        node_(node) {}

  int node() const { return node_; }

 private:
  int node_;
};

// Key-value run configuration could not be resolved.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace gfdm
