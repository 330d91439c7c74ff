#pragma once

#include <stdexcept>
#include <string>

namespace schottky {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ZeroVector : Error {
  ZeroVector() : Error("zero vector has no projective class") {}
};

struct PointNotOnHyperplane : Error {
  explicit PointNotOnHyperplane(const std::string& detail)
      : Error("point not on hyperplane: " + detail) {}
};

struct InvalidRadii : Error {
  explicit InvalidRadii(const std::string& detail) : Error("invalid radii: " + detail) {}
};

struct DegenerateRadii : Error {
  explicit DegenerateRadii(const std::string& detail) : Error("degenerate radii: " + detail) {}
};

struct BadModulus : Error {
  explicit BadModulus(const std::string& detail) : Error("bad modulus: " + detail) {}
};

struct CapExceeded : Error {
  explicit CapExceeded(const std::string& detail) : Error("cap exceeded: " + detail) {}
};

struct IndexOutOfRange : Error {
  explicit IndexOutOfRange(const std::string& detail) : Error("index out of range: " + detail) {}
};

struct PreconditionViolated : Error {
  explicit PreconditionViolated(const std::string& detail)
      : Error("precondition violated: " + detail) {}
};

struct SearchExhausted : Error {
  explicit SearchExhausted(const std::string& detail) : Error("search exhausted: " + detail) {}
};

struct EqualFunctions : Error {
  EqualFunctions() : Error("bit strings are equal") {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& detail) : Error("parse error: " + detail) {}
};

}  // namespace schottky
