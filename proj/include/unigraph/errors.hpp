#pragma once

#include <stdexcept>
#include <string>

namespace unigraph {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Port wiring or graph topology is inconsistent.
class StructureError : public Error {
 public:
  using Error::Error;
};

/// A vertex matrix or length violates its invariants.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A linear solve or root search failed numerically.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Caller-supplied parameter out of range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Operation called on an input that breaks its precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Input data that cannot come from a physical system.
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace unigraph
