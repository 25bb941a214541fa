#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace jolt {

// Constraints of the joint deployment/trajectory problem. C3 covers both the
// per-stop capacity and the "at least one device per stop" lower bound.
enum class Constraint {
  C1_FastestRate,
  C2_SingleStop,
  C3_StopLoad,
  C4_AllServed,
  C5_XBounds,
  C6_YBounds,
  C7_StopCount,
  C8_TourPermutation,
  C9_PhaseLevels,
};

inline std::string_view constraint_name(Constraint c) {
  switch (c) {
    case Constraint::C1_FastestRate: return "C1";
    case Constraint::C2_SingleStop: return "C2";
    case Constraint::C3_StopLoad: return "C3";
    case Constraint::C4_AllServed: return "C4";
    case Constraint::C5_XBounds: return "C5";
    case Constraint::C6_YBounds: return "C6";
    case Constraint::C7_StopCount: return "C7";
    case Constraint::C8_TourPermutation: return "C8";
    case Constraint::C9_PhaseLevels: return "C9";
  }
  return "?";
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UnsupportedFormatError : public Error {
 public:
  using Error::Error;
};

class InvalidPermutationError : public Error {
 public:
  using Error::Error;
};

class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class SizeLimitError : public Error {
 public:
  using Error::Error;
};

class UnreachableDeviceError : public Error {
 public:
  UnreachableDeviceError(std::size_t device, std::size_t stop)
      : Error("device " + std::to_string(device) + " has zero rate to stop " + std::to_string(stop)),
        device_(device),
        stop_(stop) {}
  std::size_t device() const noexcept { return device_; }
  std::size_t stop() const noexcept { return stop_; }

 private:
  std::size_t device_;
  std::size_t stop_;
};

class InfeasibleError : public Error {
 public:
  InfeasibleError(Constraint c, const std::string& what)
      : Error(std::string(constraint_name(c)) + " violated: " + what), constraint_(c) {}
  Constraint constraint() const noexcept { return constraint_; }

 private:
  Constraint constraint_;
};

class InitializationError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace jolt
