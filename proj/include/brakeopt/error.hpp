#pragma once

#include <stdexcept>
#include <string>

namespace brakeopt {

/// Base class of every error raised by the library. Each subclass maps to a
/// distinct process exit code in the CLI.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what, int exit_code)
      : std::runtime_error(what), kind_(std::move(kind)), exit_code_(exit_code) {}

  const std::string& kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return exit_code_; }

 private:
  std::string kind_;
  int exit_code_;
};

namespace exit_codes {
inline constexpr int kOk = 0;
inline constexpr int kUnknown = 1;
inline constexpr int kUsage = 2;
inline constexpr int kParse = 3;
inline constexpr int kValidation = 4;
inline constexpr int kSingularDenominator = 5;
inline constexpr int kSingularSystem = 6;
inline constexpr int kMeanOutOfSupport = 7;
inline constexpr int kInsufficientSamples = 8;
inline constexpr int kDegenerateSample = 9;
inline constexpr int kDegenerateEnsemble = 10;
inline constexpr int kAllStartsFailed = 11;
inline constexpr int kNoFeasiblePoint = 12;
inline constexpr int kIo = 13;
}  // namespace exit_codes

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error("ParseError", what, exit_codes::kParse) {}
};

class ValidationError : public Error {
 public:
  ValidationError(std::string invariant, const std::string& what)
      : Error("ValidationError", what, exit_codes::kValidation), invariant_(std::move(invariant)) {}
  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

class SingularDenominator : public Error {
 public:
  SingularDenominator(std::string which, double value)
      : Error("SingularDenominator",
              "singular denominator " + which + " = " + std::to_string(value),
              exit_codes::kSingularDenominator),
        which_(std::move(which)),
        value_(value) {}
  const std::string& which() const noexcept { return which_; }
  double value() const noexcept { return value_; }

 private:
  std::string which_;
  double value_;
};

class SingularSystem : public Error {
 public:
  explicit SingularSystem(const std::string& what)
      : Error("SingularSystem", what, exit_codes::kSingularSystem) {}
};

class MeanOutOfSupport : public Error {
 public:
  explicit MeanOutOfSupport(const std::string& what)
      : Error("MeanOutOfSupport", what, exit_codes::kMeanOutOfSupport) {}
};

class InsufficientSamples : public Error {
 public:
  explicit InsufficientSamples(const std::string& what)
      : Error("InsufficientSamples", what, exit_codes::kInsufficientSamples) {}
};

class DegenerateSample : public Error {
 public:
  explicit DegenerateSample(const std::string& what)
      : Error("DegenerateSample", what, exit_codes::kDegenerateSample) {}
};

class DegenerateEnsemble : public Error {
 public:
  explicit DegenerateEnsemble(const std::string& what)
      : Error("DegenerateEnsemble", what, exit_codes::kDegenerateEnsemble) {}
};

class AllStartsFailed : public Error {
 public:
  explicit AllStartsFailed(const std::string& what)
      : Error("AllStartsFailed", what, exit_codes::kAllStartsFailed) {}
};

class NoFeasiblePoint : public Error {
 public:
  explicit NoFeasiblePoint(const std::string& what)
      : Error("NoFeasiblePoint", what, exit_codes::kNoFeasiblePoint) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("IoError", what, exit_codes::kIo) {}
};

}  // namespace brakeopt
