#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pob {

// Input errors map to CLI exit code 2, computation errors to exit code 3.
enum class ErrorKind { Input, Computation };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Input, what) {}
};

/// Malformed pronouncing-dictionary line. line() is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorKind::Input, "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Manifest, sidecar, score-file or model-file schema violation.
/// line() is 1-based, or 0 when the error is not tied to a line.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what, std::size_t line = 0)
      : Error(ErrorKind::Input,
              line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class OovError : public Error {
 public:
  explicit OovError(const std::string& word)
      : Error(ErrorKind::Input, "out-of-vocabulary word: '" + word + "'"),
        word_(word) {}
  const std::string& word() const noexcept { return word_; }

 private:
  std::string word_;
};

class VocabularyError : public Error {
 public:
  explicit VocabularyError(const std::string& what)
      : Error(ErrorKind::Input, what) {}
};

class LengthError : public Error {
 public:
  explicit LengthError(const std::string& what)
      : Error(ErrorKind::Input, what) {}
};

class GenerationError : public Error {
 public:
  explicit GenerationError(const std::string& what)
      : Error(ErrorKind::Computation, what) {}
};

class AlignmentError : public Error {
 public:
  explicit AlignmentError(const std::string& what)
      : Error(ErrorKind::Computation, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what)
      : Error(ErrorKind::Computation, what) {}
};

class TrainingError : public Error {
 public:
  TrainingError(std::size_t step, const std::string& what)
      : Error(ErrorKind::Computation,
              "step " + std::to_string(step) + ": " + what),
        step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class MetricError : public Error {
 public:
  explicit MetricError(const std::string& what)
      : Error(ErrorKind::Computation, what) {}
};

/// Undefined prefix concentration or contribution estimate.
class DiagnosticError : public Error {
 public:
  explicit DiagnosticError(const std::string& what)
      : Error(ErrorKind::Computation, what) {}
};

}  // namespace pob
