#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uwbrss {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- dataset / CSV ----

class IoFailure : public Error {
 public:
  using Error::Error;
};

class MissingColumn : public Error {
 public:
  explicit MissingColumn(const std::string& column)
      : Error("missing column: " + column), column(column) {}
  std::string column;
};

class MalformedNumber : public Error {
 public:
  MalformedNumber(std::size_t row, const std::string& column, const std::string& text)
      : Error("row " + std::to_string(row) + ", column " + column +
              ": malformed number '" + text + "'"),
        row(row),
        column(column) {}
  std::size_t row;
  std::string column;
};

class InvariantViolation : public Error {
 public:
  explicit InvariantViolation(const std::string& what) : Error(what) {}
  InvariantViolation(std::size_t row, const std::string& what)
      : Error("row " + std::to_string(row) + ": " + what), row(row) {}
  std::size_t row = 0;
};

class MixedAgcState : public Error {
 public:
  using Error::Error;
};

class EmptyStratum : public Error {
 public:
  EmptyStratum(double distance_m, double gain_db)
      : Error("stratum (" + std::to_string(distance_m) + " m, " +
              std::to_string(gain_db) + " dB) has no delivered records") {}
};

class NoDeliveredRecords : public Error {
 public:
  using Error::Error;
};

// ---- channel simulator ----

class NonPositiveDistance : public Error {
 public:
  using Error::Error;
};

class AllZeroCir : public Error {
 public:
  AllZeroCir() : Error("CIR is all zeros, no first path to locate") {}
};

class InsufficientDistances : public Error {
 public:
  using Error::Error;
};

// ---- features ----

class EmptySpec : public Error {
 public:
  EmptySpec() : Error("feature spec selects no columns") {}
};

class TooFewRows : public Error {
 public:
  using Error::Error;
};

class ColumnMismatch : public Error {
 public:
  using Error::Error;
};

// ---- regressors ----

class EmptyMatrix : public Error {
 public:
  EmptyMatrix() : Error("feature matrix has no rows") {}
};

class KTooLarge : public Error {
 public:
  KTooLarge(int k, std::size_t rows)
      : Error("k=" + std::to_string(k) + " exceeds " + std::to_string(rows) +
              " training rows") {}
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : Error("expected " + std::to_string(expected) + " features, got " +
              std::to_string(got)) {}
};

class Untrained : public Error {
 public:
  Untrained() : Error("model used before train()") {}
};

class SingularDesign : public Error {
 public:
  using Error::Error;
};

class UnknownRegressor : public Error {
 public:
  using Error::Error;
};

// ---- evaluation ----

class EmptyTestSet : public Error {
 public:
  EmptyTestSet() : Error("no test rows to evaluate") {}
};

class TooFewDistances : public Error {
 public:
  using Error::Error;
};

// ---- protocol ----

class MissingGainCoverage : public Error {
 public:
  explicit MissingGainCoverage(double distance_m)
      : Error("no delivered record at any gain for distance " +
              std::to_string(distance_m) + " m") {}
};

class SoundingLost : public Error {
 public:
  SoundingLost() : Error("sounding packet not delivered") {}
};

// ---- configuration / CLI ----

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace uwbrss
