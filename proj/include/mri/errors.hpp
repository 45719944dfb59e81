#pragma once

#include <stdexcept>
#include <string>

namespace mri {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Shape or axis mismatch between arrays/operators.
class DimensionError : public Error {
public:
  explicit DimensionError(const std::string& msg) : Error(msg) {}
};

/// Invalid scalar parameter or configuration value.
class ParameterError : public Error {
public:
  explicit ParameterError(const std::string& msg) : Error(msg) {}
};

/// Calibration-stage failure (missing ACS, underdetermined fit, ...).
class CalibrationError : public Error {
public:
  explicit CalibrationError(const std::string& msg) : Error(msg) {}
};

/// Reconstruction-stage failure (pattern/kernel mismatch, ...).
class ReconstructionError : public Error {
public:
  explicit ReconstructionError(const std::string& msg) : Error(msg) {}
};

/// File format violation (bad header, truncated payload, ...).
class FormatError : public Error {
public:
  explicit FormatError(const std::string& msg) : Error(msg) {}
};

}  // namespace mri
