#pragma once

#include <stdexcept>
#include <string>

namespace homwit {

/// Constrained projection onto a curved body failed to converge from any start.
class ProjectionError : public std::runtime_error {
 public:
  explicit ProjectionError(const std::string& what) : std::runtime_error(what) {}
};

/// Nonlinear dip fit failed (non-convergence or visibility outside [0, 1.05]).
class FitError : public std::runtime_error {
 public:
  explicit FitError(const std::string& what) : std::runtime_error(what) {}
};

/// Overlap estimation is undefined for the given counts (e.g. empty pair mass).
class EstimationError : public std::runtime_error {
 public:
  explicit EstimationError(const std::string& what) : std::runtime_error(what) {}
};

/// Run configuration is malformed (unknown key, bad type, out-of-range value).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Wraps any failure with the pipeline stage it occurred in.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace homwit
