#pragma once

#include <stdexcept>
#include <string>

namespace gcs {

// Base error. kind() is a stable machine-readable tag used by the CLI.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define GCS_DEFINE_ERROR(Name, tag)                                        \
  class Name : public Error {                                              \
   public:                                                                 \
    explicit Name(const std::string& message) : Error(tag, message) {}     \
  };

GCS_DEFINE_ERROR(ParameterError, "parameter")
GCS_DEFINE_ERROR(ShapeError, "shape")
GCS_DEFINE_ERROR(NumericDomainError, "numeric_domain")
GCS_DEFINE_ERROR(UsageError, "usage")
GCS_DEFINE_ERROR(InputError, "input")
GCS_DEFINE_ERROR(DegenerateInputError, "degenerate_input")
GCS_DEFINE_ERROR(FileError, "file")

#undef GCS_DEFINE_ERROR

class TrainingFailure : public Error {
 public:
  TrainingFailure(int step, const std::string& message)
      : Error("training_failure", "step " + std::to_string(step) + ": " + message),
        step_(step) {}

  int step() const noexcept { return step_; }

 private:
  int step_;
};

}  // namespace gcs
