#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ssx {

// Shape or contract violations (mismatched dimensions, empty batch, ...).
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An id fell outside [0, bound).
class IndexError : public std::out_of_range {
 public:
  IndexError(const std::string& where, std::int64_t id, std::int64_t bound)
      : std::out_of_range(where + ": id " + std::to_string(id) +
                          " out of range [0, " + std::to_string(bound) + ")"),
        id_(id),
        bound_(bound) {}

  std::int64_t id() const { return id_; }
  std::int64_t bound() const { return bound_; }

 private:
  std::int64_t id_;
  std::int64_t bound_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Allocation failure at benchmark scale.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The finite-difference oracle produced a non-finite loss.
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training diverged (non-finite loss) at a given step.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(int step, const std::string& what)
      : std::runtime_error("step " + std::to_string(step) + ": " + what),
        step_(step) {}

  int step() const { return step_; }

 private:
  int step_;
};

}  // namespace ssx
