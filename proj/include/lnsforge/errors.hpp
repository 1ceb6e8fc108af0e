#pragma once

#include <stdexcept>
#include <string>

namespace lnsforge {

struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidActionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidParameterError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LoadError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrainingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EpisodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when an internal consistency invariant breaks; indicates a bug,
// not bad user input.
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace lnsforge
