#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nncv {

// Contracted error conditions. Each maps one misuse or bad input to a
// distinct type so callers and tests can catch them specifically.

struct HeavisideNotDifferentiable : std::logic_error {
  HeavisideNotDifferentiable()
      : std::logic_error("spatial gradient requires a sigmoid activation; "
                         "the step activation has zero gradient a.e.") {}
};

struct DegenerateLines : std::invalid_argument {
  explicit DegenerateLines(const std::string& what) : std::invalid_argument(what) {}
};

struct EmptyInput : std::invalid_argument {
  explicit EmptyInput(const std::string& what) : std::invalid_argument(what) {}
};

struct PatternLengthMismatch : std::invalid_argument {
  PatternLengthMismatch(std::size_t got, std::size_t want)
      : std::invalid_argument("sign pattern has length " + std::to_string(got) +
                              ", model expects " + std::to_string(want)) {}
};

struct NonPartition : std::invalid_argument {
  explicit NonPartition(const std::string& what) : std::invalid_argument(what) {}
};

struct EmptyBatch : std::invalid_argument {
  EmptyBatch() : std::invalid_argument("gradient batch must contain at least one pixel") {}
};

struct EmptyDataset : std::invalid_argument {
  EmptyDataset() : std::invalid_argument("training requires a non-empty dataset") {}
};

struct ShapeMismatch : std::invalid_argument {
  explicit ShapeMismatch(const std::string& what) : std::invalid_argument(what) {}
};

struct ConfigInvalid : std::invalid_argument {
  explicit ConfigInvalid(const std::string& what) : std::invalid_argument(what) {}
};

struct UnsupportedPhases : std::invalid_argument {
  explicit UnsupportedPhases(int m)
      : std::invalid_argument("grid evolution supports m in {1,2}, got m=" + std::to_string(m)) {}
};

struct UnstableStep : std::runtime_error {
  int step;
  explicit UnstableStep(int step_index)
      : std::runtime_error("level-set field became non-finite at step " +
                           std::to_string(step_index)),
        step(step_index) {}
};

struct InvalidDims : std::invalid_argument {
  explicit InvalidDims(const std::string& what) : std::invalid_argument(what) {}
};

struct MalformedFile : std::runtime_error {
  std::size_t byte_offset;
  MalformedFile(std::size_t offset, const std::string& what)
      : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"),
        byte_offset(offset) {}
};

struct UnsupportedFormat : std::runtime_error {
  explicit UnsupportedFormat(const std::string& what) : std::runtime_error(what) {}
};

struct VersionMismatch : std::runtime_error {
  VersionMismatch(int found, int expected)
      : std::runtime_error("checkpoint version " + std::to_string(found) +
                           " unsupported, expected " + std::to_string(expected)) {}
};

struct SchemaError : std::runtime_error {
  std::string field;
  explicit SchemaError(const std::string& missing_field)
      : std::runtime_error("checkpoint is missing field \"" + missing_field + "\""),
        field(missing_field) {}
};

struct DimMismatch : std::invalid_argument {
  explicit DimMismatch(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace nncv
