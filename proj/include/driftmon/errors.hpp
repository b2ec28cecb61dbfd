#pragma once

#include <stdexcept>
#include <string>

namespace driftmon {

// Error taxonomy used by the CLI to pick exit codes:
//   ConfigError -> 1, SchemaError/DataError -> 2,
//   TuningError/SamplingError -> 3.

class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class SchemaError : public std::runtime_error {
  public:
    explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
  public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class FitError : public std::runtime_error {
  public:
    explicit FitError(const std::string& msg) : std::runtime_error(msg) {}
};

class TuningError : public std::runtime_error {
  public:
    explicit TuningError(const std::string& msg) : std::runtime_error(msg) {}
};

class SamplingError : public std::runtime_error {
  public:
    explicit SamplingError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace driftmon
