#pragma once

#include <stdexcept>
#include <string>

namespace coauthornet {

// Every failure raised by the library derives from Error. The CLI maps the
// concrete type onto its exit-code contract.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error { using Error::Error; };
class BoundsError : public Error { using Error::Error; };
class ConstructionError : public Error { using Error::Error; };
class IoError : public Error { using Error::Error; };
class FormatError : public Error { using Error::Error; };
class SchemaError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };
class EmptyCorpusError : public Error { using Error::Error; };
class ConsistencyError : public Error { using Error::Error; };
class UnavailableMetricsError : public Error { using Error::Error; };
class SamplingExhaustedError : public Error { using Error::Error; };
class UndefinedMetricError : public Error { using Error::Error; };
class LookupError : public Error { using Error::Error; };

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, int epoch = -1)
      : Error(what), epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

}  // namespace coauthornet
