#pragma once

#include <stdexcept>
#include <string>

namespace satnet {

// Hard failures are exceptions; recoverable conditions (NoRoute, ParseFailed,
// endpoint errors) are reported through optionals/status values instead so the
// training loop can degrade without unwinding.

struct TopologyInfeasible : std::runtime_error {
  explicit TopologyInfeasible(const std::string& what) : std::runtime_error(what) {}
};

struct NodeSetMismatch : std::runtime_error {
  explicit NodeSetMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownNode : std::runtime_error {
  explicit UnknownNode(const std::string& what) : std::runtime_error(what) {}
};

struct ShapeMismatch : std::runtime_error {
  explicit ShapeMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyBatch : std::runtime_error {
  explicit EmptyBatch(const std::string& what) : std::runtime_error(what) {}
};

struct NoForwardRecorded : std::runtime_error {
  explicit NoForwardRecorded(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : std::runtime_error {
  explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct SpecInvalid : std::runtime_error {
  explicit SpecInvalid(const std::string& what) : std::runtime_error(what) {}
};

struct TokenBudgetExceeded : std::runtime_error {
  explicit TokenBudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigInvalid : std::runtime_error {
  explicit ConfigInvalid(const std::string& what) : std::runtime_error(what) {}
};

struct OutputUnwritable : std::runtime_error {
  explicit OutputUnwritable(const std::string& what) : std::runtime_error(what) {}
};

struct ScenarioMismatch : std::runtime_error {
  explicit ScenarioMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct LogCorrupt : std::runtime_error {
  explicit LogCorrupt(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace satnet
