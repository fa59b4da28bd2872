#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dualsmooth/penalty.hpp"
#include "dualsmooth/simulate.hpp"
#include "dualsmooth/solver.hpp"

namespace dualsmooth {

// Scenario input error; message carries the JSON path or line context.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MeasurementSource {
  enum class Kind { File, Simulate };
  Kind kind = Kind::Simulate;
  std::string file;  // relative to the scenario directory
  NoiseSpec process_noise;
  NoiseSpec measurement_noise;
  std::uint64_t seed = 0;
};

struct Scenario {
  std::shared_ptr<const LinearSystem> system;
  std::vector<PenaltyPtr> process_penalties;      // T+1 entries
  std::vector<PenaltyPtr> measurement_penalties;  // T+1 entries
  MeasurementSource measurements;
  SolverOptions solver;
  std::string base_dir;
};

Scenario load_scenario(const std::string& path);

// Measurement supervector from the scenario source: read the CSV or run
// the seeded simulation (seed_override wins over the scenario seed).
Supervector resolve_measurements(
    const Scenario& s,
    std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace dualsmooth
