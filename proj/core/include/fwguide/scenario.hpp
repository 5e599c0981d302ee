#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fwguide/analysis.hpp"
#include "fwguide/laws.hpp"
#include "fwguide/world.hpp"

namespace fwguide {

class ConfigError : public std::runtime_error {
 public:
  enum class Kind { Parse, Schema, Physics, Io };

  ConfigError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string_view to_string(ConfigError::Kind kind);

struct InitialPosition {
  enum class Kind { Explicit, RandomBox, RandomBall };

  Kind kind = Kind::Explicit;
  Vec point;  // Explicit
  Vec lower;  // RandomBox
  Vec upper;

  bool operator==(const InitialPosition&) const = default;
};

struct Scenario {
  std::string name;
  int dimension = 2;
  BeaconField field;
  AgentModel model = AgentModel::SingleIntegrator;
  ControlLaw law;
  NoiseModel noise;
  InitialPosition initial;
  std::optional<Vec> initial_velocity;
  double dt = 1e-3;
  double horizon = 10.0;
  int record_stride = 10;
  double eps_guard = 1e-3;
  std::uint64_t seed = 1;
  CertificateOptions certificate;

  bool operator==(const Scenario&) const = default;
};

/// Parses and validates a scenario document. Throws ConfigError.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

/// Serialises every field, defaults included.
std::string dump_scenario(const Scenario& scenario);

/// Schema and physics checks. Throws ConfigError.
void validate(const Scenario& scenario);

// Portable uniform draws: mt19937_64 with the top 53 bits mapped to [0, 1).
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed);
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

/// p(0) for the scenario: the explicit point, or a seeded draw in the box or
/// in the ball of radius min d_i* - eps_guard around the optimum. Draws
/// closer than eps_guard to a beacon are rejected.
Vec resolve_initial_position(const Scenario& scenario);

SimConfig to_sim_config(const Scenario& scenario);

}  // namespace fwguide
