#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nipocpec/benchmarks.hpp"
#include "nipocpec/solver.hpp"

namespace nipocpec::app {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProblemConfig {
  std::string name = "affine_dvi";
  std::optional<int> N;
  std::optional<double> dt;
  /// Defaults of the named benchmark with these entries replaced.
  std::optional<QuadraticCostSpec> cost;
  std::optional<BoxBounds> box;
  CartPoleParams cartpole;

  DiscretizedOCPEC build() const;
};

enum class GuessMode { kCold, kRandom, kFile };

struct InitialGuessConfig {
  GuessMode mode = GuessMode::kCold;
  std::uint64_t seed = 0;
  double range = 1.0;
  std::string path;
};

struct OutputConfig {
  std::string dir = "out";
  bool trajectory = true;
  bool history = true;
  bool summary = true;
};

struct RunConfig {
  ProblemConfig problem;
  SolverOptions solver;
  InitialGuessConfig initial_guess;
  OutputConfig output;
  bool quiet = false;
  /// Finite-difference tolerance of the check command.
  double check_tol = 1e-6;
};

struct SweepConfig {
  RunConfig run;
  std::vector<double> s_final{1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
  int seeds = 20;
  std::uint64_t first_seed = 0;
  double range = 1.0;
  /// 0 means one thread per core, capped by NIPOCPEC_THREADS.
  int threads = 0;

  void validate() const;
};

/// Parses a configuration document. Unknown keys, wrong types and invalid
/// values raise ConfigError naming the dotted key path.
RunConfig parse_run_config(const nlohmann::json& doc);
SweepConfig parse_sweep_config(const nlohmann::json& doc);

RunConfig load_run_config(const std::string& path);
SweepConfig load_sweep_config(const std::string& path);

/// Reads a JSON file, reporting syntax errors with line and column.
nlohmann::json read_json_file(const std::string& path);

/// Sets s* and z* together.
void set_final_perturbation(SolverOptions& options, double value);

}  // namespace nipocpec::app
