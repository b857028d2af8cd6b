#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "config.hpp"
#include "nipocpec/benchmarks.hpp"
#include "nipocpec/derivative_check.hpp"
#include "nipocpec/self_test.hpp"

namespace nipocpec::app {

enum ExitCode : int {
  kExitOptimal = 0,
  kExitMaxIterations = 1,
  kExitRestorationFailed = 2,
  kExitEvaluatorError = 3,
  kExitConfigError = 4,
  kExitCheckFailed = 5,
};

int exit_code(SolveStatus status);

/// Environment variable capping the number of sweep threads.
inline constexpr const char* kThreadsEnv = "NIPOCPEC_THREADS";

nlohmann::json summary_json(const std::string& problem, const SolveReport& report,
                            const SolutionMetrics& metrics, const std::vector<ModeInterval>& modes);

Iterate initial_guess(const DiscretizedOCPEC& problem, const InitialGuessConfig& config);

/// Solves, writes trajectory.csv, history.csv and summary.json into the output
/// directory and returns the exit code of the final status.
int run_solve_command(const RunConfig& config, std::ostream& log);

struct SweepCell {
  double s_final = 0.0;
  std::uint64_t seed = 0;
  SolveStatus status = SolveStatus::kMaxIterations;
  int iterations = 0;
  double wall_time = 0.0;
  std::string error;
};

struct SweepRow {
  double s_final = 0.0;
  int successes = 0;
  int attempts = 0;
  double mean_iterations = 0.0;
  double mean_wall_time = 0.0;
};

/// Runs every (s*, seed) cell, each from its own random start. Cells are
/// independent; results come back in (s*, seed) order whatever the thread
/// count.
std::vector<SweepCell> run_sweep(const DiscretizedOCPEC& problem, const SweepConfig& config,
                                 int threads);
std::vector<SweepRow> aggregate_sweep(const std::vector<SweepCell>& cells,
                                      const std::vector<double>& s_final);
int sweep_threads(int requested);

/// Writes sweep.csv (aggregated) and sweep_runs.csv (per cell). Exit code 0
/// unless the configuration or output fails; solve failures are data.
int run_sweep_command(const SweepConfig& config, std::ostream& log);

struct CheckOutcome {
  DerivativeReport derivatives;
  std::vector<SelfTestResult> self_tests;
  bool passed() const;
};

/// Derivative validation of the problem at a seeded random point plus the FB
/// and linear-solver self-tests.
CheckOutcome run_checks(const DiscretizedOCPEC& problem, std::uint64_t seed, double tol);
void print_check(std::ostream& out, const CheckOutcome& outcome);
int run_check_command(const RunConfig& config, std::ostream& log);

}  // namespace nipocpec::app
