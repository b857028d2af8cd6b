#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "nipocpec/io.hpp"

namespace nipocpec::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error(fmt::format("cannot create output directory '{}': {}", dir, ec.message()));
}

// Write to a temporary name first so readers never see partial files.
template <class Writer>
void write_atomically(const fs::path& path, Writer&& writer) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", tmp.string()));
    writer(out);
    out.flush();
    if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", tmp.string()));
  }
  fs::rename(tmp, path);
}

json number(double v) { return std::isfinite(v) ? json(v) : json(fmt::format("{}", v)); }

}  // namespace

int exit_code(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return kExitOptimal;
    case SolveStatus::kMaxIterations:
      return kExitMaxIterations;
    case SolveStatus::kRestorationFailed:
      return kExitRestorationFailed;
    case SolveStatus::kEvaluatorError:
      return kExitEvaluatorError;
  }
  return kExitEvaluatorError;
}

json summary_json(const std::string& problem, const SolveReport& r, const SolutionMetrics& m,
                  const std::vector<ModeInterval>& modes) {
  json j;
  j["problem"] = problem;
  j["status"] = std::string(to_string(r.status));
  j["exit_code"] = exit_code(r.status);
  j["message"] = r.message;
  j["iterations"] = r.iterations;
  j["accepted_steps"] = r.accepted_steps;
  j["final_cost"] = number(r.final_cost);
  j["final_primal_inf"] = number(r.final_primal_inf);
  j["final_dual_inf"] = number(r.final_dual_inf);
  j["metrics"] = {{"r_eq", number(m.r_eq)},
                  {"r_ineq", number(m.r_ineq)},
                  {"r_comp", number(m.r_comp)},
                  {"cost", number(m.cost)}};
  j["s"] = r.s;
  j["z"] = r.z;
  j["termination"] = {{"stop", r.termination.stop},
                      {"primal", r.termination.primal},
                      {"dual", r.termination.dual},
                      {"max", r.termination.max},
                      {"single_branch", r.termination.single_branch()}};
  j["restorations"] = json::array();
  for (const auto& e : r.restorations)
    j["restorations"].push_back({{"iteration", e.iteration},
                                 {"status", e.status == RestorationStatus::kRestored ? "restored" : "failed"},
                                 {"inner_iterations", e.inner_iterations},
                                 {"violation_before", number(e.violation_before)},
                                 {"violation_after", number(e.violation_after)}});
  j["factorizations"] = r.factorizations;
  j["resolves"] = r.resolves;
  j["wall_time"] = r.wall_time;
  j["modes"] = json::array();
  for (const auto& iv : modes) {
    json names = json::array();
    for (Mode mode : iv.modes) names.push_back(std::string(to_string(mode)));
    j["modes"].push_back({{"modes", names}, {"start", iv.start}, {"end", iv.end}});
  }
  return j;
}

Iterate initial_guess(const DiscretizedOCPEC& problem, const InitialGuessConfig& g) {
  switch (g.mode) {
    case GuessMode::kCold:
      return cold_start(problem);
    case GuessMode::kRandom:
      return random_initial_guess(problem, g.seed, g.range);
    case GuessMode::kFile:
      return read_trajectory(g.path, problem.dims()).y;
  }
  return cold_start(problem);
}

int run_solve_command(const RunConfig& config, std::ostream& log) {
  const DiscretizedOCPEC problem = config.problem.build();
  const Iterate y0 = initial_guess(problem, config.initial_guess);
  const SolveReport report = solve(problem, y0, config.solver);
  const SolutionMetrics metrics = evaluate_solution_metrics(problem, report.y);
  const auto modes = problem.dims().np > 0 ? extract_mode_sequence(problem, report.y)
                                           : std::vector<ModeInterval>{};

  const fs::path dir(config.output.dir);
  ensure_dir(config.output.dir);
  if (config.output.trajectory)
    write_atomically(dir / "trajectory.csv",
                     [&](std::ostream& out) { write_trajectory(out, report.y, problem.x0()); });
  if (config.output.history)
    write_atomically(dir / "history.csv", [&](std::ostream& out) { write_history(out, report.history); });
  if (config.output.summary)
    write_atomically(dir / "summary.json", [&](std::ostream& out) {
      out << summary_json(config.problem.name, report, metrics, modes).dump(2) << '\n';
    });

  if (!config.quiet) {
    fmt::print(log, "{}: {} after {} iterations ({:.3f} s)\n", config.problem.name,
               to_string(report.status), report.iterations, report.wall_time);
    fmt::print(log, "cost {:.10g}  r_eq {:.3e}  r_ineq {:.3e}  r_comp {:.3e}\n", metrics.cost,
               metrics.r_eq, metrics.r_ineq, metrics.r_comp);
    if (report.termination.single_branch())
      fmt::print(log, "note: termination held through a single branch of the stopping test\n");
    if (!report.message.empty()) fmt::print(log, "{}\n", report.message);
  }
  return exit_code(report.status);
}

int sweep_threads(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv(kThreadsEnv)) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) n = std::min<long>(n, cap);
  }
  return std::max(n, 1);
}

std::vector<SweepCell> run_sweep(const DiscretizedOCPEC& problem, const SweepConfig& config,
                                 int threads) {
  std::vector<SweepCell> cells;
  for (double sf : config.s_final)
    for (int i = 0; i < config.seeds; ++i) {
      SweepCell cell;
      cell.s_final = sf;
      cell.seed = config.first_seed + i;
      cells.push_back(cell);
    }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      SweepCell& cell = cells[i];
      SolverOptions options = config.run.solver;
      set_final_perturbation(options, cell.s_final);
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const SolveReport r = solve(problem, random_initial_guess(problem, cell.seed, config.range), options);
        cell.status = r.status;
        cell.iterations = r.iterations;
        cell.error = r.message;
      } catch (const std::exception& e) {
        cell.status = SolveStatus::kEvaluatorError;
        cell.error = e.what();
      }
      cell.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return cells;
}

std::vector<SweepRow> aggregate_sweep(const std::vector<SweepCell>& cells,
                                      const std::vector<double>& s_final) {
  std::vector<SweepRow> rows;
  for (double sf : s_final) {
    SweepRow row;
    row.s_final = sf;
    double iters = 0.0;
    double time = 0.0;
    for (const auto& c : cells) {
      if (c.s_final != sf) continue;
      ++row.attempts;
      time += c.wall_time;
      if (c.status == SolveStatus::kOptimal) {
        ++row.successes;
        iters += c.iterations;
      }
    }
    row.mean_iterations = row.successes ? iters / row.successes : 0.0;
    row.mean_wall_time = row.attempts ? time / row.attempts : 0.0;
    rows.push_back(row);
  }
  return rows;
}

int run_sweep_command(const SweepConfig& config, std::ostream& log) {
  config.validate();
  const DiscretizedOCPEC problem = config.run.problem.build();
  const int threads = sweep_threads(config.threads);
  const auto cells = run_sweep(problem, config, threads);
  const auto rows = aggregate_sweep(cells, config.s_final);

  const fs::path dir(config.run.output.dir);
  ensure_dir(config.run.output.dir);
  write_atomically(dir / "sweep.csv", [&](std::ostream& out) {
    out << "s_final,successes,attempts,mean_iterations,mean_wall_time\n";
    for (const auto& r : rows)
      fmt::print(out, "{:.17g},{},{},{:.17g},{:.17g}\n", r.s_final, r.successes, r.attempts,
                 r.mean_iterations, r.mean_wall_time);
  });
  write_atomically(dir / "sweep_runs.csv", [&](std::ostream& out) {
    out << "s_final,seed,status,iterations,wall_time\n";
    for (const auto& c : cells)
      fmt::print(out, "{:.17g},{},{},{},{:.17g}\n", c.s_final, c.seed, to_string(c.status), c.iterations,
                 c.wall_time);
  });

  if (!config.run.quiet) {
    fmt::print(log, "{} sweep, {} seeds per s*, {} thread(s)\n", config.run.problem.name, config.seeds, threads);
    fmt::print(log, "{:>10} {:>9} {:>10} {:>10}\n", "s*", "success", "mean iter", "mean time");
    for (const auto& r : rows)
      fmt::print(log, "{:>10.1e} {:>5}/{:<3} {:>10.1f} {:>10.3f}\n", r.s_final, r.successes, r.attempts,
                 r.mean_iterations, r.mean_wall_time);
  }
  return kExitOptimal;
}

bool CheckOutcome::passed() const {
  return derivatives.passed() &&
         std::all_of(self_tests.begin(), self_tests.end(), [](const auto& t) { return t.passed; });
}

CheckOutcome run_checks(const DiscretizedOCPEC& problem, std::uint64_t seed, double tol) {
  CheckOutcome out;
  DerivativeCheckOptions opts;
  opts.tol = tol;
  opts.seed = seed;
  out.derivatives = check_derivatives(problem, random_initial_guess(problem, seed), opts);
  out.self_tests.push_back(fb_self_test());
  out.self_tests.push_back(riccati_self_test(50, seed));
  return out;
}

void print_check(std::ostream& out, const CheckOutcome& c) {
  for (const auto& [name, err] : c.derivatives.max_error)
    fmt::print(out, "derivative {:<20} max rel. error {:.3e}  {}\n", name, err,
               err <= c.derivatives.tol ? "ok" : "FAIL");
  const std::size_t shown = std::min<std::size_t>(c.derivatives.flagged.size(), 20);
  for (std::size_t i = 0; i < shown; ++i) {
    const auto& f = c.derivatives.flagged[i];
    fmt::print(out, "  flagged {} stage {} entry ({}, {}): supplied {:.10g}, finite difference {:.10g}\n",
               f.function, f.stage, f.row, f.col, f.supplied, f.finite_difference);
  }
  if (c.derivatives.flagged.size() > shown)
    fmt::print(out, "  ... {} more flagged entries\n", c.derivatives.flagged.size() - shown);
  for (const auto& t : c.self_tests)
    fmt::print(out, "self-test {:<20} {} cases, worst {:.3e}  {}{}\n", t.name, t.cases, t.worst,
               t.passed ? "ok" : "FAIL", t.detail.empty() ? "" : "  (" + t.detail + ")");
}

int run_check_command(const RunConfig& config, std::ostream& log) {
  const DiscretizedOCPEC problem = config.problem.build();
  const std::uint64_t seed =
      config.initial_guess.mode == GuessMode::kRandom ? config.initial_guess.seed : 0;
  const CheckOutcome outcome = run_checks(problem, seed, config.check_tol);
  if (!config.quiet || !outcome.passed()) print_check(log, outcome);
  return outcome.passed() ? kExitOptimal : kExitCheckFailed;
}

}  // namespace nipocpec::app
