#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "app/commands.hpp"
#include "nipocpec/io.hpp"
#include "support.hpp"

using namespace nipocpec;
using namespace nipocpec::app;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("nipocpec_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(NIPOCPEC_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  REQUIRE(it != header.end());
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("trajectory round trip is bit-identical") {
    const auto p = affine_dvi(12, 0.01);
    Iterate y = random_initial_guess(p, 3, 2.0);
    y.data()(5) = 1.0 / 3.0;
    y.data()(7) = -1e-300;
    std::stringstream ss;
    write_trajectory(ss, y, p.x0());
    const Trajectory t = read_trajectory(ss, p.dims());
    CHECK(t.y.data() == y.data());
    CHECK(t.x0 == p.x0());
    REQUIRE(t.t.size() == 13);
    CHECK(t.t[0] == 0.0);
    CHECK(t.t[12] == doctest::Approx(0.12));
  }

  TEST_CASE("trajectory reader reports bad lines") {
    const auto p = affine_dvi(3, 0.01);
    std::stringstream ss;
    write_trajectory(ss, Iterate(p.dims()), p.x0());
    std::string text = ss.str();
    text.replace(text.rfind("0,"), 2, "x,");
    std::stringstream bad(text);
    try {
      read_trajectory(bad, p.dims());
      FAIL("expected an error");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
    std::stringstream wrong_dims(ss.str());
    CHECK_THROWS_AS(read_trajectory(wrong_dims, affine_dvi(4, 0.01).dims()), std::runtime_error);
  }

  TEST_CASE("trajectory header") {
    const auto h = trajectory_header(affine_dvi(3, 0.01).dims());
    CHECK(h.front() == "t");
    CHECK(h[1] == "x0");
    CHECK(std::count_if(h.begin(), h.end(), [](const std::string& s) { return s.rfind("gamma", 0) == 0; }) == 4);
  }

  TEST_CASE("config parsing") {
    const auto doc = nlohmann::json::parse(R"({
      "problem": {"name": "affine_dvi", "N": 50, "dt": 0.02, "cost": {"Q_x": [5, 5]}},
      "solver": {"s_final": 1e-5, "z_final": 1e-5, "k_max": 200, "riccati": {"delta_max": 1e8}},
      "initial_guess": {"mode": "random", "seed": 7, "range": 0.5},
      "output": {"dir": "somewhere", "history": false},
      "quiet": true
    })");
    const RunConfig c = parse_run_config(doc);
    CHECK(c.problem.N == 50);
    CHECK(c.solver.s_final == 1e-5);
    CHECK(c.solver.k_max == 200);
    CHECK(c.solver.riccati.delta_max == 1e8);
    CHECK(c.initial_guess.mode == GuessMode::kRandom);
    CHECK(c.initial_guess.seed == 7);
    CHECK_FALSE(c.output.history);
    CHECK(c.quiet);
    const auto p = c.problem.build();
    CHECK(p.dims().N == 50);
    CHECK(p.dims().dt == 0.02);
  }

  TEST_CASE("config errors name the key") {
    auto message = [](const char* text) {
      try {
        parse_run_config(nlohmann::json::parse(text));
      } catch (const ConfigError& e) {
        return std::string(e.what());
      }
      return std::string();
    };
    CHECK(message(R"({"solver": {"ns": 3}})").find("solver.ns") != std::string::npos);
    CHECK(message(R"({"solver": {"kappa_st": 2}})").find("kappa_st") != std::string::npos);
    CHECK(message(R"({"solver": {"k_max": "many"}})").find("k_max") != std::string::npos);
    CHECK(message(R"({"problem": "hopper"})").find("hopper") != std::string::npos);
    CHECK_FALSE(message(R"({"frobnicate": 1})").empty());
    CHECK(message(R"({"solver": {"s_final": 1e-3}})").empty());
  }

  TEST_CASE("sweep config") {
    const auto c = parse_sweep_config(nlohmann::json::parse(R"({"sweep": {"s_final": [1e-3, 1e-4], "seeds": 3}})"));
    CHECK(c.s_final.size() == 2);
    CHECK(c.seeds == 3);
    CHECK_THROWS_AS(parse_sweep_config(nlohmann::json::parse(R"({"sweep": {"s_final": [-1]}})")), ConfigError);
    CHECK_THROWS_AS(parse_sweep_config(nlohmann::json::parse(R"({"sweep": {"seeds": 0}})")), ConfigError);
  }

  TEST_CASE("exit codes are total and distinct") {
    std::set<int> codes;
    for (SolveStatus s : {SolveStatus::kOptimal, SolveStatus::kMaxIterations, SolveStatus::kRestorationFailed,
                          SolveStatus::kEvaluatorError}) {
      const int c = exit_code(s);
      CHECK((c == 0) == (s == SolveStatus::kOptimal));
      codes.insert(c);
    }
    CHECK(codes.size() == 4);
    CHECK(codes.count(kExitConfigError) == 0);
    CHECK(codes.count(kExitCheckFailed) == 0);
  }

  TEST_CASE("sweep results do not depend on the thread count") {
    const auto p = affine_dvi();
    SweepConfig c;
    c.s_final = {1e-3, 1e-6};
    c.seeds = 3;
    const auto a = run_sweep(p, c, 1), b = run_sweep(p, c, 3);
    REQUIRE(a.size() == 6);
    REQUIRE(b.size() == 6);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].s_final == b[i].s_final);
      CHECK(a[i].seed == b[i].seed);
      CHECK(a[i].status == b[i].status);
      CHECK(a[i].iterations == b[i].iterations);
    }
    const auto rows = aggregate_sweep(a, c.s_final);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].attempts == 3);
  }

  TEST_CASE("single cell sweep equals the single run") {
    const auto p = affine_dvi();
    SweepConfig c;
    c.s_final = {1e-4};
    c.seeds = 1;
    c.first_seed = 5;
    const auto cells = run_sweep(p, c, 1);
    const auto rows = aggregate_sweep(cells, c.s_final);
    REQUIRE(rows.size() == 1);
    const auto r = solve(p, random_initial_guess(p, 5), c.run.solver);
    CHECK(rows[0].attempts == 1);
    CHECK(rows[0].successes == (r.status == SolveStatus::kOptimal));
    CHECK(rows[0].mean_iterations == r.iterations);
  }

  TEST_CASE("thread cap from the environment") {
    ::setenv(kThreadsEnv, "2", 1);
    CHECK(sweep_threads(8) == 2);
    CHECK(sweep_threads(1) == 1);
    CHECK(sweep_threads(0) <= 2);
    ::unsetenv(kThreadsEnv);
    CHECK(sweep_threads(3) == 3);
    CHECK(sweep_threads(0) >= 1);
  }

  TEST_CASE("checks flag a corrupted derivative") {
    const auto p = affine_dvi(3, 0.01);
    CHECK(run_checks(p, 0, 1e-6).passed());
    const auto bad = run_checks(testing::corrupt_inequality_jacobian(p, 0, 0, 0.5), 0, 1e-6);
    CHECK_FALSE(bad.passed());
    std::stringstream out;
    print_check(out, bad);
    CHECK(out.str().find("G_z") != std::string::npos);
  }

  TEST_CASE("solve command writes its files") {
    const fs::path dir = scratch_dir("solve");
    RunConfig c;
    c.output.dir = dir.string();
    c.quiet = true;
    std::stringstream log;
    CHECK(run_solve_command(c, log) == kExitOptimal);
    const auto traj = read_csv(dir / "trajectory.csv");
    CHECK(traj.size() == 102);  // header + t = 0 + 100 stages
    const auto p = affine_dvi();
    const Trajectory t = read_trajectory((dir / "trajectory.csv").string(), p.dims());
    const auto r = solve(p, cold_start(p), c.solver);
    CHECK(t.y.data() == r.y.data());

    const auto hist = read_csv(dir / "history.csv");
    REQUIRE(hist.size() == static_cast<std::size_t>(r.iterations) + 1);
    const std::size_t sc = column_index(hist[0], "s");
    for (std::size_t i = 2; i < hist.size(); ++i) CHECK(std::stod(hist[i][sc]) <= std::stod(hist[i - 1][sc]));

    const auto summary = nlohmann::json::parse(read_file(dir / "summary.json"));
    CHECK(summary["status"] == "optimal");
    CHECK(summary["exit_code"] == 0);
    CHECK(summary["iterations"] == r.iterations);
    CHECK(summary["metrics"]["r_eq"].get<double>() <= 1e-4);
    CHECK(summary["modes"].size() == 4);
    for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().extension() != ".tmp");
  }

  TEST_CASE("command line interface") {
    const fs::path dir = scratch_dir("cli");
    const fs::path log = dir / "log.txt";

    write_file(dir / "good.json", R"({"problem": {"name": "affine_dvi"}, "solver": {"k_max": 500}})");
    CHECK(run_cli("solve --config " + (dir / "good.json").string() + " --out " + (dir / "out").string() + " --quiet", log) == 0);
    CHECK(read_csv(dir / "out" / "trajectory.csv").size() == 102);

    write_file(dir / "ns.json", R"({"solver": {"ns": 1}})");
    CHECK(run_cli("solve --config " + (dir / "ns.json").string() + " --out " + (dir / "x").string(), log) == kExitConfigError);
    CHECK(read_file(log).find("ns") != std::string::npos);

    write_file(dir / "syntax.json", "{\n  \"solver\": {\"k_max\": 5,}\n}");
    CHECK(run_cli("solve --config " + (dir / "syntax.json").string(), log) == kExitConfigError);
    CHECK(read_file(log).find("line 2") != std::string::npos);

    write_file(dir / "cap.json", R"({"solver": {"k_max": 3}})");
    CHECK(run_cli("solve --quiet --config " + (dir / "cap.json").string() + " --out " + (dir / "cap").string(), log) ==
          kExitMaxIterations);

    CHECK(run_cli("solve --s-final -1", log) == kExitConfigError);
    CHECK(run_cli("frobnicate", log) == kExitConfigError);
    CHECK(run_cli("--help", log) == 0);

    write_file(dir / "one.json", R"({"problem": {"name": "affine_dvi", "N": 1}})");
    CHECK(run_cli("check --quiet --config " + (dir / "one.json").string(), log) == 0);
    CHECK(run_cli("check --quiet", log) == 0);

    write_file(dir / "sweep.json", R"({"sweep": {"s_final": [1e-3, 1e-4], "seeds": 2}})");
    CHECK(run_cli("sweep --quiet --config " + (dir / "sweep.json").string() + " --out " + (dir / "sw").string(), log) == 0);
    const auto rows = read_csv(dir / "sw" / "sweep.csv");
    REQUIRE(rows.size() == 3);
    CHECK(rows[0][0] == "s_final");
    CHECK(rows[1][2] == "2");
    CHECK(read_csv(dir / "sw" / "sweep_runs.csv").size() == 5);
  }
}
