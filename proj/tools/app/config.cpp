#include "config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include <fmt/format.h>

namespace nipocpec::app {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double as_double(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    if (s == "-inf" || s == "-infinity") return -std::numeric_limits<double>::infinity();
  }
  throw ConfigError(fmt::format("config: '{}' must be a number", where));
}

Vec as_vec(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(fmt::format("config: '{}' must be an array of numbers", where));
  Vec v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = as_double(j[i], fmt::format("{}[{}]", where, i));
  return v;
}

// Object reader that remembers which keys were consumed.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object())
      throw ConfigError(fmt::format("config: '{}' must be an object", path_.empty() ? "<root>" : path_));
  }

  const json* find(const std::string& key) {
    known_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void read(const std::string& key, double& out) {
    if (auto* v = find(key)) out = as_double(*v, where(key));
  }
  void read(const std::string& key, int& out) {
    if (auto* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(fmt::format("config: '{}' must be an integer", where(key)));
      out = v->get<int>();
    }
  }
  void read(const std::string& key, std::uint64_t& out) {
    if (auto* v = find(key)) {
      if (!v->is_number_integer() || v->get<long long>() < 0)
        throw ConfigError(fmt::format("config: '{}' must be a nonnegative integer", where(key)));
      out = v->get<std::uint64_t>();
    }
  }
  void read(const std::string& key, bool& out) {
    if (auto* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(fmt::format("config: '{}' must be true or false", where(key)));
      out = v->get<bool>();
    }
  }
  void read(const std::string& key, std::string& out) {
    if (auto* v = find(key)) {
      if (!v->is_string()) throw ConfigError(fmt::format("config: '{}' must be a string", where(key)));
      out = v->get<std::string>();
    }
  }
  void read(const std::string& key, Vec& out) {
    if (auto* v = find(key)) out = as_vec(*v, where(key));
  }

  std::string where(const std::string& key) const { return join(path_, key); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!known_.count(it.key()))
        throw ConfigError(fmt::format("config: unknown key '{}'", join(path_, it.key())));
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> known_;
};

void read_riccati(Section& sec, RiccatiOptions& r) {
  sec.read("max_condition", r.max_condition);
  sec.read("structural_shortcut", r.structural_shortcut);
  sec.read("inertia_correction", r.inertia_correction);
  sec.read("delta_init", r.delta_init);
  sec.read("delta_growth", r.delta_growth);
  sec.read("delta_decrease", r.delta_decrease);
  sec.read("delta_max", r.delta_max);
  sec.finish();
}

void read_solver(Section& sec, SolverOptions& o) {
  sec.read("k_max", o.k_max);
  sec.read("tol_primal", o.tol_primal);
  sec.read("tol_dual", o.tol_dual);
  sec.read("tol_max", o.tol_max);
  sec.read("s_init", o.s_init);
  sec.read("z_init", o.z_init);
  sec.read("s_final", o.s_final);
  sec.read("z_final", o.z_final);
  sec.read("kappa_st", o.kappa_st);
  sec.read("kappa_zt", o.kappa_zt);
  sec.read("kappa_se", o.kappa_se);
  sec.read("kappa_ze", o.kappa_ze);
  sec.read("nu_j", o.nu_j);
  sec.read("nu_g", o.nu_g);
  sec.read("rho", o.rho);
  sec.read("beta0", o.beta0);
  sec.read("alpha_min", o.alpha_min);
  sec.read("nu_alpha", o.nu_alpha);
  sec.read("nu_d", o.nu_d);
  sec.read("soc_enabled", o.soc_enabled);
  sec.read("nu_sc", o.nu_sc);
  sec.read("nu_m", o.nu_m);
  sec.read("lambda_max", o.lambda_max);
  sec.read("j_max", o.j_max);
  if (auto* r = sec.find("riccati")) {
    Section rs(*r, sec.where("riccati"));
    read_riccati(rs, o.riccati);
  }
  sec.finish();
}

QuadraticCostSpec default_cost(const std::string& name) {
  if (name == "affine_dvi") return affine_dvi_default_cost();
  if (name == "cartpole_friction") return cartpole_default_cost();
  throw ConfigError(fmt::format("config: unknown problem '{}'", name));
}

BoxBounds default_box(const std::string& name) {
  if (name == "affine_dvi") return affine_dvi_default_box();
  if (name == "cartpole_friction") return cartpole_default_box();
  throw ConfigError(fmt::format("config: unknown problem '{}'", name));
}

void read_problem(const json& j, ProblemConfig& p) {
  if (j.is_string()) {
    p.name = j.get<std::string>();
    default_cost(p.name);
    return;
  }
  Section sec(j, "problem");
  sec.read("name", p.name);
  default_cost(p.name);
  if (auto* v = sec.find("N")) {
    int n = 0;
    if (!v->is_number_integer() || (n = v->get<int>()) < 1)
      throw ConfigError("config: 'problem.N' must be a positive integer");
    p.N = n;
  }
  if (auto* v = sec.find("dt")) {
    const double dt = as_double(*v, "problem.dt");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("config: 'problem.dt' must be positive");
    p.dt = dt;
  }
  if (auto* v = sec.find("cost")) {
    Section cs(*v, "problem.cost");
    QuadraticCostSpec c = default_cost(p.name);
    cs.read("Q_T", c.Q_T);
    cs.read("Q_x", c.Q_x);
    cs.read("Q_tau", c.Q_tau);
    cs.read("Q_p", c.Q_p);
    cs.read("x_e", c.x_e);
    cs.finish();
    p.cost = c;
  }
  if (auto* v = sec.find("box")) {
    Section bs(*v, "problem.box");
    BoxBounds b = default_box(p.name);
    bs.read("x_lo", b.x_lo);
    bs.read("x_hi", b.x_hi);
    bs.read("tau_lo", b.tau_lo);
    bs.read("tau_hi", b.tau_hi);
    bs.finish();
    p.box = b;
  }
  if (auto* v = sec.find("cartpole")) {
    if (p.name != "cartpole_friction")
      throw ConfigError("config: 'problem.cartpole' only applies to cartpole_friction");
    Section ps(*v, "problem.cartpole");
    ps.read("cart_mass", p.cartpole.cart_mass);
    ps.read("pole_mass", p.cartpole.pole_mass);
    ps.read("pole_length", p.cartpole.pole_length);
    ps.read("gravity", p.cartpole.gravity);
    ps.read("friction_coefficient", p.cartpole.friction_coefficient);
    ps.finish();
  }
  sec.finish();
}

void read_guess(Section& sec, InitialGuessConfig& g) {
  std::string mode = "cold";
  sec.read("mode", mode);
  if (mode == "cold")
    g.mode = GuessMode::kCold;
  else if (mode == "random")
    g.mode = GuessMode::kRandom;
  else if (mode == "file")
    g.mode = GuessMode::kFile;
  else
    throw ConfigError(fmt::format("config: 'initial_guess.mode' must be cold, random or file, got '{}'", mode));
  sec.read("seed", g.seed);
  sec.read("range", g.range);
  sec.read("path", g.path);
  sec.finish();
  if (!(g.range >= 0.0)) throw ConfigError("config: 'initial_guess.range' must be nonnegative");
  if (g.mode == GuessMode::kFile && g.path.empty())
    throw ConfigError("config: 'initial_guess.path' is required for mode 'file'");
}

void read_output(Section& sec, OutputConfig& o) {
  sec.read("dir", o.dir);
  sec.read("trajectory", o.trajectory);
  sec.read("history", o.history);
  sec.read("summary", o.summary);
  sec.finish();
}

// Shared by both parsers; a solve still validates the sweep section.
RunConfig parse(const json& doc, SweepConfig* sweep) {
  SweepConfig unused;
  if (!sweep) sweep = &unused;
  Section root(doc, "");
  RunConfig cfg;
  if (auto* v = root.find("problem")) read_problem(*v, cfg.problem);
  if (auto* v = root.find("solver")) {
    Section s(*v, "solver");
    read_solver(s, cfg.solver);
  }
  if (auto* v = root.find("initial_guess")) {
    Section s(*v, "initial_guess");
    read_guess(s, cfg.initial_guess);
  }
  if (auto* v = root.find("output")) {
    Section s(*v, "output");
    read_output(s, cfg.output);
  }
  root.read("quiet", cfg.quiet);
  root.read("check_tol", cfg.check_tol);
  if (auto* v = root.find("sweep")) {
    Section s(*v, "sweep");
    if (auto* sf = s.find("s_final")) {
      const Vec values = as_vec(*sf, "sweep.s_final");
      sweep->s_final.assign(values.data(), values.data() + values.size());
    }
    s.read("seeds", sweep->seeds);
    s.read("first_seed", sweep->first_seed);
    s.read("range", sweep->range);
    s.read("threads", sweep->threads);
    s.finish();
  }
  root.finish();

  try {
    cfg.solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("config: solver: {}", e.what()));
  }
  if (!(cfg.check_tol > 0.0)) throw ConfigError("config: 'check_tol' must be positive");
  return cfg;
}

}  // namespace

DiscretizedOCPEC ProblemConfig::build() const {
  const auto [N0, dt0] = default_horizon(name);
  const int n = N.value_or(N0);
  const double h = dt.value_or(dt0);
  try {
    if (name == "affine_dvi")
      return affine_dvi(n, h, cost.value_or(affine_dvi_default_cost()), box.value_or(affine_dvi_default_box()));
    if (name == "cartpole_friction")
      return cartpole_friction(n, h, cost.value_or(cartpole_default_cost()), cartpole,
                               box.value_or(cartpole_default_box()));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("config: problem '{}': {}", name, e.what()));
  }
  throw ConfigError(fmt::format("config: unknown problem '{}'", name));
}

void SweepConfig::validate() const {
  if (s_final.empty()) throw ConfigError("config: 'sweep.s_final' must not be empty");
  for (double v : s_final)
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("config: 'sweep.s_final' values must be positive");
  if (seeds < 1) throw ConfigError("config: 'sweep.seeds' must be at least 1");
  if (!(range >= 0.0)) throw ConfigError("config: 'sweep.range' must be nonnegative");
  if (threads < 0) throw ConfigError("config: 'sweep.threads' must be nonnegative");
  for (double v : s_final) {
    SolverOptions o = run.solver;
    set_final_perturbation(o, v);
    try {
      o.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(fmt::format("config: sweep s* = {}: {}", v, e.what()));
    }
  }
}

RunConfig parse_run_config(const json& doc) { return parse(doc, nullptr); }

SweepConfig parse_sweep_config(const json& doc) {
  SweepConfig sweep;
  sweep.run = parse(doc, &sweep);
  sweep.validate();
  return sweep;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("config: cannot open '{}'", path));
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("config: {}: {}", path, e.what()));
  }
}

RunConfig load_run_config(const std::string& path) { return parse_run_config(read_json_file(path)); }

SweepConfig load_sweep_config(const std::string& path) {
  return parse_sweep_config(read_json_file(path));
}

void set_final_perturbation(SolverOptions& options, double value) {
  options.s_final = value;
  options.z_final = value;
}

}  // namespace nipocpec::app
