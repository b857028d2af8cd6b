#include "nipocpec/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <unsupported/Eigen/AutoDiff>

#include "nipocpec/kkt.hpp"

namespace nipocpec {

namespace {

bool positive(const Vec& v) { return v.size() == 0 || v.minCoeff() > 0.0; }

void check_size(const Vec& v, int n, const char* name) {
  if (v.size() != n) {
    throw DimensionError(std::string("cost: ") + name + " has length " + std::to_string(v.size()) +
                         ", expected " + std::to_string(n));
  }
}

Vec reference(const QuadraticCostSpec& cost, double t) {
  return cost.x_ref ? cost.x_ref(t) : cost.x_e;
}

SmoothCost stage_cost(const QuadraticCostSpec& c, int nx, int ntau, int np) {
  Vec diag(nx + ntau + np);
  diag << c.Q_x, c.Q_tau, c.Q_p;
  SmoothCost s;
  s.value = [c, diag, nx](double t, const Vec& y) {
    Vec d = y;
    d.head(nx) -= reference(c, t);
    return d.dot(diag.asDiagonal() * d);
  };
  s.gradient = [c, diag, nx](double t, const Vec& y) {
    Vec d = y;
    d.head(nx) -= reference(c, t);
    return Vec(2.0 * diag.asDiagonal() * d);
  };
  s.hessian = [diag](double, const Vec&) { return Mat(Mat(2.0 * diag.asDiagonal())); };
  return s;
}

SmoothCost terminal_cost(const QuadraticCostSpec& c, int nx, int ny) {
  SmoothCost s;
  s.value = [c, nx](double, const Vec& y) {
    const Vec d = y.head(nx) - c.x_e;
    return d.dot(c.Q_T.asDiagonal() * d);
  };
  s.gradient = [c, nx, ny](double, const Vec& y) {
    Vec g = Vec::Zero(ny);
    g.head(nx) = 2.0 * c.Q_T.asDiagonal() * (y.head(nx) - c.x_e);
    return g;
  };
  s.hessian = [c, nx, ny](double, const Vec&) {
    Mat h = Mat::Zero(ny, ny);
    h.topLeftCorner(nx, nx) = 2.0 * c.Q_T.asDiagonal();
    return h;
  };
  return s;
}

SmoothMap affine_map(Mat A, Vec b) {
  SmoothMap m;
  m.rows = static_cast<int>(A.rows());
  m.value = [A, b](const Vec& y) { return Vec(A * y + b); };
  m.jacobian = [A](const Vec&) { return A; };
  return m;
}

SmoothMap box_map(const BoxBounds& box, int nx, int ntau, int np) {
  const int ny = nx + ntau + np;
  Mat A;
  std::vector<Vec> arows;
  std::vector<double> offs;
  auto add = [&](int col, double sign, double bound) {
    if (!std::isfinite(bound)) return;
    Vec r = Vec::Zero(ny);
    r(col) = sign;
    arows.push_back(r);
    offs.push_back(-sign * bound);
  };
  for (int i = 0; i < box.x_lo.size(); ++i) add(i, 1.0, box.x_lo(i));
  for (int i = 0; i < box.x_hi.size(); ++i) add(i, -1.0, box.x_hi(i));
  for (int i = 0; i < box.tau_lo.size(); ++i) add(nx + i, 1.0, box.tau_lo(i));
  for (int i = 0; i < box.tau_hi.size(); ++i) add(nx + i, -1.0, box.tau_hi(i));
  A.resize(static_cast<long>(arows.size()), ny);
  Vec b(static_cast<long>(offs.size()));
  for (size_t i = 0; i < arows.size(); ++i) {
    A.row(static_cast<long>(i)) = arows[i].transpose();
    b(static_cast<long>(i)) = offs[i];
  }
  return affine_map(A, b);
}

void check_box(const BoxBounds& box, int nx, int ntau) {
  check_size(box.x_lo, nx, "x_lo");
  check_size(box.x_hi, nx, "x_hi");
  check_size(box.tau_lo, ntau, "tau_lo");
  check_size(box.tau_hi, ntau, "tau_hi");
}

// cart-pole right-hand side on y = (x_c, theta, xdot_c, thetadot, tau, p)
template <class T>
Eigen::Matrix<T, 4, 1> cartpole_rhs(const Eigen::Matrix<T, 6, 1>& y, const CartPoleParams& c) {
  using std::cos;
  using std::sin;
  const T& th = y(1);
  const T& xd = y(2);
  const T& thd = y(3);
  const T& force = y(4);
  const T& friction = y(5);
  const double mc = c.cart_mass, mp = c.pole_mass, l = c.pole_length, g = c.gravity;
  const T cs = cos(th);
  const T sn = sin(th);
  // M qdd = rhs
  const T m11 = T(mc + mp);
  const T m12 = mp * l * cs;
  const T m22 = T(mp * l * l);
  const T r1 = force + friction + mp * l * sn * thd * thd;
  const T r2 = -mp * g * l * sn;
  const T det = m11 * m22 - m12 * m12;
  Eigen::Matrix<T, 4, 1> out;
  out(0) = xd;
  out(1) = thd;
  out(2) = (m22 * r1 - m12 * r2) / det;
  out(3) = (m11 * r2 - m12 * r1) / det;
  return out;
}

using Inner = Eigen::AutoDiffScalar<Eigen::Matrix<double, 6, 1>>;
using Outer = Eigen::AutoDiffScalar<Eigen::Matrix<Inner, 6, 1>>;

Mat cartpole_jacobian(const Vec& y, const CartPoleParams& c) {
  Eigen::Matrix<Inner, 6, 1> ad;
  for (int i = 0; i < 6; ++i) ad(i) = Inner(y(i), 6, i);
  const auto f = cartpole_rhs<Inner>(ad, c);
  Mat jac(4, 6);
  for (int r = 0; r < 4; ++r) jac.row(r) = f(r).derivatives().transpose();
  return jac;
}

Mat cartpole_weighted_hessian(const Vec& y, const Vec& weights, const CartPoleParams& c) {
  Eigen::Matrix<Outer, 6, 1> ad;
  for (int i = 0; i < 6; ++i) {
    ad(i).value() = Inner(y(i), 6, i);
    ad(i).derivatives() = Eigen::Matrix<Inner, 6, 1>::Unit(6, i);
    for (int j = 0; j < 6; ++j) ad(i).derivatives()(j).derivatives().setZero();
  }
  const auto f = cartpole_rhs<Outer>(ad, c);
  Outer s = f(0) * weights(0);
  for (int r = 1; r < 4; ++r) s += f(r) * weights(r);
  Mat h(6, 6);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) h(i, j) = s.derivatives()(i).derivatives()(j);
  }
  return 0.5 * (h + h.transpose());
}

}  // namespace

void QuadraticCostSpec::validate(int nx, int ntau, int np) const {
  check_size(Q_T, nx, "Q_T");
  check_size(Q_x, nx, "Q_x");
  check_size(Q_tau, ntau, "Q_tau");
  check_size(Q_p, np, "Q_p");
  check_size(x_e, nx, "x_e");
  if (!positive(Q_T) || !positive(Q_x) || !positive(Q_tau) || !positive(Q_p)) {
    throw std::invalid_argument("cost: weights must be positive");
  }
}

std::function<Vec(double)> interpolated_reference(std::vector<double> times,
                                                  std::vector<Vec> states) {
  if (times.empty() || times.size() != states.size()) {
    throw std::invalid_argument("interpolated_reference: need matching, nonempty knots");
  }
  if (!std::is_sorted(times.begin(), times.end())) {
    throw std::invalid_argument("interpolated_reference: knot times must be sorted");
  }
  return [times = std::move(times), states = std::move(states)](double t) -> Vec {
    if (t <= times.front()) return states.front();
    if (t >= times.back()) return states.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const size_t i = static_cast<size_t>(it - times.begin());
    const double a = (t - times[i - 1]) / (times[i] - times[i - 1]);
    return (1.0 - a) * states[i - 1] + a * states[i];
  };
}

QuadraticCostSpec affine_dvi_default_cost() {
  QuadraticCostSpec c;
  c.Q_T = Vec::Constant(2, 10.0);
  c.Q_x = Vec::Constant(2, 10.0);
  c.Q_tau = Vec::Constant(1, 0.1);
  c.Q_p = Vec::Constant(1, 1.0);
  c.x_e = Vec::Zero(2);
  return c;
}

BoxBounds affine_dvi_default_box() {
  return {Vec::Constant(2, -5.0), Vec::Constant(2, 5.0), Vec::Constant(1, -2.0),
          Vec::Constant(1, 2.0)};
}

ContinuousOCPEC affine_dvi_pieces(int N, double dt, const QuadraticCostSpec& cost,
                                  const BoxBounds& box) {
  cost.validate(2, 1, 1);
  check_box(box, 2, 1);
  ContinuousOCPEC o;
  o.nx = 2;
  o.ntau = 1;
  o.np = 1;
  Mat F(2, 4);
  F << 1, -3, 4, -3,
      -8, 10, 8, -1;
  o.f = affine_map(F, Vec::Zero(2));
  Mat K(1, 4);
  K << 1, -3, 3, 5;
  o.K = affine_map(K, Vec::Zero(1));
  o.G = box_map(box, 2, 1, 1);
  o.C = affine_map(Mat(0, 4), Vec(0));
  o.stage_cost = stage_cost(cost, 2, 1, 1);
  o.terminal_cost = terminal_cost(cost, 2, 4);
  o.bounds = {Vec::Constant(1, -1.0), Vec::Constant(1, 1.0)};
  o.x0 = Vec(2);
  o.x0 << -0.5, -1.0;
  o.N = N;
  o.dt = dt;
  return o;
}

DiscretizedOCPEC affine_dvi(int N, double dt, const QuadraticCostSpec& cost,
                            const BoxBounds& box) {
  return make_discretized(affine_dvi_pieces(N, dt, cost, box));
}

QuadraticCostSpec cartpole_default_cost() {
  QuadraticCostSpec c;
  c.Q_T = Vec::Constant(4, 100.0);
  c.Q_x = Vec(4);
  c.Q_x << 1.0, 10.0, 0.1, 0.1;
  c.Q_tau = Vec::Constant(1, 0.1);
  c.Q_p = Vec::Constant(1, 0.01);
  c.x_e = Vec(4);
  c.x_e << 0.0, M_PI, 0.0, 0.0;
  return c;
}

BoxBounds cartpole_default_box() {
  Vec x_hi(4);
  x_hi << 5.0, 10.0, 20.0, 30.0;
  return {-x_hi, x_hi, Vec::Constant(1, -30.0), Vec::Constant(1, 30.0)};
}

ContinuousOCPEC cartpole_pieces(int N, double dt, const QuadraticCostSpec& cost,
                                const CartPoleParams& params, const BoxBounds& box) {
  if (params.cart_mass <= 0 || params.pole_mass <= 0 || params.pole_length <= 0 ||
      params.gravity <= 0 || params.friction_coefficient <= 0) {
    throw std::invalid_argument("cartpole: physical parameters must be positive");
  }
  cost.validate(4, 1, 1);
  check_box(box, 4, 1);
  ContinuousOCPEC o;
  o.nx = 4;
  o.ntau = 1;
  o.np = 1;
  o.f.rows = 4;
  o.f.value = [params](const Vec& y) {
    const Eigen::Matrix<double, 6, 1> v = y;
    return Vec(cartpole_rhs<double>(v, params));
  };
  o.f.jacobian = [params](const Vec& y) { return cartpole_jacobian(y, params); };
  o.f.weighted_hessian = [params](const Vec& y, const Vec& w) {
    return cartpole_weighted_hessian(y, w, params);
  };
  Mat K = Mat::Zero(1, 6);
  K(0, 2) = 1.0;
  o.K = affine_map(K, Vec::Zero(1));
  o.G = box_map(box, 4, 1, 1);
  o.C = affine_map(Mat(0, 6), Vec(0));
  o.stage_cost = stage_cost(cost, 4, 1, 1);
  o.terminal_cost = terminal_cost(cost, 4, 6);
  const double limit =
      params.friction_coefficient * (params.cart_mass + params.pole_mass) * params.gravity;
  o.bounds = {Vec::Constant(1, -limit), Vec::Constant(1, limit)};
  o.x0 = Vec::Zero(4);
  o.N = N;
  o.dt = dt;
  return o;
}

DiscretizedOCPEC cartpole_friction(int N, double dt, const QuadraticCostSpec& cost,
                                   const CartPoleParams& params, const BoxBounds& box) {
  return make_discretized(cartpole_pieces(N, dt, cost, params, box));
}

std::pair<int, double> default_horizon(std::string_view name) {
  if (name == "affine_dvi") return {100, 0.01};
  if (name == "cartpole_friction") return {400, 0.01};
  throw std::invalid_argument("unknown problem '" + std::string(name) + "'");
}

DiscretizedOCPEC make_benchmark(std::string_view name, int N, double dt) {
  if (name == "affine_dvi") return affine_dvi(N, dt);
  if (name == "cartpole_friction") return cartpole_friction(N, dt);
  throw std::invalid_argument("unknown problem '" + std::string(name) + "'");
}

double complementarity_violation(double p, double K, double l, double u, UpperScaling upper) {
  const double l_vio = std::max(0.0, l - p);
  const double l_sc = std::min(1.0, std::max(0.0, p - l));
  const double r_l = std::max(l_vio, l_sc * std::max(K, 0.0));
  const double u_vio = std::max(0.0, p - u);
  const double u_gap = upper == UpperScaling::kSymmetric ? u - p : l - p;
  const double u_sc = std::min(1.0, std::max(0.0, u_gap));
  const double r_u = std::max(u_vio, u_sc * std::max(-K, 0.0));
  return std::max(r_l, r_u);
}

SolutionMetrics evaluate_solution_metrics(const DiscretizedOCPEC& problem, const Iterate& y,
                                          UpperScaling upper) {
  const Dimensions& d = problem.dims();
  const BoundData& b = problem.bounds();
  SolutionMetrics m;
  for (int k = 0; k < d.N; ++k) {
    const StageEval ev = problem.evaluate(k, y.z(k), 0.0, false);
    m.cost += ev.cost;
    if (ev.C.size()) m.r_eq = std::max(m.r_eq, ev.C.lpNorm<Eigen::Infinity>());
    m.r_eq = std::max(m.r_eq, dynamics_defect(problem, y, k, ev).lpNorm<Eigen::Infinity>());
    double worst = 0.0;
    if (ev.G.size()) worst = std::min(worst, ev.G.minCoeff());
    for (int i = 0; i < d.np; ++i) {
      const double p = y.p(k)(i);
      if (std::isfinite(b.lower(i))) worst = std::min(worst, p - b.lower(i));
      if (std::isfinite(b.upper(i))) worst = std::min(worst, b.upper(i) - p);
      m.r_comp = std::max(
          m.r_comp, complementarity_violation(p, y.w(k)(i), b.lower(i), b.upper(i), upper));
    }
    m.r_ineq = std::max(m.r_ineq, -worst);
  }
  return m;
}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::kAtLower:
      return "at-lower";
    case Mode::kInterior:
      return "interior";
    case Mode::kAtUpper:
      return "at-upper";
  }
  return "unknown";
}

double default_mode_tolerance(double l, double u) {
  if (std::isfinite(l) && std::isfinite(u)) return 1e-3 * (u - l);
  return 1e-3;
}

std::vector<ModeInterval> extract_mode_sequence(const std::vector<Vec>& p, const BoundData& bounds,
                                                double dt, double tol_mode) {
  std::vector<ModeInterval> out;
  for (size_t k = 0; k < p.size(); ++k) {
    if (p[k].size() != bounds.size()) throw DimensionError("extract_mode_sequence: p length");
    std::vector<Mode> modes(static_cast<size_t>(bounds.size()));
    for (int i = 0; i < bounds.size(); ++i) {
      const double l = bounds.lower(i), u = bounds.upper(i);
      const double tol = tol_mode >= 0 ? tol_mode : default_mode_tolerance(l, u);
      Mode m = Mode::kInterior;
      if (p[k](i) <= l + tol) {
        m = Mode::kAtLower;
      } else if (p[k](i) >= u - tol) {
        m = Mode::kAtUpper;
      }
      modes[static_cast<size_t>(i)] = m;
    }
    const double t0 = static_cast<double>(k) * dt;
    const double t1 = static_cast<double>(k + 1) * dt;
    if (!out.empty() && out.back().modes == modes) {
      out.back().end = t1;
    } else {
      out.push_back({std::move(modes), t0, t1});
    }
  }
  return out;
}

std::vector<ModeInterval> extract_mode_sequence(const DiscretizedOCPEC& problem, const Iterate& y,
                                                double tol_mode) {
  std::vector<Vec> p;
  p.reserve(static_cast<size_t>(problem.dims().N));
  for (int k = 0; k < problem.dims().N; ++k) p.emplace_back(y.p(k));
  return extract_mode_sequence(p, problem.bounds(), problem.dims().dt, tol_mode);
}

Iterate random_initial_guess(const DiscretizedOCPEC& problem, std::uint64_t seed, double range) {
  if (!(range >= 0.0)) throw std::invalid_argument("random_initial_guess: range must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Iterate y(problem.dims());
  for (int k = 0; k < problem.dims().N; ++k) {
    for (auto& v : y.z(k)) v = range * (2.0 * unit(rng) - 1.0);
    for (auto& v : y.sigma(k)) v = 1.0 - unit(rng);
    for (auto& v : y.gamma(k)) v = 1.0 - unit(rng);
  }
  return y;
}

}  // namespace nipocpec
