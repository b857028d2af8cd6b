#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "nipocpec/iterate.hpp"
#include "nipocpec/transcription.hpp"

namespace nipocpec {

/// L_T = (x - x_e)' Q_T (x - x_e)
/// L_S = (x - x_ref(t))' Q_x (x - x_ref(t)) + tau' Q_tau tau + p' Q_p p
/// Diagonal weights are stored as vectors.
struct QuadraticCostSpec {
  Vec Q_T;
  Vec Q_x;
  Vec Q_tau;
  Vec Q_p;
  Vec x_e;
  /// Empty means x_ref == x_e.
  std::function<Vec(double t)> x_ref;

  void validate(int nx, int ntau, int np) const;
};

/// Linear interpolation between knots (t_i, x_i), held constant outside.
std::function<Vec(double)> interpolated_reference(std::vector<double> times, std::vector<Vec> states);

/// Lower/upper bounds on state and control; the rows of G are
/// [x - x_lo; x_hi - x; tau - tau_lo; tau_hi - tau].
struct BoxBounds {
  Vec x_lo, x_hi;
  Vec tau_lo, tau_hi;
};

QuadraticCostSpec affine_dvi_default_cost();
BoxBounds affine_dvi_default_box();

ContinuousOCPEC affine_dvi_pieces(int N = 100, double dt = 0.01,
                                  const QuadraticCostSpec& cost = affine_dvi_default_cost(),
                                  const BoxBounds& box = affine_dvi_default_box());
DiscretizedOCPEC affine_dvi(int N = 100, double dt = 0.01,
                            const QuadraticCostSpec& cost = affine_dvi_default_cost(),
                            const BoxBounds& box = affine_dvi_default_box());

struct CartPoleParams {
  double cart_mass = 1.0;
  double pole_mass = 0.1;
  double pole_length = 0.5;
  double gravity = 9.81;
  double friction_coefficient = 0.1;
};

QuadraticCostSpec cartpole_default_cost();
BoxBounds cartpole_default_box();

/// State (x_c, theta, xdot_c, thetadot), theta = 0 hanging down. Coulomb
/// friction force p on the cart, p in [-mu (m_c + m_p) g, mu (m_c + m_p) g],
/// K = xdot_c.
ContinuousOCPEC cartpole_pieces(int N = 400, double dt = 0.01,
                                const QuadraticCostSpec& cost = cartpole_default_cost(),
                                const CartPoleParams& params = {},
                                const BoxBounds& box = cartpole_default_box());
DiscretizedOCPEC cartpole_friction(int N = 400, double dt = 0.01,
                                   const QuadraticCostSpec& cost = cartpole_default_cost(),
                                   const CartPoleParams& params = {},
                                   const BoxBounds& box = cartpole_default_box());

/// Builds a benchmark by name ("affine_dvi", "cartpole_friction").
DiscretizedOCPEC make_benchmark(std::string_view name, int N, double dt);
/// Default horizon of a named benchmark.
std::pair<int, double> default_horizon(std::string_view name);

struct SolutionMetrics {
  double r_eq = 0.0;
  double r_ineq = 0.0;
  double r_comp = 0.0;
  double cost = 0.0;
};

/// r_comp convention for the upper side: kSymmetric uses
/// u_sc = min(1, max(0, u - p)), kAsPrinted uses min(1, max(0, l - p)).
enum class UpperScaling { kSymmetric, kAsPrinted };

/// Constraint-satisfaction metrics of a primal trajectory. The VI function
/// value is read from w (which the equality rows tie to K).
SolutionMetrics evaluate_solution_metrics(const DiscretizedOCPEC& problem, const Iterate& y,
                                          UpperScaling upper = UpperScaling::kSymmetric);

/// Complementarity violation of one (p, K) pair.
double complementarity_violation(double p, double K, double l, double u,
                                 UpperScaling upper = UpperScaling::kSymmetric);

enum class Mode { kAtLower, kInterior, kAtUpper };
std::string_view to_string(Mode mode);

struct ModeInterval {
  std::vector<Mode> modes;  // one per equilibrium component
  double start = 0.0;
  double end = 0.0;
};

/// 1e-3 (u - l) for finite boxes, 1e-3 otherwise.
double default_mode_tolerance(double l, double u);

/// Knot k covers [k dt, (k + 1) dt]. Pass tol_mode < 0 for the default rule.
std::vector<ModeInterval> extract_mode_sequence(const std::vector<Vec>& p,
                                                const BoundData& bounds, double dt,
                                                double tol_mode = -1.0);
std::vector<ModeInterval> extract_mode_sequence(const DiscretizedOCPEC& problem, const Iterate& y,
                                                double tol_mode = -1.0);

/// Primals uniform in [-range, range], sigma and gamma uniform in (0, 1],
/// eta = lambda = 0.
Iterate random_initial_guess(const DiscretizedOCPEC& problem, std::uint64_t seed,
                             double range = 1.0);

}  // namespace nipocpec
