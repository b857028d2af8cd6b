#pragma once

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <string>

namespace nipocpec {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Problem sizes of a discretized OCPEC. Stages are indexed 0..N-1 in code;
/// stage k sits at time (k + 1) * dt and couples to the state of stage k - 1
/// (or to the fixed initial state for k = 0).
struct Dimensions {
  int nx = 0;
  int ntau = 0;
  int np = 0;
  int nw = 0;
  int nsigma = 0;
  int neta = 0;
  int ngamma = 0;
  int N = 1;
  double dt = 0.01;

  int nz() const { return nx + ntau + np + nw; }
  int ndual() const { return nsigma + neta + nx + ngamma; }
  int ny() const { return ndual() + nz(); }
  long total() const { return static_cast<long>(N) * ny(); }

  /// Throws std::invalid_argument when the record is inconsistent.
  void validate() const;
};

/// Box [l, u] of the equilibrium variable; infinite entries allowed.
struct BoundData {
  Vec lower;
  Vec upper;

  int size() const { return static_cast<int>(lower.size()); }
  void validate() const;
};

/// Raised by stage evaluators; carries the stage index when known.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, int stage = -1)
      : std::runtime_error(what), stage_(stage) {}
  int stage() const { return stage_; }

 private:
  int stage_;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace nipocpec
