#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nipocpec/solver.hpp"

namespace nipocpec {

/// Column names of the trajectory table: t, x*, tau*, p*, w*, sigma*, eta*,
/// lambda*, gamma*.
std::vector<std::string> trajectory_header(const Dimensions& dims);

/// N + 1 rows: t = 0 carries x0 only (other fields empty), row k + 1 is stage k
/// at t = (k + 1) dt. Numbers use 17 significant digits so they read back
/// bit-identically.
void write_trajectory(std::ostream& out, const Iterate& y, const Vec& x0);
void write_trajectory(const std::string& path, const Iterate& y, const Vec& x0);

struct Trajectory {
  std::vector<double> t;
  Vec x0;
  Iterate y;
};

/// Inverse of write_trajectory. Throws std::runtime_error with the line number
/// on malformed input or a header that does not match dims.
Trajectory read_trajectory(std::istream& in, const Dimensions& dims);
Trajectory read_trajectory(const std::string& path, const Dimensions& dims);

/// One row per iteration: iteration, cost, merit, merit_accepted, violation, primal_inf,
/// dual_inf, kkt_norm, alpha, step_kind, trials, s, z, beta, soc, frp.
void write_history(std::ostream& out, const std::vector<IterationRecord>& history);
void write_history(const std::string& path, const std::vector<IterationRecord>& history);

}  // namespace nipocpec
