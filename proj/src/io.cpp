#include "nipocpec/io.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace nipocpec {

namespace {

void add_columns(std::vector<std::string>& names, const char* base, int n) {
  for (int i = 0; i < n; ++i) names.push_back(fmt::format("{}{}", base, i));
}

void put(std::string& line, double v) { fmt::format_to(std::back_inserter(line), ",{:.17g}", v); }

template <class Seg>
void put_all(std::string& line, const Seg& seg) {
  for (int i = 0; i < seg.size(); ++i) put(line, seg(i));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, int line_no, const std::string& column) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
    throw std::runtime_error(
        fmt::format("trajectory line {}: bad number '{}' in column {}", line_no, s, column));
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return in;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

std::vector<std::string> trajectory_header(const Dimensions& d) {
  std::vector<std::string> names{"t"};
  add_columns(names, "x", d.nx);
  add_columns(names, "tau", d.ntau);
  add_columns(names, "p", d.np);
  add_columns(names, "w", d.nw);
  add_columns(names, "sigma", d.nsigma);
  add_columns(names, "eta", d.neta);
  add_columns(names, "lambda", d.nx);
  add_columns(names, "gamma", d.ngamma);
  return names;
}

void write_trajectory(std::ostream& out, const Iterate& y, const Vec& x0) {
  const Dimensions& d = y.dims();
  if (x0.size() != d.nx) throw DimensionError("write_trajectory: x0 size");
  const auto names = trajectory_header(d);
  std::string line;
  for (std::size_t i = 0; i < names.size(); ++i) line += (i ? "," : "") + names[i];
  out << line << '\n';

  line = "0";
  put_all(line, x0);
  line.append(names.size() - 1 - d.nx, ',');
  out << line << '\n';

  for (int k = 0; k < d.N; ++k) {
    line = fmt::format("{:.17g}", (k + 1) * d.dt);
    put_all(line, y.x(k));
    put_all(line, y.tau(k));
    put_all(line, y.p(k));
    put_all(line, y.w(k));
    put_all(line, y.sigma(k));
    put_all(line, y.eta(k));
    put_all(line, y.lambda(k));
    put_all(line, y.gamma(k));
    out << line << '\n';
  }
  if (!out) throw std::runtime_error("write_trajectory: stream error");
}

void write_trajectory(const std::string& path, const Iterate& y, const Vec& x0) {
  auto out = open_out(path);
  write_trajectory(out, y, x0);
}

Trajectory read_trajectory(std::istream& in, const Dimensions& d) {
  const auto names = trajectory_header(d);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trajectory: missing header");
  if (split(strip_cr(line)) != names)
    throw std::runtime_error("trajectory line 1: header does not match the problem dimensions");

  Trajectory traj;
  traj.y = Iterate(d);
  traj.x0 = Vec::Zero(d.nx);
  int row = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != names.size())
      throw std::runtime_error(fmt::format("trajectory line {}: expected {} fields, got {}", line_no,
                                           names.size(), fields.size()));
    if (row > d.N) throw std::runtime_error(fmt::format("trajectory line {}: too many rows", line_no));
    traj.t.push_back(parse_double(fields[0], line_no, names[0]));
    if (row == 0) {
      for (int i = 0; i < d.nx; ++i) traj.x0(i) = parse_double(fields[1 + i], line_no, names[1 + i]);
    } else {
      auto stage = traj.y.stage(row - 1);
      // columns are (x, tau, p, w) followed by the duals in storage order
      for (int i = 0; i < d.nz(); ++i)
        stage(d.ndual() + i) = parse_double(fields[1 + i], line_no, names[1 + i]);
      for (int i = 0; i < d.ndual(); ++i)
        stage(i) = parse_double(fields[1 + d.nz() + i], line_no, names[1 + d.nz() + i]);
    }
    ++row;
  }
  if (row != d.N + 1)
    throw std::runtime_error(fmt::format("trajectory: expected {} rows, got {}", d.N + 1, row));
  return traj;
}

Trajectory read_trajectory(const std::string& path, const Dimensions& dims) {
  auto in = open_in(path);
  return read_trajectory(in, dims);
}

void write_history(std::ostream& out, const std::vector<IterationRecord>& history) {
  out << "iteration,cost,merit,merit_accepted,violation,primal_inf,dual_inf,kkt_norm,alpha,step_kind,trials,s,z,"
         "beta,soc,frp\n";
  for (const auto& h : history) {
    fmt::print(out, "{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{},{},{:.17g},{:.17g},{:.17g},{},{}\n",
               h.iteration, h.cost, h.merit, h.merit_accepted, h.violation, h.primal_inf, h.dual_inf, h.kkt_norm,
               h.alpha, to_string(h.kind), h.trials, h.s, h.z, h.beta, int(h.soc_attempted),
               int(h.frp));
  }
  if (!out) throw std::runtime_error("write_history: stream error");
}

void write_history(const std::string& path, const std::vector<IterationRecord>& history) {
  auto out = open_out(path);
  write_history(out, history);
}

}  // namespace nipocpec
