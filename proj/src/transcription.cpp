#include "nipocpec/transcription.hpp"

#include "nipocpec/scholtes.hpp"

namespace nipocpec {

namespace {

struct Layout {
  int nx, ntau, np;
  int ny() const { return nx + ntau + np; }
  int nz() const { return ny() + np; }
};

Vec eval_map(const SmoothMap& map, const Vec& y) {
  if (map.rows == 0) return Vec(0);
  return map.value(y);
}

Mat eval_jac(const SmoothMap& map, const Vec& y) {
  if (map.rows == 0) return Mat(0, y.size());
  return map.jacobian(y);
}

Mat eval_whess(const SmoothMap& map, const Vec& y, const Vec& weights) {
  if (map.rows == 0 || !map.weighted_hessian) return Mat::Zero(y.size(), y.size());
  return map.weighted_hessian(y, weights);
}

void check_map(const SmoothMap& map, const char* name) {
  if (map.rows < 0) throw DimensionError(std::string("transcription: negative rows for ") + name);
  if (map.rows > 0 && (!map.value || !map.jacobian)) {
    throw std::invalid_argument(std::string("transcription: ") + name +
                                " needs value and jacobian");
  }
}

class TranscribedCost final : public StageCost {
 public:
  TranscribedCost(Layout layout, int N, double dt, SmoothCost stage, SmoothCost terminal)
      : l_(layout), N_(N), dt_(dt), stage_(std::move(stage)), terminal_(std::move(terminal)) {}

  double value(int k, const Vec& z) const override {
    const Vec y = z.head(l_.ny());
    double v = 0.0;
    if (stage_.value) v += stage_.value(time(k), y) * dt_;
    if (k == N_ - 1 && terminal_.value) v += terminal_.value(time(k), y);
    return v;
  }

  Vec gradient(int k, const Vec& z) const override {
    Vec g = Vec::Zero(l_.nz());
    const Vec y = z.head(l_.ny());
    if (stage_.gradient) g.head(l_.ny()) += stage_.gradient(time(k), y) * dt_;
    if (k == N_ - 1 && terminal_.gradient) g.head(l_.ny()) += terminal_.gradient(time(k), y);
    return g;
  }

  Mat hessian(int k, const Vec& z) const override {
    Mat h = Mat::Zero(l_.nz(), l_.nz());
    const Vec y = z.head(l_.ny());
    if (stage_.hessian) h.topLeftCorner(l_.ny(), l_.ny()) += stage_.hessian(time(k), y) * dt_;
    if (k == N_ - 1 && terminal_.hessian) {
      h.topLeftCorner(l_.ny(), l_.ny()) += terminal_.hessian(time(k), y);
    }
    return h;
  }

 private:
  double time(int k) const { return (k + 1) * dt_; }

  Layout l_;
  int N_;
  double dt_;
  SmoothCost stage_;
  SmoothCost terminal_;
};

class TranscribedConstraints final : public StageConstraints {
 public:
  TranscribedConstraints(Layout layout, double dt, SmoothMap f, SmoothMap K, SmoothMap G,
                         SmoothMap C)
      : l_(layout),
        dt_(dt),
        f_(std::move(f)),
        K_(std::move(K)),
        G_(std::move(G)),
        C_(std::move(C)) {}

  Vec inequality(int, const Vec& z) const override { return eval_map(G_, z.head(l_.ny())); }

  Mat inequality_jacobian(int, const Vec& z) const override {
    Mat jac = Mat::Zero(G_.rows, l_.nz());
    jac.leftCols(l_.ny()) = eval_jac(G_, z.head(l_.ny()));
    return jac;
  }

  Vec equality(int, const Vec& z) const override {
    const Vec y = z.head(l_.ny());
    Vec c(C_.rows + l_.np);
    c.head(C_.rows) = eval_map(C_, y);
    c.tail(l_.np) = z.tail(l_.np) - eval_map(K_, y);
    return c;
  }

  Mat equality_jacobian(int, const Vec& z) const override {
    const Vec y = z.head(l_.ny());
    Mat jac = Mat::Zero(C_.rows + l_.np, l_.nz());
    jac.topLeftCorner(C_.rows, l_.ny()) = eval_jac(C_, y);
    jac.bottomLeftCorner(l_.np, l_.ny()) = -eval_jac(K_, y);
    jac.bottomRightCorner(l_.np, l_.np).setIdentity();
    return jac;
  }

  Vec dynamics(int, const Vec& z) const override {
    return eval_map(f_, z.head(l_.ny())) * dt_ - z.head(l_.nx);
  }

  Mat dynamics_jacobian(int, const Vec& z) const override {
    Mat jac = Mat::Zero(l_.nx, l_.nz());
    jac.leftCols(l_.ny()) = eval_jac(f_, z.head(l_.ny())) * dt_;
    jac.leftCols(l_.nx) -= Mat::Identity(l_.nx, l_.nx);
    return jac;
  }

  Mat weighted_hessian(int, const Vec& z, const Vec& sigma, const Vec& eta,
                       const Vec& lambda) const override {
    const Vec y = z.head(l_.ny());
    Mat h = Mat::Zero(l_.nz(), l_.nz());
    auto block = h.topLeftCorner(l_.ny(), l_.ny());
    block -= eval_whess(G_, y, sigma);
    block += eval_whess(C_, y, eta.head(C_.rows));
    block -= eval_whess(K_, y, eta.tail(l_.np));
    block += eval_whess(f_, y, lambda) * dt_;
    return h;
  }

 private:
  Layout l_;
  double dt_;
  SmoothMap f_, K_, G_, C_;
};

}  // namespace

DiscretizedOCPEC make_discretized(ContinuousOCPEC pieces) {
  if (pieces.nx < 0 || pieces.ntau < 0 || pieces.np < 0) {
    throw DimensionError("transcription: negative size");
  }
  if (pieces.f.rows != pieces.nx) throw DimensionError("transcription: f must have nx rows");
  if (pieces.K.rows != pieces.np) throw DimensionError("transcription: K must have np rows");
  check_map(pieces.f, "f");
  check_map(pieces.K, "K");
  check_map(pieces.G, "G");
  check_map(pieces.C, "C");
  if (pieces.bounds.size() != pieces.np) throw DimensionError("transcription: bounds length");
  pieces.bounds.validate();

  Dimensions dims;
  dims.nx = pieces.nx;
  dims.ntau = pieces.ntau;
  dims.np = pieces.np;
  dims.nw = pieces.np;
  dims.nsigma = pieces.G.rows;
  dims.neta = pieces.C.rows + pieces.np;
  dims.ngamma = scholtes_row_count(pieces.bounds);
  dims.N = pieces.N;
  dims.dt = pieces.dt;
  dims.validate();

  const Layout layout{pieces.nx, pieces.ntau, pieces.np};
  auto cost = std::make_shared<TranscribedCost>(layout, pieces.N, pieces.dt,
                                                std::move(pieces.stage_cost),
                                                std::move(pieces.terminal_cost));
  auto constraints = std::make_shared<TranscribedConstraints>(
      layout, pieces.dt, std::move(pieces.f), std::move(pieces.K), std::move(pieces.G),
      std::move(pieces.C));
  return DiscretizedOCPEC(dims, std::move(pieces.bounds), std::move(pieces.x0), std::move(cost),
                          std::move(constraints));
}

}  // namespace nipocpec
