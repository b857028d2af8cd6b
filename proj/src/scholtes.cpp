#include "nipocpec/scholtes.hpp"

#include <cmath>

namespace nipocpec {

namespace {

enum class BoxKind { kBoth, kLower, kUpper, kFree };

BoxKind classify(double l, double u) {
  const bool has_l = std::isfinite(l);
  const bool has_u = std::isfinite(u);
  if (has_l && has_u) return BoxKind::kBoth;
  if (has_l) return BoxKind::kLower;
  if (has_u) return BoxKind::kUpper;
  return BoxKind::kFree;
}

int rows_for(BoxKind kind) {
  switch (kind) {
    case BoxKind::kBoth:
      return 4;
    case BoxKind::kLower:
    case BoxKind::kUpper:
      return 3;
    case BoxKind::kFree:
      return 0;
  }
  return 0;
}

void check_sizes(const Vec& p, const Vec& w, const BoundData& bounds) {
  if (p.size() != bounds.size() || w.size() != bounds.size()) {
    throw DimensionError("scholtes: p, w and bounds must have equal length");
  }
}

}  // namespace

int scholtes_row_count(const BoundData& bounds) {
  int rows = 0;
  for (int i = 0; i < bounds.size(); ++i) {
    rows += rows_for(classify(bounds.lower(i), bounds.upper(i)));
  }
  return rows;
}

Vec build_scholtes_phi(const Vec& p, const Vec& w, double s, const BoundData& bounds) {
  check_sizes(p, w, bounds);
  if (!(s >= 0.0)) throw std::invalid_argument("scholtes: s must be nonnegative");
  Vec phi(scholtes_row_count(bounds));
  int r = 0;
  for (int i = 0; i < bounds.size(); ++i) {
    const double l = bounds.lower(i);
    const double u = bounds.upper(i);
    switch (classify(l, u)) {
      case BoxKind::kBoth:
        phi(r++) = p(i) - l;
        phi(r++) = u - p(i);
        phi(r++) = s - (p(i) - l) * w(i);
        phi(r++) = s + (u - p(i)) * w(i);
        break;
      case BoxKind::kLower:
        phi(r++) = p(i) - l;
        phi(r++) = w(i);
        phi(r++) = s - (p(i) - l) * w(i);
        break;
      case BoxKind::kUpper:
        phi(r++) = u - p(i);
        phi(r++) = -w(i);
        phi(r++) = s + (u - p(i)) * w(i);
        break;
      case BoxKind::kFree:
        break;
    }
  }
  return phi;
}

Mat build_scholtes_jacobian(const Vec& p, const Vec& w, const BoundData& bounds) {
  check_sizes(p, w, bounds);
  const int np = bounds.size();
  Mat jac = Mat::Zero(scholtes_row_count(bounds), 2 * np);
  int r = 0;
  for (int i = 0; i < np; ++i) {
    const double l = bounds.lower(i);
    const double u = bounds.upper(i);
    const int cp = i;
    const int cw = np + i;
    switch (classify(l, u)) {
      case BoxKind::kBoth:
        jac(r, cp) = 1.0;
        ++r;
        jac(r, cp) = -1.0;
        ++r;
        jac(r, cp) = -w(i);
        jac(r, cw) = -(p(i) - l);
        ++r;
        jac(r, cp) = -w(i);
        jac(r, cw) = u - p(i);
        ++r;
        break;
      case BoxKind::kLower:
        jac(r, cp) = 1.0;
        ++r;
        jac(r, cw) = 1.0;
        ++r;
        jac(r, cp) = -w(i);
        jac(r, cw) = -(p(i) - l);
        ++r;
        break;
      case BoxKind::kUpper:
        jac(r, cp) = -1.0;
        ++r;
        jac(r, cw) = -1.0;
        ++r;
        jac(r, cp) = -w(i);
        jac(r, cw) = u - p(i);
        ++r;
        break;
      case BoxKind::kFree:
        break;
    }
  }
  return jac;
}

Mat build_scholtes_weighted_hessian(const Vec& multipliers, const BoundData& bounds) {
  const int np = bounds.size();
  if (multipliers.size() != scholtes_row_count(bounds)) {
    throw DimensionError("scholtes: multiplier length must equal the row count");
  }
  Mat hess = Mat::Zero(2 * np, 2 * np);
  int r = 0;
  for (int i = 0; i < np; ++i) {
    const BoxKind kind = classify(bounds.lower(i), bounds.upper(i));
    // the bilinear rows have d2/dp dw = -1; they are the trailing rows of each group
    double coupling = 0.0;
    switch (kind) {
      case BoxKind::kBoth:
        coupling = -multipliers(r + 2) - multipliers(r + 3);
        break;
      case BoxKind::kLower:
      case BoxKind::kUpper:
        coupling = -multipliers(r + 2);
        break;
      case BoxKind::kFree:
        break;
    }
    hess(i, np + i) = coupling;
    hess(np + i, i) = coupling;
    r += rows_for(kind);
  }
  return hess;
}

}  // namespace nipocpec
