#include "nipocpec/fischer_burmeister.hpp"

#include <cmath>
#include <stdexcept>

namespace nipocpec {

namespace {

double radius(double a, double b, double z) { return std::hypot(a, b, z); }

// c - r computed without cancellation when c > 0; `other` is the remaining
// argument so that r^2 = c^2 + other^2 + z^2.
double minus_radius(double c, double other, double z, double r) {
  if (c > 0.0) return -(other * other + z * z) / (r + c);
  return c - r;
}

}  // namespace

double fb(double a, double b, double z) {
  const double r = radius(a, b, z);
  if (a + b > 0.0) return (z * z - 2.0 * a * b) / (r + a + b);
  return r - a - b;
}

FBGradient fb_grad(double a, double b, double z) {
  const double r = radius(a, b, z);
  if (r == 0.0) return {-1.0, -1.0};
  return {minus_radius(a, b, z, r) / r, minus_radius(b, a, z, r) / r};
}

double fb_row_scaling(double a, double b, double z, double nu) {
  const double r = radius(a, b, z);
  if (r == 0.0) return nu > 0.0 ? -kInf : -1.0;
  return (minus_radius(b, a, z, r) - nu) / r;
}

double fb_scaled_residual(double a, double b, double z, double nu) {
  const double r = radius(a, b, z);
  if (r == 0.0) return 0.0;
  const double denom = minus_radius(b, a, z, r) - nu;
  if (denom == 0.0) throw std::domain_error("fb: singular complementarity scaling");
  // -fb / ((b - r - nu) / r)
  return -fb(a, b, z) * r / denom;
}

double fb_diagonal(double a, double b, double z, double nu) {
  const double r = radius(a, b, z);
  const double num = minus_radius(a, b, z, r) - nu;
  const double den = minus_radius(b, a, z, r) - nu;
  if (num == 0.0 && den == 0.0) return -1.0;
  if (den == 0.0) throw std::domain_error("fb: singular complementarity scaling");
  return -num / den;
}

Vec fb(const Vec& a, const Vec& b, double z) {
  Vec out(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out(i) = fb(a(i), b(i), z);
  return out;
}

}  // namespace nipocpec
