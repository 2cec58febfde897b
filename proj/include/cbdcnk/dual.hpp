#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace cbdcnk {

// Forward-mode scalar carrying a value and a dense gradient of fixed width.
// Width is set by the seed variables; all operands in an expression must share it.
struct Grad {
  double v = 0.0;
  Eigen::VectorXd g;

  Grad() = default;
  explicit Grad(double value) : v(value) {}
  Grad(double value, Eigen::VectorXd grad) : v(value), g(std::move(grad)) {}

  static Grad seed(double value, int width, int index) {
    Grad out(value, Eigen::VectorXd::Zero(width));
    out.g[index] = 1.0;
    return out;
  }
  static Grad constant(double value, int width) {
    return Grad(value, Eigen::VectorXd::Zero(width));
  }
};

inline Grad operator+(const Grad& a, const Grad& b) { return {a.v + b.v, a.g + b.g}; }
inline Grad operator-(const Grad& a, const Grad& b) { return {a.v - b.v, a.g - b.g}; }
inline Grad operator-(const Grad& a) { return {-a.v, -a.g}; }
inline Grad operator*(const Grad& a, const Grad& b) {
  return {a.v * b.v, a.v * b.g + b.v * a.g};
}
inline Grad operator/(const Grad& a, const Grad& b) {
  double inv = 1.0 / b.v;
  return {a.v * inv, inv * a.g - (a.v * inv * inv) * b.g};
}
inline Grad operator+(const Grad& a, double c) { return {a.v + c, a.g}; }
inline Grad operator+(double c, const Grad& a) { return {a.v + c, a.g}; }
inline Grad operator-(const Grad& a, double c) { return {a.v - c, a.g}; }
inline Grad operator-(double c, const Grad& a) { return {c - a.v, -a.g}; }
inline Grad operator*(const Grad& a, double c) { return {a.v * c, c * a.g}; }
inline Grad operator*(double c, const Grad& a) { return {a.v * c, c * a.g}; }
inline Grad operator/(const Grad& a, double c) { return {a.v / c, a.g / c}; }
inline Grad operator/(double c, const Grad& a) {
  double inv = 1.0 / a.v;
  return {c * inv, (-c * inv * inv) * a.g};
}
inline Grad chain(double f, double df, const Grad& x) { return {f, df * x.g}; }
inline Grad exp(const Grad& x) {
  double e = std::exp(x.v);
  return chain(e, e, x);
}
inline Grad log(const Grad& x) { return chain(std::log(x.v), 1.0 / x.v, x); }
inline Grad pow(const Grad& x, double p) {
  double f = std::pow(x.v, p);
  return chain(f, p * std::pow(x.v, p - 1.0), x);
}
inline Grad pow(const Grad& x, const Grad& p) { return exp(p * log(x)); }
inline Grad pow(double c, const Grad& p) { return exp(p * std::log(c)); }

// Second-order scalar: value, gradient and (symmetric) Hessian.
struct Hess {
  double v = 0.0;
  Eigen::VectorXd g;
  Eigen::MatrixXd h;

  Hess() = default;
  explicit Hess(double value) : v(value) {}
  Hess(double value, Eigen::VectorXd grad, Eigen::MatrixXd hess)
      : v(value), g(std::move(grad)), h(std::move(hess)) {}

  static Hess seed(double value, int width, int index) {
    Hess out(value, Eigen::VectorXd::Zero(width), Eigen::MatrixXd::Zero(width, width));
    out.g[index] = 1.0;
    return out;
  }
  static Hess constant(double value, int width) {
    return Hess(value, Eigen::VectorXd::Zero(width), Eigen::MatrixXd::Zero(width, width));
  }
};

inline Hess operator+(const Hess& a, const Hess& b) { return {a.v + b.v, a.g + b.g, a.h + b.h}; }
inline Hess operator-(const Hess& a, const Hess& b) { return {a.v - b.v, a.g - b.g, a.h - b.h}; }
inline Hess operator-(const Hess& a) { return {-a.v, -a.g, -a.h}; }
inline Hess operator*(const Hess& a, const Hess& b) {
  Eigen::MatrixXd h = a.v * b.h + b.v * a.h;
  h.noalias() += a.g * b.g.transpose();
  h.noalias() += b.g * a.g.transpose();
  return {a.v * b.v, a.v * b.g + b.v * a.g, std::move(h)};
}
inline Hess operator+(const Hess& a, double c) { return {a.v + c, a.g, a.h}; }
inline Hess operator+(double c, const Hess& a) { return {a.v + c, a.g, a.h}; }
inline Hess operator-(const Hess& a, double c) { return {a.v - c, a.g, a.h}; }
inline Hess operator-(double c, const Hess& a) { return {c - a.v, -a.g, -a.h}; }
inline Hess operator*(const Hess& a, double c) { return {a.v * c, c * a.g, c * a.h}; }
inline Hess operator*(double c, const Hess& a) { return {a.v * c, c * a.g, c * a.h}; }
inline Hess operator/(const Hess& a, double c) { return {a.v / c, a.g / c, a.h / c}; }

// f(x) with f' and f'' supplied: grad f'x.g, hess f'x.h + f'' x.g x.g'.
inline Hess chain(double f, double df, double d2f, const Hess& x) {
  Eigen::MatrixXd h = df * x.h;
  h.noalias() += d2f * (x.g * x.g.transpose());
  return {f, df * x.g, std::move(h)};
}
inline Hess exp(const Hess& x) {
  double e = std::exp(x.v);
  return chain(e, e, e, x);
}
inline Hess log(const Hess& x) {
  double inv = 1.0 / x.v;
  return chain(std::log(x.v), inv, -inv * inv, x);
}
inline Hess pow(const Hess& x, double p) {
  return chain(std::pow(x.v, p), p * std::pow(x.v, p - 1.0),
               p * (p - 1.0) * std::pow(x.v, p - 2.0), x);
}
inline Hess operator/(const Hess& a, const Hess& b) {
  double inv = 1.0 / b.v;
  return a * chain(inv, -inv * inv, 2.0 * inv * inv * inv, b);
}
inline Hess operator/(double c, const Hess& b) {
  double inv = 1.0 / b.v;
  return chain(c * inv, -c * inv * inv, 2.0 * c * inv * inv * inv, b);
}
inline Hess pow(const Hess& x, const Hess& p) { return exp(p * log(x)); }
inline Hess pow(double c, const Hess& p) { return exp(p * std::log(c)); }

// Plain-double helpers so the same templated code runs at order zero.
inline double chain(double f, double /*df*/, double /*x*/) { return f; }

}  // namespace cbdcnk
