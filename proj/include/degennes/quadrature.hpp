#pragma once

#include <cmath>
#include <numbers>

namespace degennes {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int levels = 0;
};

/// Tanh-sinh (double exponential) quadrature on [a, b]. Abscissae are formed
/// from the distance to the nearest endpoint, so integrable endpoint
/// singularities such as t^(-1/2) are never sampled at the endpoint itself.
template <typename F>
QuadratureResult tanh_sinh(F&& f, double a, double b, double tol = 1e-13, int max_levels = 12) {
  const double width = b - a;
  const double t_max = 4.0;
  auto pair_sum = [&](double t) {
    const double u = 0.5 * std::numbers::pi * std::sinh(t);
    const double s = 1.0 / (1.0 + std::exp(2.0 * u));
    const double offset = width * s;
    if (offset <= 0.0) return 0.0;
    const double w = width * std::numbers::pi * std::cosh(t) * s * (1.0 - s);
    if (t == 0.0) return w * f(a + offset);
    return w * (f(a + offset) + f(b - offset));
  };

  double step = 1.0;
  double sum = pair_sum(0.0);
  for (double t = step; t <= t_max; t += step) sum += pair_sum(t);
  double estimate = sum * step;
  QuadratureResult result{estimate, std::abs(estimate), 0};

  for (int level = 1; level <= max_levels; ++level) {
    step *= 0.5;
    for (double t = step; t <= t_max; t += 2.0 * step) sum += pair_sum(t);
    const double next = sum * step;
    result = {next, std::abs(next - estimate), level};
    if (result.error_estimate <= tol * std::max(1.0, std::abs(next)) && level >= 3) break;
    estimate = next;
  }
  return result;
}

}  // namespace degennes
