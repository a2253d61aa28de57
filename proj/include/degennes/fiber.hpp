#pragma once

// Neumann realization of D_x^2 + (xi - x)^2 on the half-line, discretized by
// second-order finite differences with a mirror ghost node at x = 0 and a
// homogeneous Dirichlet node at the truncation point x = L. Each solve runs on
// a ladder of grids h0, h0/2, ... and Richardson-extrapolates in h^2.

#include <Eigen/Core>

#include <functional>
#include <vector>

#include "degennes/errors.hpp"
#include "degennes/richardson.hpp"

namespace degennes {

struct DiscretizationConfig {
  friend bool operator==(const DiscretizationConfig&, const DiscretizationConfig&) = default;

  double domain_length = 12.0;  // nominal truncation L; grown per fiber when needed
  int grid_points = 600;        // intervals on the nominal domain; fixes the base spacing
  int refinement_levels = 3;    // grids in the Richardson ladder
  double target_tol = 1e-8;     // accepted (estimated) eigenvalue error
  bool strict = true;           // throw NotConverged on rejection instead of flagging it

  double base_spacing() const { return domain_length / grid_points; }
  void validate() const;
};

/// Values on the uniform grid x_i = i * spacing, i = 0..n-1; the node
/// x_n = n * spacing carries the Dirichlet zero and is not stored.
struct GridFunction {
  double spacing = 0.0;
  Eigen::VectorXd values;

  double length() const { return spacing * static_cast<double>(values.size()); }
};

struct Eigenpair {
  int band_index = 1;
  double fiber = 0.0;
  double mu = 0.0;
  double mu_prime = 0.0;  // extrapolated Feynman-Hellmann derivative
  std::vector<GridFunction> levels;  // coarsest first; levels.back() is the returned eigenfunction
  double norm_error = 0.0;
  double neumann_residual = 0.0;

  const GridFunction& eigenfunction() const { return levels.back(); }
};

struct SolveDiagnostics {
  double estimated_eigenvalue_error = 0.0;
  double estimated_derivative_error = 0.0;
  double truncation_indicator = 0.0;  // eigenfunction mass in the last 10% of the domain
  int levels_used = 0;
  double domain_length = 0.0;  // effective L after auto-growth
  bool accepted = false;
};

inline constexpr double kTruncationThreshold = 1e-10;

struct FiberSolution {
  std::vector<Eigenpair> pairs;
  SolveDiagnostics diagnostics;
};

/// The n_modes lowest eigenpairs of the de Gennes operator at fiber xi.
FiberSolution solve_fiber(double xi, int n_modes, const DiscretizationConfig& config = {});

/// Extrapolated trapezoid quadrature of weight(x) |u(x)|^2 over the solve grids.
Extrapolation level_moment(const Eigenpair& pair, const std::function<double(double)>& weight);

/// 2 * int (xi - x) |u|^2 dx on the solve grids, extrapolated.
double mu_prime_fh(const Eigenpair& pair);

/// Boundary formula mu' = (xi^2 - mu) u(0)^2, extrapolated over the grids.
/// Independent cross-check of mu_prime_fh, not used as a source of truth.
double mu_prime_boundary(const Eigenpair& pair);

/// Discrete quadratic form int |u'|^2 + (xi - x)^2 |u|^2 per grid, extrapolated.
double rayleigh_quotient(const Eigenpair& pair);

/// |u'(0)| / sup|u| on the finest grid, using the one-sided estimate
/// (u_1 - u_0)/h - (h/2) u''(0) with u''(0) = ((xi)^2 - mu) u_0 from the equation.
double neumann_residual(const Eigenpair& pair);

/// int e^{K x} |u|^2 dx, extrapolated over the grids.
Extrapolation weighted_norm(const Eigenpair& pair, double decay_rate);

}  // namespace degennes
