#include "degennes/fiber.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "degennes/tridiagonal.hpp"

namespace degennes {

namespace {

using Real = long double;
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

constexpr int kMaxDomainGrowth = 12;
// Bisection only has to land within the inverse-iteration basin; the Rayleigh
// quotient of the long double eigenvector supplies the final precision.
constexpr double kBisectionTol = 1e-9;

struct LevelSolve {
  double spacing = 0.0;
  std::vector<Real> eigenvalues;
  std::vector<Real> derivatives;
  std::vector<RealVector> vectors;  // unweighted, L2-normalized by the trapezoid rule
};

std::string describe(double xi) {
  std::ostringstream os;
  os.precision(17);
  os << "xi=" << xi;
  return os.str();
}

SymTridiagonal<Real> fiber_matrix(double xi, Real h, Eigen::Index n) {
  SymTridiagonal<Real> t;
  t.diag.resize(n);
  t.off.setConstant(n - 1, -1.0L / (h * h));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Real dx = Real(xi) - h * Real(i);
    t.diag(i) = 2.0L / (h * h) + dx * dx;
  }
  // Symmetrized mirror stencil: trapezoid weight 1/2 on the boundary node.
  t.off(0) *= std::sqrt(2.0L);
  return t;
}

Real quadratic_form(double xi, Real h, const RealVector& u) {
  const Eigen::Index n = u.size();
  Real kinetic = 0, potential = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Real next = i + 1 < n ? u(i + 1) : Real(0);
    const Real diff = next - u(i);
    kinetic += diff * diff;
    const Real dx = Real(xi) - h * Real(i);
    potential += (i == 0 ? 0.5L : 1.0L) * dx * dx * u(i) * u(i);
  }
  return kinetic / (h * h) + potential;
}

Real mass(const RealVector& u) {
  return u.squaredNorm() - 0.5L * u(0) * u(0);
}

void fix_sign(RealVector& u) {
  Eigen::Index pivot = 0;
  if (std::abs(u(0)) < 1e-12L) u.cwiseAbs().maxCoeff(&pivot);
  if (u(pivot) < 0) u = -u;
}

LevelSolve solve_level(double xi, double spacing, Eigen::Index n, int n_modes,
                       const std::vector<Real>* guesses) {
  const Real h = spacing;
  const auto t = fiber_matrix(xi, h, n);
  LevelSolve out;
  out.spacing = spacing;

  SymTridiagonal<double> counting{t.diag.cast<double>(), t.off.cast<double>()};
  const auto [g_lo, g_hi] = gershgorin_bounds(counting);
  for (int k = 0; k < n_modes; ++k) {
    double lo = g_lo, hi = g_hi;
    if (guesses != nullptr) {
      const double g = static_cast<double>((*guesses)[static_cast<std::size_t>(k)]);
      double width = 1e-3 * std::max(1.0, std::abs(g));
      for (int grow = 0; grow < 40; ++grow) {
        lo = std::max(g_lo, g - width);
        hi = std::min(g_hi, g + width);
        if (sturm_count(counting, lo) <= k && sturm_count(counting, hi) > k) break;
        width *= 8;
      }
    }
    const Real sigma = bisect_eigenvalue(counting, k, lo, hi, kBisectionTol);
    RealVector u = inverse_iteration(t, sigma, 3);
    u(0) *= std::sqrt(2.0L);

    const Real m = mass(u);
    const Real lambda = quadratic_form(xi, h, u) / m;
    u /= std::sqrt(h * m);
    fix_sign(u);

    Real fh = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      fh += (i == 0 ? 0.5L : 1.0L) * 2.0L * (Real(xi) - h * Real(i)) * u(i) * u(i);
    }
    out.eigenvalues.push_back(lambda);
    out.derivatives.push_back(fh * h);
    out.vectors.push_back(std::move(u));
  }
  return out;
}

double tail_mass(const RealVector& u, Real h) {
  const Eigen::Index n = u.size();
  const Real cut = 0.9L * h * Real(n);
  Real sum = 0;
  for (Eigen::Index i = n - 1; i >= 0 && h * Real(i) >= cut; --i) sum += u(i) * u(i);
  return static_cast<double>(sum * h);
}

double grid_trapezoid(const GridFunction& g, const std::function<double(double, double)>& f) {
  const Eigen::Index n = g.values.size();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = g.spacing * static_cast<double>(i);
    sum += (i == 0 ? 0.5 : 1.0) * f(x, g.values(i));
  }
  return sum * g.spacing;
}

Extrapolation extrapolate_levels(const Eigenpair& pair,
                                 const std::function<double(const GridFunction&)>& per_level) {
  std::vector<double> values;
  values.reserve(pair.levels.size());
  for (const auto& level : pair.levels) values.push_back(per_level(level));
  return richardson(values);
}

}  // namespace

void DiscretizationConfig::validate() const {
  if (!(domain_length > 0.0) || !std::isfinite(domain_length))
    throw SpectralError(ErrorKind::ConfigInvalid, "domain_length must be positive");
  if (grid_points < 16) throw SpectralError(ErrorKind::ConfigInvalid, "grid_points must be >= 16");
  if (refinement_levels < 1 || refinement_levels > 8)
    throw SpectralError(ErrorKind::ConfigInvalid, "refinement_levels must lie in [1, 8]");
  if (!(target_tol > 0.0)) throw SpectralError(ErrorKind::ConfigInvalid, "target_tol must be positive");
}

FiberSolution solve_fiber(double xi, int n_modes, const DiscretizationConfig& config) {
  config.validate();
  if (n_modes < 1) throw SpectralError(ErrorKind::ConfigInvalid, "n_modes must be >= 1");
  if (!std::isfinite(xi)) throw SpectralError(ErrorKind::ConfigInvalid, "fiber must be finite");

  const double h0 = config.base_spacing();
  const double wanted_length = std::max(config.domain_length, std::max(xi, 0.0) + 12.0);
  auto n0 = static_cast<Eigen::Index>(std::ceil(wanted_length / h0 - 1e-9));

  const bool companion = config.refinement_levels == 1;
  std::vector<LevelSolve> ladder;
  double truncation = 0.0;
  for (int attempt = 0;; ++attempt) {
    if (companion && n0 % 2 != 0) ++n0;
    ladder.clear();
    std::vector<std::pair<double, Eigen::Index>> grids;
    if (companion) grids.emplace_back(2.0 * h0, n0 / 2);
    for (int k = 0; k < config.refinement_levels; ++k)
      grids.emplace_back(h0 / std::ldexp(1.0, k), n0 << k);

    for (const auto& [spacing, n] : grids) {
      const std::vector<Real>* guesses = ladder.empty() ? nullptr : &ladder.back().eigenvalues;
      ladder.push_back(solve_level(xi, spacing, n, n_modes, guesses));
    }
    truncation = 0.0;
    for (const auto& u : ladder.back().vectors)
      truncation = std::max(truncation, tail_mass(u, ladder.back().spacing));
    if (truncation < kTruncationThreshold) break;
    if (attempt == kMaxDomainGrowth)
      throw SpectralError(ErrorKind::TruncationDominated,
                          describe(xi) + " tail mass " + std::to_string(truncation));
    n0 = static_cast<Eigen::Index>(std::ceil(1.25 * static_cast<double>(n0)));
  }

  FiberSolution solution;
  auto& diag = solution.diagnostics;
  diag.truncation_indicator = truncation;
  diag.levels_used = static_cast<int>(ladder.size());
  diag.domain_length = static_cast<double>(n0) * h0;

  for (int k = 0; k < n_modes; ++k) {
    std::vector<Real> lambdas, slopes;
    for (const auto& level : ladder) {
      lambdas.push_back(level.eigenvalues[static_cast<std::size_t>(k)]);
      slopes.push_back(level.derivatives[static_cast<std::size_t>(k)]);
    }
    Extrapolation mu, dmu;
    if (companion) {
      mu = {static_cast<double>(lambdas[1]), static_cast<double>(std::abs(lambdas[1] - lambdas[0]) / 3)};
      dmu = {static_cast<double>(slopes[1]), static_cast<double>(std::abs(slopes[1] - slopes[0]) / 3)};
    } else {
      mu = richardson(lambdas);
      dmu = richardson(slopes);
    }
    diag.estimated_eigenvalue_error = std::max(diag.estimated_eigenvalue_error, mu.tail);
    diag.estimated_derivative_error = std::max(diag.estimated_derivative_error, dmu.tail);

    Eigenpair pair;
    pair.band_index = k + 1;
    pair.fiber = xi;
    pair.mu = mu.value;
    pair.mu_prime = dmu.value;
    for (std::size_t l = companion ? 1 : 0; l < ladder.size(); ++l) {
      pair.levels.push_back(
          {ladder[l].spacing, ladder[l].vectors[static_cast<std::size_t>(k)].cast<double>()});
    }
    pair.norm_error = std::abs(grid_trapezoid(pair.eigenfunction(), [](double, double u) { return u * u; }) - 1.0);
    pair.neumann_residual = neumann_residual(pair);
    solution.pairs.push_back(std::move(pair));
  }

  diag.accepted = diag.estimated_eigenvalue_error < config.target_tol &&
                  diag.truncation_indicator < kTruncationThreshold;
  if (!diag.accepted && config.strict) {
    throw SpectralError(ErrorKind::NotConverged,
                        describe(xi) + " estimated eigenvalue error " +
                            std::to_string(diag.estimated_eigenvalue_error) + " above target");
  }
  return solution;
}

Extrapolation level_moment(const Eigenpair& pair, const std::function<double(double)>& weight) {
  return extrapolate_levels(pair, [&](const GridFunction& g) {
    return grid_trapezoid(g, [&](double x, double u) { return weight(x) * u * u; });
  });
}

double mu_prime_fh(const Eigenpair& pair) {
  const double xi = pair.fiber;
  return level_moment(pair, [xi](double x) { return 2.0 * (xi - x); }).value;
}

double mu_prime_boundary(const Eigenpair& pair) {
  const double xi = pair.fiber;
  return extrapolate_levels(pair, [xi](const GridFunction& g) {
           const RealVector u = g.values.cast<Real>();
           const Real lambda = quadratic_form(xi, g.spacing, u) / mass(u);
           return static_cast<double>((Real(xi) * Real(xi) - lambda) * u(0) * u(0));
         }).value;
}

double rayleigh_quotient(const Eigenpair& pair) {
  const double xi = pair.fiber;
  return extrapolate_levels(pair, [xi](const GridFunction& g) {
           const RealVector u = g.values.cast<Real>();
           return static_cast<double>(quadratic_form(xi, g.spacing, u) / mass(u));
         }).value;
}

double neumann_residual(const Eigenpair& pair) {
  const GridFunction& g = pair.eigenfunction();
  if (g.values.size() < 2) return 0.0;
  const double h = g.spacing;
  const double u0 = g.values(0);
  const double curvature = (pair.fiber * pair.fiber - pair.mu) * u0;
  const double slope = (g.values(1) - u0) / h - 0.5 * h * curvature;
  const double sup = g.values.cwiseAbs().maxCoeff();
  return sup > 0.0 ? std::abs(slope) / sup : 0.0;
}

Extrapolation weighted_norm(const Eigenpair& pair, double decay_rate) {
  return level_moment(pair, [decay_rate](double x) { return std::exp(decay_rate * x); });
}

}  // namespace degennes
