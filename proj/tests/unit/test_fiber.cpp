#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <random>

#include "degennes/fiber.hpp"
#include "degennes/quadrature.hpp"
#include "degennes/richardson.hpp"
#include "degennes/tridiagonal.hpp"
#include "frozen.hpp"

using namespace degennes;

namespace {
double mu1(double xi, const DiscretizationConfig& cfg = {}) {
  return solve_fiber(xi, 1, cfg).pairs[0].mu;
}
}  // namespace

TEST_CASE("sturm bisection and inverse iteration match a dense solve") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const int n = 60;
  SymTridiagonal<double> t{Eigen::VectorXd(n), Eigen::VectorXd(n - 1)};
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) dense(i, i) = t.diag(i) = 3.0 * U(rng);
  for (int i = 0; i + 1 < n; ++i) dense(i, i + 1) = dense(i + 1, i) = t.off(i) = U(rng);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
  const auto [lo, hi] = gershgorin_bounds(t);
  for (int k : {0, 1, 5, 30, n - 1}) {
    const double lam = bisect_eigenvalue(t, k, lo, hi, 1e-15);
    CHECK(lam == doctest::Approx(es.eigenvalues()(k)).epsilon(1e-12));
    const Eigen::VectorXd v = inverse_iteration(t, lam + 1e-10);
    CHECK((dense * v - lam * v).norm() < 1e-8);
  }
  CHECK(sturm_count(t, hi + 1.0) == n);
  CHECK(sturm_count(t, lo - 1.0) == 0);
}

TEST_CASE("richardson removes even powers") {
  auto f = [](double h) { return 1.0 + 0.3 * h * h - 2.0 * std::pow(h, 4); };
  std::vector<double> s{f(0.1), f(0.05), f(0.025)};
  const auto r = richardson(s);
  CHECK(std::abs(r.value - 1.0) < 1e-14);
  CHECK(richardson_noise_gain(1) == 1.0);
  CHECK(richardson_noise_gain(3) > 1.0);
}

TEST_CASE("tanh-sinh handles the endpoint singularity") {
  const auto r = tanh_sinh([](double t) { return 1.0 / std::sqrt(t); }, 0.0, 1.0);
  CHECK(std::abs(r.value - 2.0) < 1e-10);
  const auto g = tanh_sinh([](double x) { return std::exp(-x * x); }, 0.0, 6.0);
  CHECK(std::abs(g.value - std::sqrt(std::numbers::pi) / 2) < 1e-12);
}

TEST_CASE("config validation") {
  DiscretizationConfig c;
  c.grid_points = 8;
  CHECK_THROWS_AS(solve_fiber(0.0, 1, c), SpectralError);
  try {
    solve_fiber(0.0, 1, c);
  } catch (const SpectralError& e) {
    CHECK(e.kind() == ErrorKind::ConfigInvalid);
  }
  c = {};
  c.domain_length = 0.0;
  try {
    solve_fiber(0.0, 1, c);
    FAIL("expected ConfigInvalid");
  } catch (const SpectralError& e) {
    CHECK(e.kind() == ErrorKind::ConfigInvalid);
  }
}

TEST_CASE("unreachable tolerance: thrown when strict, flagged otherwise") {
  DiscretizationConfig c;
  c.target_tol = 1e-16;
  c.refinement_levels = 1;
  try {
    solve_fiber(0.3, 1, c);
    FAIL("expected NotConverged");
  } catch (const SpectralError& e) {
    CHECK(e.kind() == ErrorKind::NotConverged);
  }
  c.strict = false;
  CHECK_FALSE(solve_fiber(0.3, 1, c).diagnostics.accepted);
}

TEST_CASE("even oscillator anchors at xi = 0") {
  const auto sol = solve_fiber(0.0, 2);
  REQUIRE(sol.diagnostics.accepted);
  CHECK(std::abs(sol.pairs[0].mu - frozen::kMu1AtZero) < 1e-6);
  CHECK(std::abs(sol.pairs[1].mu - frozen::kMu2AtZero) < 1e-6);
  CHECK(std::abs(mu_prime_fh(sol.pairs[0]) - frozen::kMu1PrimeAtZero) < 1e-5);
  CHECK(neumann_residual(sol.pairs[0]) < 1e-6);
  CHECK(neumann_residual(sol.pairs[1]) < 1e-6);
}

TEST_CASE("boundary formula agrees with Feynman-Hellmann") {
  for (double xi : {-0.5, 0.0, 0.77, 1.5, 3.0}) {
    const auto p = solve_fiber(xi, 1).pairs[0];
    CHECK(std::abs(mu_prime_boundary(p) - mu_prime_fh(p)) < 1e-8);
  }
}

TEST_CASE("large fiber tends to the half-oscillator limit") {
  CHECK(std::abs(mu1(8.0) - 1.0) < 1e-4);
}

TEST_CASE("minimum fiber value against the dense oracle") {
  CHECK(std::abs(mu1(0.7682) - frozen::kDenseTheta0) < 1e-4);
  const auto p = solve_fiber(frozen::kDenseXi0, 1).pairs[0];
  CHECK(std::abs(mu_prime_fh(p)) < 1e-5);
}

TEST_CASE("Feynman-Hellmann against a central difference") {
  const auto p = solve_fiber(2.0, 1).pairs[0];
  const double fd = (mu1(2.001) - mu1(1.999)) / 0.002;
  CHECK(p.mu_prime > 0.0);
  CHECK(std::abs(p.mu_prime - fd) < 1e-6 * std::abs(fd));

  // observed order over s = 1e-2, 1e-3
  const double xi = 1.2;
  const double fh = solve_fiber(xi, 1).pairs[0].mu_prime;
  auto err = [&](double s) { return std::abs(fh - (mu1(xi + s) - mu1(xi - s)) / (2 * s)); };
  const double order = std::log10(err(1e-2) / err(1e-3));
  CHECK(order >= 1.9);
}

TEST_CASE("synthetic sin(x) violates the Neumann condition") {
  Eigenpair p;
  p.fiber = 0.0;
  p.mu = 1.0;
  GridFunction g;
  g.spacing = 1e-3;
  g.values.resize(3000);
  for (int i = 0; i < 3000; ++i) g.values(i) = std::sin(i * g.spacing);
  p.levels = {g};
  CHECK(neumann_residual(p) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("eigenpair invariants over several fibers") {
  const DiscretizationConfig base;
  for (double xi : {-1.0, 0.0, 0.7682, 2.0, 4.0}) {
    CAPTURE(xi);
    const auto sol = solve_fiber(xi, 3, base);
    REQUIRE(sol.diagnostics.accepted);
    CHECK(sol.diagnostics.truncation_indicator >= 0.0);
    CHECK(sol.diagnostics.truncation_indicator < kTruncationThreshold);
    CHECK(sol.diagnostics.estimated_eigenvalue_error < base.target_tol);
    for (std::size_t j = 0; j < 3; ++j) {
      const auto& p = sol.pairs[j];
      CHECK(p.mu > 0.0);
      if (j > 0) CHECK(p.mu > sol.pairs[j - 1].mu);
      CHECK(p.eigenfunction().values(0) >= 0.0);
      CHECK(p.norm_error < 1e-8);
      CHECK(std::abs(level_moment(p, [](double) { return 1.0; }).value - 1.0) < 1e-8);
      CHECK(p.neumann_residual < 1e-6);
      CHECK(std::abs(rayleigh_quotient(p) - p.mu) < 10 * base.target_tol);
    }
  }
}

TEST_CASE("halving the spacing stays inside the error estimate") {
  DiscretizationConfig fine;
  fine.grid_points = 1200;
  for (double xi : {0.0, 0.7682, 2.5}) {
    const auto a = solve_fiber(xi, 2);
    const auto b = solve_fiber(xi, 2, fine);
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(a.pairs[j].mu - b.pairs[j].mu) < a.diagnostics.estimated_eigenvalue_error);
  }
}

TEST_CASE("longer domain leaves the eigenvalues alone") {
  DiscretizationConfig longer;
  longer.domain_length = 15.0;
  longer.grid_points = 750;  // same spacing
  for (double xi : {0.0, 0.7682, 3.0}) {
    const auto a = solve_fiber(xi, 2);
    const auto b = solve_fiber(xi, 2, longer);
    for (int j = 0; j < 2; ++j) CHECK(std::abs(a.pairs[j].mu - b.pairs[j].mu) < 1e-10);
  }
}

TEST_CASE("Gaussian weighted norm at xi = 0") {
  const auto p = solve_fiber(0.0, 1).pairs[0];
  CHECK(std::abs(weighted_norm(p, 1.0).value - frozen::kGaussianWeighted) < 1e-6);
  CHECK(std::abs(weighted_norm(p, 0.0).value - 1.0) < 1e-8);
}
