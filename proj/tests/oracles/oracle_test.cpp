// Re-derives every frozen expectation without touching the library.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dense_oracle.hpp"
#include "frozen.hpp"

namespace {

template <typename F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("closed forms behind the literals") {
  const double pi = std::numbers::pi;
  CHECK(frozen::kMu1PrimeAtZero == doctest::Approx(-2.0 / std::sqrt(pi)).epsilon(1e-15));
  // moment of the normalised Gaussian, by quadrature
  const double moment =
      simpson([&](double x) { return -2.0 * x * (2.0 / std::sqrt(pi)) * std::exp(-x * x); }, 0.0,
              12.0, 40000);
  CHECK(std::abs(moment - frozen::kMu1PrimeAtZero) < 1e-12);

  const double weighted =
      simpson([&](double x) { return std::exp(x) * (2.0 / std::sqrt(pi)) * std::exp(-x * x); }, 0.0,
              14.0, 8000);
  CHECK(std::abs(weighted - frozen::kGaussianWeighted) < 1e-12);
  CHECK(std::abs(std::exp(0.25) * (1.0 + std::erf(0.5)) - frozen::kGaussianWeighted) < 1e-15);
}

TEST_CASE("universal integrals by substitution") {
  // t = v^2 removes the t^{-1/2}; t = e^{-v^2} for the log one
  const double a = simpson([](double) { return 2.0; }, 0.0, 1.0, 2);
  const double b = simpson([](double v) { return 2.0 * v * v * std::exp(-v * v / 2.0); }, 0.0, 40.0,
                           20000);
  CHECK(a == doctest::Approx(frozen::kInvSqrtIntegral).epsilon(1e-15));
  CHECK(std::abs(b - frozen::kLogSqrtIntegral) < 1e-12);
  CHECK(std::abs(std::pow(2.0, 1.5) * std::tgamma(1.5) - frozen::kLogSqrtIntegral) < 1e-15);
}

TEST_CASE("eps1 worked example arithmetic") {
  // corners of J = [1,4] and B = [2,3] x [0,1]
  const double supJ = std::max(std::hypot(1.0, 1.0), std::hypot(4.0, 1.0));
  const double supB = std::hypot(3.0, 1.0 + 1.0);
  const double dist = std::min(2.0 - 1.0, 4.0 - 3.0);
  CHECK(supJ == frozen::kSupJ);
  CHECK(std::abs(supB - frozen::kSupB) < 1e-15);
  const double eps1 = std::min(1.0 / (4.0 * 1.0 * supJ), 1.0 / 2.0) / (supB / dist + 1.0);
  CHECK(std::abs(eps1 - frozen::kEps1) < 1e-16);
  CHECK(std::abs(eps1 - 0.013165) < 1e-6);
}

TEST_CASE("dense oracle reproduces its frozen values") {
  const double mu0 = oracle::ground_energy(0.0);
  CHECK(std::abs(mu0 - frozen::kDenseMu1AtZero) < 1e-11);
  CHECK(std::abs(mu0 - 1.0) < 1e-6);
  const auto m = oracle::ground_minimum();
  CHECK(std::abs(m.theta0 - frozen::kDenseTheta0) < 1e-11);
  CHECK(std::abs(m.xi0 - frozen::kDenseXi0) < 1e-10);
  // the identity Theta0 = xi0^2 at the oracle's own resolution
  CHECK(std::abs(m.theta0 - m.xi0 * m.xi0) < 1e-6);
  CHECK(m.theta0 > 0.0);
  CHECK(m.theta0 < 1.0);
}
