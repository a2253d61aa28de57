#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "degennes/mourre.hpp"
#include "frozen.hpp"

using namespace degennes;

namespace {

const BandSet& bands() {
  static const BandSet set = compute_band_set();
  return set;
}

MourreHypotheses example(double c0 = 1, double c1 = 1, double c2 = 1) {
  MourreHypotheses h;
  h.c0 = c0;
  h.c1 = c1;
  h.c2 = c2;
  return h;
}

std::string violated(auto&& f) {
  try {
    f();
  } catch (const SpectralError& e) {
    if (e.kind() != ErrorKind::ConstraintViolated) return "wrong kind";
    return std::string(e.what()).substr(std::string("ConstraintViolated: ").size());
  }
  return "none";
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const SpectralError& e) {
    return e.kind();
  }
  FAIL("no SpectralError");
  return ErrorKind::ConfigInvalid;
}

}  // namespace

TEST_CASE("universal integrals") {
  const auto u = universal_integrals();
  CHECK(std::abs(u.inv_sqrt - frozen::kInvSqrtIntegral) < 1e-8);
  CHECK(std::abs(u.log_sqrt - frozen::kLogSqrtIntegral) < 1e-8);
}

TEST_CASE("worked example I = [2,3], J = [1,4], M = 1") {
  const auto L = ledger(example());
  CHECK(std::abs(L.sup_J_ell_plus_i - frozen::kSupJ) < 1e-15);
  CHECK(std::abs(L.sup_B_z_plus_i - frozen::kSupB) < 1e-15);
  CHECK(L.dist_I_Jc == 1.0);
  CHECK(std::abs(L.eps1 - frozen::kEps1) < 1e-15);
  CHECK(std::abs(L.eps1 - 0.013165) < 1e-6);
  CHECK(L.eps0 <= L.eps1);
  CHECK(L.eps2 > 0.0);
  CHECK(L.eps2 <= L.eps1);
  CHECK(L.c0_tilde > 0.0);
  CHECK(std::isfinite(L.bound.C_final));
  CHECK(L.bound.C_final > 0.0);
}

TEST_CASE("LAP bound recomposed by hand") {
  const auto L = ledger(example());
  const double sJ = frozen::kSupJ, ct = L.c0_tilde;
  const double eh = std::min(1.0, L.eps0);
  const double K1 = 2.0 / std::sqrt(ct);
  const double K2 = 4.0 * std::sqrt(2.0) * sJ;
  const double K = (K1 + K2) * (1.0 + 2.0 * std::sqrt(sJ));
  const double Ce = 4.0 * std::sqrt(2.0) * sJ / eh;
  const double C = Ce + (K1 + K2) * (1.0 + std::sqrt(Ce)) * 2.0 +
                   std::sqrt(2.0) * std::sqrt(K) * (K1 + K2) * std::sqrt(2.0 * std::numbers::pi);
  const auto b = lap_bound(L, 1, 1, 1);
  CHECK(b.K1 == doctest::Approx(K1).epsilon(1e-14));
  CHECK(b.K2 == doctest::Approx(K2).epsilon(1e-14));
  CHECK(b.K == doctest::Approx(K).epsilon(1e-14));
  CHECK(b.C_eps0 == doctest::Approx(Ce).epsilon(1e-14));
  CHECK(b.C_final == doctest::Approx(C).epsilon(1e-12));
  CHECK(b == L.bound);
}

TEST_CASE("lower-bound floors on random samples") {
  const auto L = ledger(example());
  const double c0 = 1, c1 = 1;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double c_floor_eps = 1.0 / (2.0 * c1 * L.gamma());
  for (int i = 0; i < 50; ++i) {
    const double eps = L.eps1 * (1e-6 + (1 - 1e-6) * U(rng));
    const std::complex<double> z(2.0 + U(rng), 1e-9 + U(rng));
    CAPTURE(eps);
    CAPTURE(z);
    CHECK(L.D1(eps, z) >= c0 * eps / 4.0);
    const double C = L.C(eps, z);
    CHECK(C > 0.0);
    CHECK(C < 1.0);
    if (eps <= c_floor_eps) CHECK(C >= 0.5 / L.gamma());
    const double e0 = L.eps0 * U(rng);
    if (e0 > 0) CHECK(L.D3(e0, z) >= c0 * e0 / (4.0 * std::sqrt(2.0) * L.sup_J_ell_plus_i));
  }
}

TEST_CASE("eps1 takes the smaller branch") {
  const double g = ledger(example()).gamma();
  // small c1: 1/(2 c1) wins
  const auto a = ledger(example(1, 1e-3));
  CHECK(a.eps1 == doctest::Approx(1.0 / (2e-3) / g).epsilon(1e-14));
  CHECK(std::isfinite(a.eps1));
  // large c1: c0/(4 c1^2 supJ) wins
  const auto b = ledger(example(1, 10));
  CHECK(b.eps1 == doctest::Approx(1.0 / (400.0 * frozen::kSupJ) / g).epsilon(1e-14));
}

TEST_CASE("K1 halves when c0 quadruples") {
  // c0_tilde is proportional to c0 once c1/c0 is held fixed, or as c1 -> 0
  const auto a = ledger(example(1, 1)), b = ledger(example(4, 4));
  CHECK(b.bound.K1 / a.bound.K1 == doctest::Approx(0.5).epsilon(1e-14));
  const auto c = ledger(example(1, 1e-12)), d = ledger(example(4, 1e-12));
  CHECK(d.bound.K1 / c.bound.K1 == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("vanishing weight gives zero") {
  const auto b = lap_bound(ledger(example()), 0.0, 1.0, 1.0);
  CHECK(b.C_final == 0.0);
  CHECK(kind_of([] { lap_bound(ledger(example()), -1.0, 1.0, 1.0); }) == ErrorKind::ConfigInvalid);
}

TEST_CASE("C_final monotone on a 3x3x3 lattice") {
  const double v[3] = {0.5, 1.0, 2.0};
  auto Cf = [](double c0, double c1, double c2, double nC = 1, double nCA = 1, double nAC = 1) {
    return lap_bound(ledger(example(c0, c1, c2)), nC, nCA, nAC).C_final;
  };
  for (double c0 : v)
    for (double c1 : v)
      for (double c2 : v) {
        const double base = Cf(c0, c1, c2);
        CHECK(Cf(2 * c0, c1, c2) <= base);
        CHECK(Cf(c0, 2 * c1, c2) >= base);
        CHECK(Cf(c0, c1, 2 * c2) >= base);
        CHECK(Cf(c0, c1, c2, 2, 1, 1) >= base);
        CHECK(Cf(c0, c1, c2, 1, 2, 1) >= base);
        CHECK(Cf(c0, c1, c2, 1, 1, 2) >= base);
      }
}

TEST_CASE("hypothesis validation") {
  auto h = example();
  h.c0 = 0;
  CHECK(kind_of([&] { ledger(h); }) == ErrorKind::ConfigInvalid);
  h = example();
  h.I = {1.0, 3.0};
  CHECK(kind_of([&] { ledger(h); }) == ErrorKind::ConfigInvalid);
}

TEST_CASE("rationals") {
  CHECK(Rational(2, -4) == Rational(-1, 2));
  CHECK(Rational::from_double(0.2) == Rational(1, 5));
  CHECK(Rational::from_double(0.25) == Rational(1, 4));
  CHECK(Rational::from_double(-1.25) == Rational(-5, 4));
  CHECK((Rational(1, 3) + Rational(1, 6)).str() == "1/2");
  CHECK(Rational(-3, 2) < Rational(-5, 4));
}

TEST_CASE("exact exponent table") {
  const auto s0 = scaling_exponents(Rational(0));
  CHECK(s0.final_exponent == Rational(-2));
  const auto q = scaling_exponents(Rational(1, 4));
  for (const auto& c : q.candidates) CHECK(c == Rational(-5, 4));
  CHECK(q.final_exponent.str() == "-5/4");
  const auto h = scaling_exponents(Rational(1, 2));
  CHECK(h.final_exponent == Rational(-3, 2));
  CHECK(h.final_exponent == h.candidates[2]);
  const auto f = scaling_exponents(Rational(1, 5));
  CHECK(f.final_exponent == Rational(-7, 5));
  CHECK(f.at("c0") == Rational(6, 5));
  CHECK(f.at("K1") == Rational(-3, 5));
  CHECK(f.at("C_eps0") == Rational(-7, 5));
  CHECK(kind_of([] { scaling_exponents(Rational(1)); }) == ErrorKind::ConfigInvalid);
}

TEST_CASE("window constraints name the failed inequality") {
  const double t0 = bands().theta0();
  CHECK(violated([&] { build_window(1e-2, 0.2, 0.3, 2, 0.5, 0.25, 1, t0); }) == "beta > 2·alpha");
  CHECK(violated([&] { build_window(1e-2, 0.0, 0.5, 2, 1 - t0, 0.25, 1, t0); }) == "a < 1−Θ₀");
  CHECK(violated([&] { build_window(0, 0.2, 0.5, 2, 0.5, 0.25, 1, t0); }) == "h > 0");
  CHECK(violated([&] { build_window(1e-2, 1.0, 2.5, 4, 0.5, 0.25, 1, t0); }) == "0 ≤ alpha < 1");
  CHECK(violated([&] { build_window(1e-2, 0.2, 0.5, 0.45, 0.5, 0.25, 1, t0); }) == "gamma ≥ beta");
  CHECK(violated([&] { build_window(1e-2, 0.2, 0.5, 1.2, 0.5, 0.25, 1, t0); }) ==
        "gamma > 1+2·alpha");
  CHECK(violated([&] { build_window(1e-2, 0.2, 0.5, 2, 0.5, 0.0, 1, t0); }) == "b > 0");
  CHECK(violated([&] { build_window(1e-2, 0.2, 0.5, 2, 0.2, 0.25, 1, t0); }) == "b < a");
  CHECK(violated([&] { build_window(1e-2, 0.2, 0.5, 2, 0.5, 0.25, -1, t0); }) == "V_inf ≥ 0");
}

TEST_CASE("window arithmetic") {
  const double t0 = bands().theta0();
  const auto w = build_window(1e-2, 0.2, 0.5, 2, 0.5, 0.25, 1, t0);
  const double ha = std::pow(1e-2, 0.2);
  CHECK(w.e == doctest::Approx(t0 + 0.5 * ha));
  CHECK(w.delta == doctest::Approx(0.025));
  CHECK(w.d == doctest::Approx(0.25 * ha));
  CHECK(w.c_h == doctest::Approx((0.025 + 1e-4) / (0.25 * ha)).epsilon(1e-14));
  CHECK(w.I.strictly_inside(w.J));
}

TEST_CASE("Mourre constant of the unperturbed band") {
  const auto& b = bands();
  const auto w = build_window(0.1, 0.0, 1.0, 1.5, 0.05, 0.01, 1, b.theta0());
  const auto m = unperturbed_mourre_constant(w, b);
  CHECK_FALSE(m.degenerate);
  CHECK(m.raw_inf > 0.0);
  CHECK(m.c0 == doctest::Approx(2 * 0.1 * m.raw_inf));
  CHECK(m.normalized == doctest::Approx(m.c0 / 0.1));

  // J reaching the band limit: infimum 0, flagged
  const auto top = build_window(0.1, 0.0, 1.0, 1.5, 0.38, 0.05, 1, b.theta0());
  const auto d = unperturbed_mourre_constant(top, b);
  CHECK(d.degenerate);
  CHECK(d.raw_inf == 0.0);

  SemiclassicalWindow below = w;
  below.J = {b.theta0() - 0.2, b.theta0() - 0.1};
  CHECK(kind_of([&] { unperturbed_mourre_constant(below, b); }) == ErrorKind::WindowEmpty);
}

TEST_CASE("infimum of |mu'| scales like the square root of the distance") {
  const auto& b = bands();
  std::vector<double> x, y;
  for (double a : log_spaced(1e-3, 1e-1, 7)) {
    const auto w = build_window(0.1, 0.0, 1.0, 1.5, a, 0.1 * a, 1, b.theta0());
    x.push_back(std::log(a));
    y.push_back(std::log(unperturbed_mourre_constant(w, b).raw_inf));
  }
  CHECK(fit_line(x, y)[0] == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("fit and grid helpers") {
  const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  const auto f = fit_line(x, y);
  CHECK(f[0] == doctest::Approx(2.0));
  CHECK(f[1] == doctest::Approx(1.0));
  CHECK(f[2] < 1e-14);
  const auto g = log_spaced(1e-4, 1e-1, 13);
  CHECK(g.front() == 1e-4);
  CHECK(g.back() == 1e-1);
  CHECK(g[4] == doctest::Approx(1e-3));
}

TEST_CASE("audit: c0 and c2 prefactors leave the slope alone") {
  const auto hs = log_spaced(1e-4, 1e-1, 13);
  const auto base = scaling_audit(0.2, hs, bands());
  CHECK(base.rows.size() == 13);
  CHECK(base.target == doctest::Approx(-1.4));
  AuditOptions o;
  o.c0_prefactor = 2.0;
  CHECK(std::abs(scaling_audit(0.2, hs, bands(), o).slope - base.slope) < 0.01);
  o = {};
  o.c2_prefactor = 2.0;
  CHECK(std::abs(scaling_audit(0.2, hs, bands(), o).slope - base.slope) < 0.01);
}

// C_final adds terms of different orders in h; c1 enters several of them
// (eps1, c0_tilde) with different weights, so over [1e-4, 1e-1] doubling it
// shifts the fitted slope by ~0.03. The shift dies out as h -> 0.
TEST_CASE("audit: c1 prefactor on [1e-4, 1e-1]" * doctest::should_fail()) {
  const auto hs = log_spaced(1e-4, 1e-1, 13);
  AuditOptions o;
  o.c1_prefactor = 2.0;
  CHECK(std::abs(scaling_audit(0.2, hs, bands(), o).slope - scaling_audit(0.2, hs, bands()).slope) <
        0.01);
}

TEST_CASE("audit: c1 prefactor deep in the semiclassical range") {
  const auto hs = log_spaced(1e-8, 1e-6, 9);
  AuditOptions o;
  o.c1_prefactor = 2.0;
  for (double alpha : {0.0, 0.2}) {
    const double d =
        scaling_audit(alpha, hs, bands(), o).slope - scaling_audit(alpha, hs, bands()).slope;
    CHECK(std::abs(d) < 0.01);
  }
}

TEST_CASE("audit errors") {
  const std::vector<double> narrow{1e-2, 3e-2, 1e-1};
  CHECK(kind_of([&] { scaling_audit(0.2, narrow, bands()); }) == ErrorKind::ConfigInvalid);
  AuditOptions o;
  o.fit_threshold = 1e-9;
  CHECK(kind_of([&] { scaling_audit(0.2, log_spaced(1e-4, 1e-1, 5), bands(), o); }) ==
        ErrorKind::FitUnstable);
}
