#include "degennes/mourre.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "degennes/quadrature.hpp"

namespace degennes {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void require(bool ok, const std::string& inequality) {
  if (!ok) throw SpectralError(ErrorKind::ConstraintViolated, inequality);
}

}  // namespace

void MourreHypotheses::validate() const {
  auto check = [](bool ok, const std::string& what) {
    if (!ok) throw SpectralError(ErrorKind::ConfigInvalid, what);
  };
  check(c0 > 0 && c1 > 0 && c2 > 0, "c0, c1, c2 must be positive");
  check(M > 0, "M must be positive");
  check(I.lo < I.hi && J.lo < J.hi, "intervals must be non-degenerate");
  check(I.strictly_inside(J), "I must lie strictly inside J");
}

UniversalIntegrals universal_integrals() {
  const QuadratureResult a = tanh_sinh([](double t) { return 1.0 / std::sqrt(t); }, 0.0, 1.0);
  const QuadratureResult b = tanh_sinh(
      [](double t) { return std::sqrt(std::abs(std::log(t))) / std::sqrt(t); }, 0.0, 1.0);
  return {a.value, b.value, a.error_estimate, b.error_estimate};
}

double ConstantsLedger::C(double eps, std::complex<double> z) const {
  const double r = 1.0 + std::abs(z + std::complex<double>(0, 1)) / dist_I_Jc;
  return (1.0 - hyp.c1 * eps * r) / r;
}

double ConstantsLedger::D1(double eps, std::complex<double> z) const {
  const double c = C(eps, z);
  const double c1e = hyp.c1 * eps;
  return (z.imag() + hyp.c0 * eps - c1e * c1e * sup_J_ell_plus_i / c) / (1.0 + c1e / c);
}

double ConstantsLedger::D2(double eps, std::complex<double> z) const {
  return C(eps, z) / (1.0 + hyp.c1 * eps / D1(eps, z) * sup_J_ell_plus_i);
}

double ConstantsLedger::D3(double eps, std::complex<double> z) const {
  return std::min(D1(eps, z) / sup_J_ell_plus_i, D2(eps, z)) / std::sqrt(2.0);
}

ConstantsLedger ledger(const MourreHypotheses& hyp) {
  hyp.validate();
  ConstantsLedger L;
  L.hyp = hyp;
  const double c0 = hyp.c0, c1 = hyp.c1;
  L.sup_J_ell_plus_i = std::sqrt(std::max(hyp.J.lo * hyp.J.lo, hyp.J.hi * hyp.J.hi) + 1.0);
  L.sup_B_z_plus_i = std::sqrt(std::max(hyp.I.lo * hyp.I.lo, hyp.I.hi * hyp.I.hi) +
                               (hyp.M + 1.0) * (hyp.M + 1.0));
  L.dist_I_Jc = std::min(hyp.I.lo - hyp.J.lo, hyp.J.hi - hyp.I.hi);
  const double sJ = L.sup_J_ell_plus_i;
  const double g = L.gamma();

  L.eps1 = std::min(c0 / (4.0 * c1 * c1 * sJ), 1.0 / (2.0 * c1)) / g;
  L.eps0 = std::min(L.eps1, 2.0 * sJ / (c0 * g * (1.0 + 4.0 * c1 * sJ / c0)));
  L.c0_tilde = 0.5 * c0 / (1.0 + 2.0 * (1.0 + 4.0 * c1 * sJ / c0) * g + 4.0 * c1 / c0);

  // eps2 is defined through C and D2 at the same (eps, z); take the smallest
  // value over a grid of eps in (0, eps1] and z in B.
  double eps2 = L.eps1;
  for (int k = 0; k <= 24; ++k) {
    const double eps = L.eps1 * std::pow(10.0, -6.0 * k / 24.0);
    for (double x : {hyp.I.lo, 0.5 * (hyp.I.lo + hyp.I.hi), hyp.I.hi})
      for (double y : {0.0, 0.25 * hyp.M, 0.5 * hyp.M, hyp.M}) {
        const std::complex<double> z(x, y);
        const double d2 = L.D2(eps, z);
        eps2 = std::min({eps2, c0 * sJ / (2.0 * c1 * c1 * L.C(eps, z)), 2.0 * d2 * d2 / c0});
      }
  }
  L.eps2 = eps2;
  L.integrals = universal_integrals();
  L.bound = lap_bound(L, 1.0, 1.0, 1.0);
  return L;
}

LapBound lap_bound(const ConstantsLedger& L, double norm_C, double norm_CA, double norm_AC) {
  if (norm_C < 0 || norm_CA < 0 || norm_AC < 0)
    throw SpectralError(ErrorKind::ConfigInvalid, "norms must be nonnegative");
  if (norm_C == 0) norm_CA = norm_AC = 0;
  const double c0 = L.hyp.c0, c2 = L.hyp.c2, sJ = L.sup_J_ell_plus_i;
  LapBound b;
  b.eps_hat = std::min(1.0, L.eps0);
  b.K1 = 2.0 / std::sqrt(L.c0_tilde) * std::max(norm_CA, norm_AC);
  b.K2 = 4.0 * std::numbers::sqrt2 * c2 * sJ / c0 * norm_C;
  b.K = (b.K1 + b.K2) * norm_C * (1.0 + 2.0 * std::sqrt(sJ) / std::sqrt(c0));
  b.C_eps0 = 4.0 * std::numbers::sqrt2 * sJ / c0 * norm_C * norm_C / b.eps_hat;
  b.C_final = b.C_eps0 + (b.K1 + b.K2) * (1.0 + std::sqrt(b.C_eps0)) * L.integrals.inv_sqrt +
              std::numbers::sqrt2 * std::sqrt(b.K) * (b.K1 + b.K2) * L.integrals.log_sqrt;
  return b;
}

// --- exact exponents -------------------------------------------------------

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0) throw SpectralError(ErrorKind::ConfigInvalid, "zero denominator");
  if (d < 0) n = -n, d = -d;
  const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
  num = g ? n / g : 0;
  den = g ? d / g : 1;
}

Rational Rational::from_double(double x, std::int64_t max_den) {
  // Continued fraction convergents.
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int i = 0; i < 64; ++i) {
    const double a = std::floor(r);
    const std::int64_t ai = static_cast<std::int64_t>(a);
    const std::int64_t q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    const std::int64_t p2 = ai * p1 + p0;
    p0 = p1, q0 = q1, p1 = p2, q1 = q2;
    if (std::abs(double(p1) / double(q1) - x) < 1e-15 * std::max(1.0, std::abs(x))) break;
    r = 1.0 / (r - a);
  }
  return Rational(p1, q1);
}

std::string Rational::str() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
Rational operator-(Rational a, Rational b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
bool operator<(Rational a, Rational b) { return a.num * b.den < b.num * a.den; }

Rational ScalingExponents::at(const std::string& name) const {
  for (const auto& [key, value] : table)
    if (key == name) return value;
  throw SpectralError(ErrorKind::ConfigInvalid, "no exponent named " + name);
}

ScalingExponents scaling_exponents(Rational alpha) {
  if (alpha < Rational(0) || !(alpha < Rational(1)))
    throw SpectralError(ErrorKind::ConfigInvalid, "alpha must lie in [0, 1)");
  const Rational a = alpha, one(1), half(1, 2);
  ScalingExponents s;
  s.alpha = a;
  s.table = {
      {"c0", one + a},
      {"c1", one - a},
      {"c2", Rational(2) - a},
      {"eps0", Rational(-1) + Rational(4) * a},
      {"eps1", Rational(-1) + Rational(4) * a},
      {"K1", Rational(0) - half - half * a},
      {"K2", one - Rational(2) * a},
      {"K", Rational(-1) - a},
      {"C_eps0", Rational(-2) + Rational(3) * a},
  };
  s.candidates = {Rational(-2) + Rational(3) * a, Rational(-3, 2) + a, Rational(-1) - a};
  s.final_exponent = std::min({s.candidates[0], s.candidates[1], s.candidates[2]});
  return s;
}

// --- semiclassical window --------------------------------------------------

SemiclassicalWindow build_window(double h, double alpha, double beta, double gamma, double a,
                                 double b, double V_inf, double theta0) {
  require(h > 0, "h > 0");
  require(alpha >= 0 && alpha < 1, "0 ≤ alpha < 1");
  require(beta > 2 * alpha, "beta > 2·alpha");
  require(gamma >= beta, "gamma ≥ beta");
  require(gamma > 1 + 2 * alpha, "gamma > 1+2·alpha");
  require(b > 0, "b > 0");
  require(b < a, "b < a");
  require(V_inf >= 0, "V_inf ≥ 0");
  if (alpha == 0) require(a < 1 - theta0, "a < 1−Θ₀");

  SemiclassicalWindow w{};
  w.h = h;
  w.alpha = alpha;
  w.beta = beta;
  w.gamma = gamma;
  w.a = a;
  w.b = b;
  w.theta0 = theta0;
  w.V_inf = V_inf;
  w.e = theta0 + a * std::pow(h, alpha);
  w.delta = b * std::pow(h, beta);
  w.d = b * std::pow(h, alpha);
  w.I = {w.e - w.delta, w.e + w.delta};
  w.J = {w.e - w.d, w.e + w.d};
  require(w.I.strictly_inside(w.J), "I strictly inside J");
  w.c_h = (w.delta + std::pow(h, gamma) * V_inf) / w.d;
  return w;
}

MourreConstant unperturbed_mourre_constant(const SemiclassicalWindow& window, const BandSet& bands,
                                           int points_per_segment) {
  const Interval J = window.J;
  if (!(J.hi > bands.theta0()))
    throw SpectralError(ErrorKind::WindowEmpty, "J lies below Theta0: no fiber has mu_1 in J");
  if (!(J.hi < bands.theta1))
    throw SpectralError(ErrorKind::EnergyOutOfRange, "J reaches Theta1");
  MourreConstant out;
  const auto abs_mu_prime = [](const BandPoint& p) { return std::abs(p.mu_prime); };
  const double h = window.h;
  if (J.lo <= bands.theta0() || J.hi >= bands.ground_limit) {
    // The preimage contains xi0 (mu_1' = 0) or is unbounded (mu_1' -> 0).
    out.degenerate = true;
    out.raw_inf = 0.0;
  } else {
    out.left_lo = inverse_branch(bands, J.hi, Branch::Left).value;
    out.left_hi = inverse_branch(bands, J.lo, Branch::Left).value;
    out.right_lo = inverse_branch(bands, J.lo, Branch::Right).value;
    out.right_hi = inverse_branch(bands, J.hi, Branch::Right).value;
    const SegmentExtrema l =
        segment_extrema(bands.ground, out.left_lo, out.left_hi, abs_mu_prime, points_per_segment);
    const SegmentExtrema r = segment_extrema(bands.ground, out.right_lo, out.right_hi,
                                             abs_mu_prime, points_per_segment);
    out.raw_inf = std::min(l.min_value, r.min_value);
  }
  out.c0 = 2.0 * h * out.raw_inf;
  out.normalized = out.c0 / std::pow(h, 1.0 + window.alpha);
  return out;
}

// --- audit ------------------------------------------------------------------

std::array<double, 3> fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw SpectralError(ErrorKind::FitUnstable, "need >= 2 points");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / double(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / double(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0)) throw SpectralError(ErrorKind::FitUnstable, "abscissae coincide");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    ss += r * r;
  }
  return {slope, intercept, std::sqrt(ss / double(n))};
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  if (!(lo > 0 && hi > lo) || n < 2) throw SpectralError(ErrorKind::ConfigInvalid, "bad log grid");
  std::vector<double> out;
  for (int k = 0; k < n; ++k)
    out.push_back(k == 0 ? lo : k == n - 1 ? hi : lo * std::pow(hi / lo, double(k) / (n - 1)));
  return out;
}

ScalingAudit scaling_audit(double alpha, std::span<const double> h_grid, const BandSet& bands,
                           const AuditOptions& opt) {
  if (h_grid.size() < 2) throw SpectralError(ErrorKind::ConfigInvalid, "need >= 2 values of h");
  const auto [hmin, hmax] = std::minmax_element(h_grid.begin(), h_grid.end());
  if (!(*hmin > 0) || std::log10(*hmax / *hmin) < 2.0 - 1e-12)
    throw SpectralError(ErrorKind::ConfigInvalid, "h grid must span at least two decades");

  const double beta = 2 * alpha + opt.beta_offset;
  const double gamma = std::max(beta, 1 + 2 * alpha + opt.gamma_offset);

  ScalingAudit audit;
  audit.alpha = alpha;
  audit.rows.resize(h_grid.size());
  for (std::size_t i = 0; i < h_grid.size(); ++i) {
    const double h = h_grid[i];
    const SemiclassicalWindow w =
        build_window(h, alpha, beta, gamma, opt.a, opt.b, opt.V_inf, bands.theta0());
    const MourreConstant mc = unperturbed_mourre_constant(w, bands);
    MourreHypotheses hyp;
    hyp.c0 = opt.c0_prefactor * mc.c0;
    hyp.c1 = opt.c1_prefactor * std::pow(h, 1 - alpha);
    hyp.c2 = opt.c2_prefactor * std::pow(h, 2 - alpha);
    hyp.I = w.I;
    hyp.J = w.J;
    hyp.M = opt.M;
    const ConstantsLedger L = ledger(hyp);
    audit.rows[i] = {h, hyp.c0, hyp.c1, hyp.c2, L.eps0, L.bound.C_final};
  }
  std::sort(audit.rows.begin(), audit.rows.end(),
            [](const AuditRow& a, const AuditRow& b) { return a.h < b.h; });

  std::vector<double> x, y;
  for (const auto& r : audit.rows) {
    x.push_back(std::log(r.h));
    y.push_back(std::log(r.C_final));
  }
  const auto [slope, intercept, residual] = fit_line(x, y);
  audit.slope = slope;
  audit.intercept = intercept;
  audit.residual = residual;
  audit.target = scaling_exponents(Rational::from_double(alpha)).final_exponent.to_double();
  audit.within_tolerance = std::abs(slope - audit.target) <= opt.slope_tolerance;
  if (residual > opt.fit_threshold)
    throw SpectralError(ErrorKind::FitUnstable,
                        "log-log residual " + fmt(residual) + " exceeds " + fmt(opt.fit_threshold));
  return audit;
}

}  // namespace degennes
