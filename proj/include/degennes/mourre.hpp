#pragma once

// Explicit constants of an abstract Mourre-type limiting absorption argument
// and their semiclassical scaling for the magnetic half-plane window just
// above Theta0. Pure arithmetic on interval data plus band input for c0.

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "degennes/band.hpp"

namespace degennes {

struct Interval {
  friend bool operator==(const Interval&, const Interval&) = default;

  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool strictly_inside(const Interval& outer) const { return lo > outer.lo && hi < outer.hi; }
};

struct MourreHypotheses {
  friend bool operator==(const MourreHypotheses&, const MourreHypotheses&) = default;

  double c0 = 1.0;  // Mourre constant on J
  double c1 = 1.0;  // first commutator bound
  double c2 = 1.0;  // double commutator bound
  Interval I{2.0, 3.0};
  Interval J{1.0, 4.0};
  double M = 1.0;  // height of B = I x [0, M]

  void validate() const;
};

/// Norms of the weight operator: ||C||, ||CA||, ||AC||.
struct WeightNorms {
  double C = 1.0;
  double CA = 1.0;
  double AC = 1.0;
};

struct UniversalIntegrals {
  friend bool operator==(const UniversalIntegrals&, const UniversalIntegrals&) = default;

  double inv_sqrt = 0.0;      // int_0^1 t^{-1/2} dt
  double log_sqrt = 0.0;      // int_0^1 |ln t|^{1/2} t^{-1/2} dt
  double inv_sqrt_error = 0.0;
  double log_sqrt_error = 0.0;
};

UniversalIntegrals universal_integrals();

struct LapBound {
  friend bool operator==(const LapBound&, const LapBound&) = default;

  double eps_hat = 0.0;  // min(1, eps0)
  double K1 = 0.0;
  double K2 = 0.0;
  double K = 0.0;
  double C_eps0 = 0.0;
  double C_final = 0.0;
};

struct ConstantsLedger {
  friend bool operator==(const ConstantsLedger&, const ConstantsLedger&) = default;

  MourreHypotheses hyp;
  double sup_J_ell_plus_i = 0.0;
  double sup_B_z_plus_i = 0.0;
  double dist_I_Jc = 0.0;
  double eps1 = 0.0;
  double eps0 = 0.0;
  double eps2 = 0.0;
  double c0_tilde = 0.0;
  UniversalIntegrals integrals;
  LapBound bound;  // evaluated with unit weight norms

  /// sup_B|z+i| / dist(I, J^c) + 1, the factor recurring in every epsilon.
  double gamma() const { return sup_B_z_plus_i / dist_I_Jc + 1.0; }

  double C(double eps, std::complex<double> z) const;
  double D1(double eps, std::complex<double> z) const;
  double D2(double eps, std::complex<double> z) const;
  double D3(double eps, std::complex<double> z) const;
};

ConstantsLedger ledger(const MourreHypotheses& hyp);

/// C_final = C(eps0) + (K1+K2)(1 + C(eps0)^{1/2}) * 2 + sqrt(2) K^{1/2} (K1+K2) * sqrt(2 pi)
/// with C(eps0) replaced by its explicit upper bound and eps0 clipped to 1.
/// ||C|| = 0 means the weight operator vanishes, hence so do ||CA|| and ||AC||.
LapBound lap_bound(const ConstantsLedger& ledger, double norm_C, double norm_CA, double norm_AC);

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1);

  /// Best approximation with denominator <= max_den (exact for short decimals).
  static Rational from_double(double x, std::int64_t max_den = 1000000);

  double to_double() const { return double(num) / double(den); }
  std::string str() const;

  friend Rational operator+(Rational a, Rational b);
  friend Rational operator-(Rational a, Rational b);
  friend Rational operator*(Rational a, Rational b);
  friend bool operator==(Rational a, Rational b) { return a.num == b.num && a.den == b.den; }
  friend bool operator<(Rational a, Rational b);
};

struct ScalingExponents {
  friend bool operator==(const ScalingExponents&, const ScalingExponents&) = default;

  Rational alpha;
  std::vector<std::pair<std::string, Rational>> table;  // c0, c1, c2, eps0, eps1, K1, K2, K, C_eps0
  std::array<Rational, 3> candidates;                   // -2+3a, -3/2+a, -1-a
  Rational final_exponent;

  Rational at(const std::string& name) const;
};

ScalingExponents scaling_exponents(Rational alpha);

struct SemiclassicalWindow {
  friend bool operator==(const SemiclassicalWindow&, const SemiclassicalWindow&) = default;

  double h = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double a = 0.0;
  double b = 0.0;
  double theta0 = 0.0;
  double e = 0.0;
  double delta = 0.0;
  double d = 0.0;
  Interval I;
  Interval J;
  double V_inf = 0.0;
  double c_h = 0.0;
};

/// Throws ConstraintViolated naming the first failed inequality.
SemiclassicalWindow build_window(double h, double alpha, double beta, double gamma, double a,
                                 double b, double V_inf, double theta0);

struct MourreConstant {
  friend bool operator==(const MourreConstant&, const MourreConstant&) = default;

  double raw_inf = 0.0;     // inf |mu_1'| over {mu_1 in J}
  double c0 = 0.0;          // 2 h raw_inf: lower bound of the commutator on Ran 1_J
  double normalized = 0.0;  // c0 / h^{1+alpha}
  bool degenerate = false;  // preimage reaches xi0 or +infinity, so the infimum is 0
  double left_lo = 0.0, left_hi = 0.0, right_lo = 0.0, right_hi = 0.0;
};

MourreConstant unperturbed_mourre_constant(const SemiclassicalWindow& window, const BandSet& bands,
                                           int points_per_segment = 33);

struct AuditOptions {
  double a = 0.2;
  double b = 0.1;
  double beta_offset = 0.5;   // beta = 2 alpha + offset
  double gamma_offset = 0.5;  // gamma = max(beta, 1 + 2 alpha + offset)
  double V_inf = 1.0;
  double c0_prefactor = 1.0;
  double c1_prefactor = 1.0;
  double c2_prefactor = 1.0;
  double M = 1.0;
  double fit_threshold = 0.5;  // RMS of log-residuals above this is FitUnstable
  double slope_tolerance = 0.05;
};

struct AuditRow {
  friend bool operator==(const AuditRow&, const AuditRow&) = default;

  double h = 0.0;
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double eps0 = 0.0;
  double C_final = 0.0;
};

struct ScalingAudit {
  friend bool operator==(const ScalingAudit&, const ScalingAudit&) = default;

  double alpha = 0.0;
  std::vector<AuditRow> rows;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS in log space
  double target = 0.0;
  bool within_tolerance = false;
};

/// Builds the window, c0 from the bands and c1 = h^{1-alpha}, c2 = h^{2-alpha}
/// (times prefactors) for every h, composes ledger + lap_bound and fits
/// log C_final against log h.
ScalingAudit scaling_audit(double alpha, std::span<const double> h_grid, const BandSet& bands,
                           const AuditOptions& options = {});

/// Least-squares line through (x, y); returns slope, intercept, RMS residual.
std::array<double, 3> fit_line(std::span<const double> x, std::span<const double> y);

std::vector<double> log_spaced(double lo, double hi, int n);

}  // namespace degennes
