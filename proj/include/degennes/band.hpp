#pragma once

#include <array>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "degennes/fiber.hpp"

namespace degennes {

/// One fresh evaluation of a band function.
struct BandPoint {
  double xi = 0.0;
  double mu = 0.0;
  double mu_prime = 0.0;
  double mu_error = 0.0;
  double mu_prime_error = 0.0;
  bool accepted = true;
};

using BandEvaluator = std::function<BandPoint(double)>;

struct BandSample {
  friend bool operator==(const BandSample&, const BandSample&) = default;

  double xi = 0.0;
  double mu = 0.0;
  double mu_prime = 0.0;
  double est_error = 0.0;
};

/// Sampled dispersion curve xi -> mu_j(xi) with a piecewise cubic Hermite
/// interpolant built from (mu, mu') and an evaluator for fresh values.
/// Immutable after construction.
class BandFunction {
 public:
  BandFunction(int band_index, std::vector<BandSample> samples, DiscretizationConfig config,
               BandEvaluator evaluator);

  /// Band known only through its samples; fresh evaluations use the interpolant.
  static BandFunction from_samples(int band_index, std::vector<BandSample> samples,
                                   DiscretizationConfig config = {});

  int band_index() const { return band_index_; }
  std::span<const BandSample> samples() const { return *samples_; }
  const DiscretizationConfig& config() const { return config_; }
  double xi_min() const { return samples_->front().xi; }
  double xi_max() const { return samples_->back().xi; }

  double interpolate(double xi) const;
  double interpolate_derivative(double xi) const;
  BandPoint evaluate(double xi) const { return evaluator_(xi); }

 private:
  std::size_t segment(double xi) const;

  int band_index_;
  std::shared_ptr<const std::vector<BandSample>> samples_;
  DiscretizationConfig config_;
  BandEvaluator evaluator_;
};

/// Evaluator backed by solve_fiber for band j.
BandEvaluator fiber_evaluator(int band_index, const DiscretizationConfig& config);

BandFunction sample_band(int band_index, double xi_lo, double xi_hi, int n_samples,
                         const DiscretizationConfig& config = {});

struct DerivativeEstimate {
  std::array<double, 4> value{};      // mu, mu', mu'', mu'''
  std::array<double, 4> error_bar{};  // +inf when a contributing solve was rejected
  int max_order = 1;
  bool certified = true;
};

inline constexpr double kDefaultDerivativeStep = 1e-2;

/// mu' straight from Feynman-Hellmann; mu'' and mu''' from central differences
/// of mu' over steps {2s, s, s/2}, Richardson-extrapolated. Error bars are twice
/// the extrapolation tail plus the propagated solver error.
DerivativeEstimate derivatives_at(const BandFunction& band, double xi, int max_order = 3,
                                  double step = kDefaultDerivativeStep);

struct BandMinimum {
  friend bool operator==(const BandMinimum&, const BandMinimum&) = default;

  double xi_star = 0.0;
  double theta = 0.0;
  double second_derivative = 0.0;
  double third_derivative = 0.0;
  std::array<double, 2> error_bars{};  // for the second and third derivative
};

/// Unique zero of mu' bracketed among the samples, refined with fresh
/// evaluations until |mu'| < 1e-10.
BandMinimum find_minimum(const BandFunction& band, double derivative_step = kDefaultDerivativeStep);

enum class Branch { Left, Right };

std::string to_string(Branch branch);

inline constexpr double kPlusInfinity = std::numeric_limits<double>::infinity();

struct InverseBranchResult {
  double value = 0.0;  // kPlusInfinity on the right branch above the large-xi limit
  Branch branch = Branch::Left;
  double residual = 0.0;
  double mu_prime = 0.0;  // mu_1' at value; 0 at +infinity by convention

  bool is_infinite() const { return value == kPlusInfinity; }
};

/// The lowest band together with the spectral landmarks the energy-window
/// operations need: its minimum (xi_0, Theta_0) and Theta_1 from the second band.
struct BandSet {
  BandFunction ground;
  BandMinimum ground_minimum;
  double theta1 = 0.0;
  double ground_limit = 1.0;  // lim mu_1 as xi -> +inf

  double theta0() const { return ground_minimum.theta; }
  double xi0() const { return ground_minimum.xi_star; }
};

BandSet make_band_set(BandFunction ground, const BandFunction& second);

/// Samples j = 1, 2 on [xi_lo, xi_hi] and locates both minima.
BandSet compute_band_set(const DiscretizationConfig& config = {}, double xi_lo = -1.0,
                         double xi_hi = 6.0, int n_samples = 141);

InverseBranchResult inverse_branch(const BandSet& bands, double e, Branch branch);

enum class Verdict { Supported, Inconclusive, Refuted };

std::string to_string(Verdict verdict);

struct ConjectureVerdict {
  friend bool operator==(const ConjectureVerdict&, const ConjectureVerdict&) = default;

  double third_derivative = 0.0;
  double error_bar = 0.0;  // +inf when a contributing solve was rejected
  Verdict verdict = Verdict::Inconclusive;
  double xi0 = 0.0;
  double second_derivative = 0.0;
  std::array<int, 2> grid_points{};          // the two resolutions
  std::array<double, 2> resolution_values{};  // third derivative on each
  std::array<double, 2> resolution_bars{};
};

/// mu_1''' at xi0 on grid_points N and 3N/2 of the given config (solves are
/// flagged rather than thrown). Combined bar: max of both bars and their
/// disagreement. SUPPORTED iff value + bar < 0, REFUTED iff value - bar > 0.
ConjectureVerdict conjecture_verdict(DiscretizationConfig config,
                                     double step = kDefaultDerivativeStep);

/// Extrema of field(mu_j at xi) over [a, b]: dense fresh evaluation on n points,
/// then golden-section refinement around interior extrema. Endpoint extrema
/// are taken as is.
struct SegmentExtrema {
  double min_value = 0.0, min_xi = 0.0;
  double max_value = 0.0, max_xi = 0.0;
  std::vector<BandPoint> evaluated;  // sorted by xi
};

SegmentExtrema segment_extrema(const BandFunction& band, double a, double b,
                               const std::function<double(const BandPoint&)>& field,
                               int n_points = 33);

struct PropertyCheck {
  friend bool operator==(const PropertyCheck&, const PropertyCheck&) = default;

  std::string name;
  int band_index = 0;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct PropertyReport {
  friend bool operator==(const PropertyReport&, const PropertyReport&) = default;

  std::vector<PropertyCheck> checks;

  bool all_passed() const;
  std::vector<std::string> failed_names() const;
};

/// Verifies, for every band given: unique non-degenerate interior minimum,
/// monotonicity on both sides, Theta = xi_star^2, mu_j(6) close to 2j-1, and
/// the Theta bounds. Failures are entries, never exceptions.
PropertyReport check_rappel(std::span<const BandFunction> bands);

}  // namespace degennes
