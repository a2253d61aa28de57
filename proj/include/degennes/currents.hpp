#pragma once

#include <optional>
#include <span>
#include <vector>

#include "degennes/band.hpp"

namespace degennes {

/// c(e) = mu_1'(left preimage) + mu_1'(right preimage); the right preimage at
/// +infinity contributes 0.
double algebraic_current(double e, const BandSet& bands);

struct CurrentScanRow {
  friend bool operator==(const CurrentScanRow&, const CurrentScanRow&) = default;

  double e = 0.0;
  double c = 0.0;
};

struct CurrentScan {
  friend bool operator==(const CurrentScan&, const CurrentScan&) = default;

  std::vector<CurrentScanRow> rows;
  std::optional<double> e_star_candidate;  // empty means NONE_FOUND
};

/// Tabulates c over the given energies (sorted on output). The candidate is the
/// first sign change above Theta0, located by linear interpolation between the
/// bracketing rows; no root is invented when c keeps its sign.
CurrentScan current_sign_scan(std::span<const double> e_grid, const BandSet& bands);

/// n equispaced energies lo + k (hi - lo) / n, k = 1..n.
std::vector<double> energy_grid(double lo, double hi, int n);

struct CurrentReport {
  friend bool operator==(const CurrentReport&, const CurrentReport&) = default;

  double e = 0.0;
  double delta = 0.0;
  double c_of_e = 0.0;
  double lambda_min_over_h = 0.0;
  double lambda_max_over_h = 0.0;
  double spectral_radius_over_h = 0.0;
  Branch dominant_side = Branch::Left;

  // Preimage of [e - delta, e + delta]; right_hi is +inf above the band limit.
  double left_lo = 0.0, left_hi = 0.0;
  double right_lo = 0.0, right_hi = 0.0;
};

/// Extrema of mu_1' over {xi : mu_1(xi) in [e - delta, e + delta]}.
/// Every fresh evaluation is appended to trace when given.
CurrentReport current_window(double e, double delta, const BandSet& bands,
                             int points_per_segment = 33, std::vector<BandPoint>* trace = nullptr);

struct AgmonEntry {
  friend bool operator==(const AgmonEntry&, const AgmonEntry&) = default;

  double xi = 0.0;
  double weighted_norm = 0.0;
  double norm = 0.0;  // K = 0 column
};

struct AgmonReport {
  friend bool operator==(const AgmonReport&, const AgmonReport&) = default;

  double e = 0.0;
  double K = 0.0;
  std::vector<AgmonEntry> per_xi;
  double sup_weighted_norm = 0.0;
  double x_eK = 0.0;
  double C_e = 0.0;
};

/// int_0^L e^{Kx} |u_1(x, xi)|^2 dx for n_xi fibers spanning the sublevel set
/// {mu_1 < e} = (left preimage, right preimage).
AgmonReport agmon_report(double e, double K, int n_xi, const BandSet& bands,
                         const DiscretizationConfig& config = {});

}  // namespace degennes
