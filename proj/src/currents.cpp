#include "degennes/currents.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "degennes/parallel.hpp"

namespace degennes {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

double algebraic_current(double e, const BandSet& bands) {
  const InverseBranchResult l = inverse_branch(bands, e, Branch::Left);
  const InverseBranchResult r = inverse_branch(bands, e, Branch::Right);
  return l.mu_prime + r.mu_prime;
}

std::vector<double> energy_grid(double lo, double hi, int n) {
  if (n < 1 || !(hi > lo)) throw SpectralError(ErrorKind::ConfigInvalid, "bad energy grid");
  std::vector<double> out;
  for (int k = 1; k <= n; ++k) out.push_back(k == n ? hi : lo + (hi - lo) * k / n);
  return out;
}

CurrentScan current_sign_scan(std::span<const double> e_grid, const BandSet& bands) {
  CurrentScan scan;
  scan.rows.resize(e_grid.size());
  parallel_for(e_grid.size(), [&](std::size_t i) {
    scan.rows[i] = {e_grid[i], algebraic_current(e_grid[i], bands)};
  });
  std::sort(scan.rows.begin(), scan.rows.end(),
            [](const CurrentScanRow& a, const CurrentScanRow& b) { return a.e < b.e; });
  for (std::size_t i = 0; i + 1 < scan.rows.size(); ++i) {
    const auto& a = scan.rows[i];
    const auto& b = scan.rows[i + 1];
    if (a.e <= bands.theta0()) continue;
    if ((a.c < 0) != (b.c < 0)) {
      scan.e_star_candidate = b.c == a.c ? a.e : a.e - a.c * (b.e - a.e) / (b.c - a.c);
      break;
    }
  }
  return scan;
}

CurrentReport current_window(double e, double delta, const BandSet& bands,
                             int points_per_segment, std::vector<BandPoint>* trace) {
  if (!(delta > 0))
    throw SpectralError(ErrorKind::WindowEmpty, "window half-width must be positive");
  const double lo = e - delta, hi = e + delta;
  if (!(lo > bands.theta0()) || !(hi < bands.theta1))
    throw SpectralError(ErrorKind::EnergyOutOfRange,
                        "[" + fmt(lo) + ", " + fmt(hi) + "] not inside (Theta0, Theta1)");

  CurrentReport rep;
  rep.e = e;
  rep.delta = delta;
  rep.c_of_e = algebraic_current(e, bands);

  rep.left_lo = inverse_branch(bands, hi, Branch::Left).value;
  rep.left_hi = inverse_branch(bands, lo, Branch::Left).value;
  const auto mu_prime = [](const BandPoint& p) { return p.mu_prime; };
  const SegmentExtrema left =
      segment_extrema(bands.ground, rep.left_lo, rep.left_hi, mu_prime, points_per_segment);

  rep.lambda_min_over_h = left.min_value;
  rep.lambda_max_over_h = left.max_value;
  if (trace) trace->insert(trace->end(), left.evaluated.begin(), left.evaluated.end());

  if (lo < bands.ground_limit) {
    rep.right_lo = inverse_branch(bands, lo, Branch::Right).value;
    const InverseBranchResult r_hi = inverse_branch(bands, hi, Branch::Right);
    rep.right_hi = r_hi.value;
    // Above the band limit the preimage is unbounded and mu_1' -> 0 at infinity.
    const double b = r_hi.is_infinite() ? std::max(bands.ground.xi_max(), rep.right_lo + 4.0)
                                        : r_hi.value;
    const SegmentExtrema right =
        segment_extrema(bands.ground, rep.right_lo, b, mu_prime, points_per_segment);
    rep.lambda_min_over_h = std::min(rep.lambda_min_over_h, right.min_value);
    rep.lambda_max_over_h = std::max(rep.lambda_max_over_h, right.max_value);
    if (r_hi.is_infinite()) {
      rep.lambda_min_over_h = std::min(rep.lambda_min_over_h, 0.0);
      rep.lambda_max_over_h = std::max(rep.lambda_max_over_h, 0.0);
    }
    if (trace) trace->insert(trace->end(), right.evaluated.begin(), right.evaluated.end());
  } else {
    rep.right_lo = rep.right_hi = kPlusInfinity;
    rep.lambda_max_over_h = std::max(rep.lambda_max_over_h, 0.0);
  }
  rep.spectral_radius_over_h =
      std::max(std::abs(rep.lambda_min_over_h), std::abs(rep.lambda_max_over_h));
  rep.dominant_side = std::abs(rep.lambda_min_over_h) >= std::abs(rep.lambda_max_over_h)
                          ? Branch::Left
                          : Branch::Right;
  return rep;
}

AgmonReport agmon_report(double e, double K, int n_xi, const BandSet& bands,
                         const DiscretizationConfig& config) {
  if (!(e > bands.theta0()) || !(e < 1.0))
    throw SpectralError(ErrorKind::EnergyOutOfRange, "e=" + fmt(e) + " outside (Theta0, 1)");
  if (!(K > 0)) throw SpectralError(ErrorKind::ConfigInvalid, "K must be positive");
  if (n_xi < 1) throw SpectralError(ErrorKind::ConfigInvalid, "n_xi must be >= 1");

  AgmonReport rep;
  rep.e = e;
  rep.K = K;
  const double a = inverse_branch(bands, e, Branch::Left).value;
  const double b = inverse_branch(bands, e, Branch::Right).value;
  rep.C_e = std::max(std::abs(a), std::abs(b));
  rep.x_eK = std::sqrt(2.0 * (rep.C_e + K * K + 1.0));

  rep.per_xi.resize(std::size_t(n_xi));
  parallel_for(rep.per_xi.size(), [&](std::size_t i) {
    const double xi = n_xi == 1 ? 0.5 * (a + b) : a + (b - a) * double(i) / (n_xi - 1);
    const FiberSolution s = solve_fiber(xi, 1, config);
    const Eigenpair& pair = s.pairs.front();
    const double L = pair.eigenfunction().length();
    if (!std::isfinite(std::exp(K * L)))
      throw SpectralError(ErrorKind::TruncationDominated, "weight e^{KL} overflows at xi=" + fmt(xi));
    const double total = weighted_norm(pair, K).value;
    const double tail =
        level_moment(pair, [&](double x) { return x > 0.9 * L ? std::exp(K * x) : 0.0; }).value;
    if (!(tail < kTruncationThreshold * total))
      throw SpectralError(ErrorKind::TruncationDominated,
                          "weighted mass near x=L is " + fmt(tail) + " at xi=" + fmt(xi));
    rep.per_xi[i] = {xi, total, weighted_norm(pair, 0.0).value};
  });
  for (const auto& entry : rep.per_xi)
    rep.sup_weighted_norm = std::max(rep.sup_weighted_norm, entry.weighted_norm);
  return rep;
}

}  // namespace degennes
