#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace degennes {

struct Extrapolation {
  double value = 0.0;
  double tail = 0.0;  // |best - second best| of the table diagonal
};

/// Richardson table for samples taken at steps s, s/ratio, s/ratio^2, ...
/// (coarsest first) with an error expansion in powers p0, p0+dp, p0+2dp, ...
template <typename Scalar>
Extrapolation richardson(std::span<const Scalar> samples, double ratio = 2.0, double p0 = 2.0,
                         double dp = 2.0) {
  if (samples.empty()) throw std::invalid_argument("richardson: no samples");
  std::vector<Scalar> row(samples.begin(), samples.end());
  if (row.size() == 1) return {static_cast<double>(row[0]), 0.0};

  Scalar previous_best = row[row.size() - 2];
  for (std::size_t m = 1; m < samples.size(); ++m) {
    const Scalar factor = static_cast<Scalar>(std::pow(ratio, p0 + dp * double(m - 1)));
    previous_best = row.back();
    std::vector<Scalar> next(row.size() - 1);
    for (std::size_t k = 0; k + 1 < row.size(); ++k) {
      next[k] = row[k + 1] + (row[k + 1] - row[k]) / (factor - Scalar(1));
    }
    row = std::move(next);
  }
  using std::abs;
  return {static_cast<double>(row.back()), static_cast<double>(abs(row.back() - previous_best))};
}

template <typename Scalar>
Extrapolation richardson(const std::vector<Scalar>& samples, double ratio = 2.0, double p0 = 2.0,
                         double dp = 2.0) {
  return richardson(std::span<const Scalar>(samples), ratio, p0, dp);
}

/// Sum of |weights| the table applies to its inputs; amplification of
/// independent per-sample noise.
inline double richardson_noise_gain(std::size_t n_samples, double ratio = 2.0, double p0 = 2.0,
                                    double dp = 2.0) {
  std::vector<std::vector<double>> rows(n_samples, std::vector<double>(n_samples, 0.0));
  for (std::size_t k = 0; k < n_samples; ++k) rows[k][k] = 1.0;
  for (std::size_t m = 1; m < n_samples; ++m) {
    const double factor = std::pow(ratio, p0 + dp * double(m - 1));
    std::vector<std::vector<double>> next(rows.size() - 1, std::vector<double>(n_samples));
    for (std::size_t k = 0; k + 1 < rows.size(); ++k)
      for (std::size_t c = 0; c < n_samples; ++c)
        next[k][c] = rows[k + 1][c] + (rows[k + 1][c] - rows[k][c]) / (factor - 1.0);
    rows = std::move(next);
  }
  double gain = 0.0;
  for (double w : rows.back()) gain += std::abs(w);
  return gain;
}

}  // namespace degennes
