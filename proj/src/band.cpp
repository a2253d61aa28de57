#include "degennes/band.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "degennes/parallel.hpp"
#include "degennes/richardson.hpp"

namespace degennes {

namespace {

constexpr double kMinimumTol = 1e-10;
constexpr int kMaxRootIterations = 100;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

// Cubic Hermite basis on one segment, t in [0, 1].
double hermite(const BandSample& a, const BandSample& b, double xi) {
  const double w = b.xi - a.xi;
  const double t = (xi - a.xi) / w;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * a.mu + (t3 - 2 * t2 + t) * w * a.mu_prime +
         (-2 * t3 + 3 * t2) * b.mu + (t3 - t2) * w * b.mu_prime;
}

double hermite_derivative(const BandSample& a, const BandSample& b, double xi) {
  const double w = b.xi - a.xi;
  const double t = (xi - a.xi) / w;
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * a.mu + (-6 * t2 + 6 * t) * b.mu) / w +
         (3 * t2 - 4 * t + 1) * a.mu_prime + (3 * t2 - 2 * t) * b.mu_prime;
}

std::size_t segment_of(const std::vector<BandSample>& s, double xi) {
  auto it = std::upper_bound(s.begin(), s.end(), xi,
                             [](double x, const BandSample& b) { return x < b.xi; });
  std::size_t i = it == s.begin() ? 0 : std::size_t(it - s.begin()) - 1;
  return std::min(i, s.size() - 2);
}

struct Bracket {
  double a, ga, b, gb;
};

// Illinois regula falsi with a bisection safeguard on g(xi) = field(evaluate(xi)).
// Returns the last evaluation.
template <typename G>
BandPoint solve_bracketed(const BandFunction& band, Bracket br, G&& g, double tol) {
  BandPoint best = band.evaluate(std::abs(br.ga) < std::abs(br.gb) ? br.a : br.b);
  if (std::abs(g(best)) < tol) return best;
  int side = 0;
  for (int it = 0; it < kMaxRootIterations; ++it) {
    double x = br.b - br.gb * (br.b - br.a) / (br.gb - br.ga);
    const double width = std::abs(br.b - br.a);
    if (!(x > std::min(br.a, br.b) && x < std::max(br.a, br.b))) x = 0.5 * (br.a + br.b);
    const BandPoint p = band.evaluate(x);
    const double gx = g(p);
    if (std::abs(gx) < std::abs(g(best))) best = p;
    if (std::abs(gx) < tol || width < 1e-15 * std::max(1.0, std::abs(x))) return p;
    if ((gx < 0) == (br.ga < 0)) {
      br.a = x;
      br.ga = gx;
      if (side == -1) br.gb *= 0.5;
      side = -1;
    } else {
      br.b = x;
      br.gb = gx;
      if (side == 1) br.ga *= 0.5;
      side = 1;
    }
  }
  return best;
}

}  // namespace

BandFunction::BandFunction(int band_index, std::vector<BandSample> samples,
                           DiscretizationConfig config, BandEvaluator evaluator)
    : band_index_(band_index), config_(config), evaluator_(std::move(evaluator)) {
  if (band_index < 1) throw SpectralError(ErrorKind::ConfigInvalid, "band index must be >= 1");
  if (samples.size() < 2)
    throw SpectralError(ErrorKind::ConfigInvalid, "a band needs at least two samples");
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (!(samples[i].xi > samples[i - 1].xi))
      throw SpectralError(ErrorKind::ConfigInvalid, "sample xi values must increase strictly");
  samples_ = std::make_shared<const std::vector<BandSample>>(std::move(samples));
}

BandFunction BandFunction::from_samples(int band_index, std::vector<BandSample> samples,
                                        DiscretizationConfig config) {
  BandFunction band(band_index, std::move(samples), config, {});
  band.evaluator_ = [s = band.samples_](double xi) {
    const std::size_t i = segment_of(*s, xi);
    return BandPoint{xi, hermite((*s)[i], (*s)[i + 1], xi),
                     hermite_derivative((*s)[i], (*s)[i + 1], xi), 0.0, 0.0, true};
  };
  return band;
}

std::size_t BandFunction::segment(double xi) const { return segment_of(*samples_, xi); }

double BandFunction::interpolate(double xi) const {
  const std::size_t i = segment(xi);
  return hermite((*samples_)[i], (*samples_)[i + 1], xi);
}

double BandFunction::interpolate_derivative(double xi) const {
  const std::size_t i = segment(xi);
  return hermite_derivative((*samples_)[i], (*samples_)[i + 1], xi);
}

BandEvaluator fiber_evaluator(int band_index, const DiscretizationConfig& config) {
  return [band_index, config](double xi) {
    const FiberSolution s = solve_fiber(xi, band_index, config);
    const Eigenpair& p = s.pairs[std::size_t(band_index - 1)];
    return BandPoint{xi,
                     p.mu,
                     p.mu_prime,
                     s.diagnostics.estimated_eigenvalue_error,
                     s.diagnostics.estimated_derivative_error,
                     s.diagnostics.accepted};
  };
}

BandFunction sample_band(int band_index, double xi_lo, double xi_hi, int n_samples,
                         const DiscretizationConfig& config) {
  if (band_index < 1) throw SpectralError(ErrorKind::ConfigInvalid, "band index must be >= 1");
  if (!(xi_lo < xi_hi)) throw SpectralError(ErrorKind::ConfigInvalid, "need xi_lo < xi_hi");
  if (n_samples < 8) throw SpectralError(ErrorKind::ConfigInvalid, "need at least 8 samples");
  config.validate();

  const BandEvaluator eval = fiber_evaluator(band_index, config);
  std::vector<BandSample> samples(static_cast<std::size_t>(n_samples));
  parallel_for(samples.size(), [&](std::size_t i) {
    const double xi =
        i + 1 == samples.size() ? xi_hi : xi_lo + (xi_hi - xi_lo) * double(i) / (n_samples - 1);
    const BandPoint p = eval(xi);
    samples[i] = {xi, p.mu, p.mu_prime, p.accepted ? p.mu_error : kPlusInfinity};
  });
  return BandFunction(band_index, std::move(samples), config, eval);
}

DerivativeEstimate derivatives_at(const BandFunction& band, double xi, int max_order,
                                  double step) {
  if (max_order < 1 || max_order > 3)
    throw SpectralError(ErrorKind::ConfigInvalid, "derivative order must be 1, 2 or 3");
  const double tol = band.config().target_tol;
  if (!(step > 0) || step / 2 < 100 * tol)
    throw SpectralError(ErrorKind::StepUnderflow,
                        "step " + fmt(step) + " is below 100x the eigenvalue tolerance");

  DerivativeEstimate out;
  out.max_order = max_order;
  const BandPoint c = band.evaluate(xi);
  out.value[0] = c.mu;
  out.value[1] = c.mu_prime;
  out.error_bar[0] = c.mu_error;
  out.error_bar[1] = c.mu_prime_error;
  out.certified = c.accepted;
  double noise = c.mu_prime_error;
  if (max_order == 1) {
    if (!out.certified) out.error_bar[0] = out.error_bar[1] = kPlusInfinity;
    return out;
  }

  const double steps[3] = {2 * step, step, step / 2};
  std::vector<double> d2, d3;
  for (double s : steps) {
    const BandPoint p = band.evaluate(xi + s);
    const BandPoint m = band.evaluate(xi - s);
    out.certified = out.certified && p.accepted && m.accepted;
    noise = std::max({noise, p.mu_prime_error, m.mu_prime_error});
    d2.push_back((p.mu_prime - m.mu_prime) / (2 * s));
    d3.push_back((p.mu_prime - 2 * c.mu_prime + m.mu_prime) / (s * s));
  }
  const double gain = richardson_noise_gain(3);
  const double h_min = steps[2];
  const Extrapolation e2 = richardson(d2);
  out.value[2] = e2.value;
  out.error_bar[2] = 2 * e2.tail + gain * noise / h_min;
  if (max_order == 3) {
    const Extrapolation e3 = richardson(d3);
    out.value[3] = e3.value;
    out.error_bar[3] = 2 * e3.tail + gain * 4 * noise / (h_min * h_min);
  }
  if (!out.certified)
    for (auto& bar : out.error_bar) bar = kPlusInfinity;
  return out;
}

BandMinimum find_minimum(const BandFunction& band, double derivative_step) {
  const auto s = band.samples();
  std::size_t k = s.size();
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (s[i].mu_prime < 0 && s[i + 1].mu_prime >= 0) {
      k = i;
      break;
    }
  }
  if (k == s.size())
    throw SpectralError(ErrorKind::NoBracket, "mu' of band " + std::to_string(band.band_index()) +
                                                  " does not change sign on [" + fmt(band.xi_min()) +
                                                  ", " + fmt(band.xi_max()) + "]");

  BandPoint root;
  if (s[k + 1].mu_prime == 0.0) {
    root = band.evaluate(s[k + 1].xi);
  } else {
    root = solve_bracketed(band, {s[k].xi, s[k].mu_prime, s[k + 1].xi, s[k + 1].mu_prime},
                           [](const BandPoint& p) { return p.mu_prime; }, kMinimumTol);
  }

  BandMinimum m;
  m.xi_star = root.xi;
  m.theta = root.mu;
  const DerivativeEstimate d = derivatives_at(band, root.xi, 3, derivative_step);
  m.second_derivative = d.value[2];
  m.third_derivative = d.value[3];
  m.error_bars = {d.error_bar[2], d.error_bar[3]};
  return m;
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Supported: return "SUPPORTED";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
    case Verdict::Refuted: return "REFUTED";
  }
  return "INCONCLUSIVE";
}

ConjectureVerdict conjecture_verdict(DiscretizationConfig config, double step) {
  config.validate();
  config.strict = false;
  ConjectureVerdict out;
  out.grid_points = {config.grid_points, config.grid_points * 3 / 2};
  for (int r = 0; r < 2; ++r) {
    DiscretizationConfig c = config;
    c.grid_points = out.grid_points[std::size_t(r)];
    const BandMinimum m = find_minimum(sample_band(1, 0.0, 1.5, 16, c), step);
    out.resolution_values[std::size_t(r)] = m.third_derivative;
    out.resolution_bars[std::size_t(r)] = m.error_bars[1];
    if (r == 1) {
      out.xi0 = m.xi_star;
      out.second_derivative = m.second_derivative;
    }
  }
  out.third_derivative = out.resolution_values[1];
  out.error_bar = std::max({out.resolution_bars[0], out.resolution_bars[1],
                            std::abs(out.resolution_values[0] - out.resolution_values[1])});
  if (!std::isfinite(out.third_derivative)) out.error_bar = kPlusInfinity;
  if (out.third_derivative + out.error_bar < 0)
    out.verdict = Verdict::Supported;
  else if (out.third_derivative - out.error_bar > 0)
    out.verdict = Verdict::Refuted;
  else
    out.verdict = Verdict::Inconclusive;
  return out;
}

std::string to_string(Branch branch) { return branch == Branch::Left ? "LEFT" : "RIGHT"; }

BandSet make_band_set(BandFunction ground, const BandFunction& second) {
  if (ground.band_index() != 1 || second.band_index() != 2)
    throw SpectralError(ErrorKind::ConfigInvalid, "band set needs bands 1 and 2");
  BandMinimum m0 = find_minimum(ground);
  const double theta1 = find_minimum(second).theta;
  return BandSet{std::move(ground), m0, theta1, 1.0};
}

BandSet compute_band_set(const DiscretizationConfig& config, double xi_lo, double xi_hi,
                         int n_samples) {
  return make_band_set(sample_band(1, xi_lo, xi_hi, n_samples, config),
                       sample_band(2, xi_lo, xi_hi, n_samples, config));
}

InverseBranchResult inverse_branch(const BandSet& bands, double e, Branch branch) {
  const double theta0 = bands.theta0();
  const double xi0 = bands.xi0();
  if (!(e >= theta0) || !(e < bands.theta1))
    throw SpectralError(ErrorKind::EnergyOutOfRange,
                        "e=" + fmt(e) + " outside [Theta0, Theta1) = [" + fmt(theta0) + ", " +
                            fmt(bands.theta1) + ")");
  InverseBranchResult out;
  out.branch = branch;
  if (e == theta0) {
    out.value = xi0;
    out.mu_prime = 0.0;
    return out;
  }
  if (branch == Branch::Right && e >= bands.ground_limit) {
    out.value = kPlusInfinity;
    out.mu_prime = 0.0;
    return out;
  }

  const BandFunction& band = bands.ground;
  const auto s = band.samples();
  // Outer end of the bracket: first node, walking away from xi0, with mu >= e.
  // Inner end: the previous node (or xi0 itself, where mu = Theta0 < e).
  double inner = xi0, g_inner = theta0 - e;
  double outer = 0.0, g_outer = -1.0;
  if (branch == Branch::Left) {
    for (std::size_t i = s.size(); i-- > 0;) {
      if (s[i].xi >= xi0) continue;
      if (s[i].mu - e >= 0) {
        outer = s[i].xi;
        g_outer = s[i].mu - e;
        break;
      }
      inner = s[i].xi;
      g_inner = s[i].mu - e;
    }
    for (double stride = 1.0; g_outer < 0; stride *= 2) {
      if (stride > 1e6) throw SpectralError(ErrorKind::NotConverged, "left branch unbracketed");
      outer = std::min(inner, band.xi_min()) - stride;
      g_outer = band.evaluate(outer).mu - e;
    }
  } else {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i].xi <= xi0) continue;
      if (s[i].mu - e >= 0) {
        outer = s[i].xi;
        g_outer = s[i].mu - e;
        break;
      }
      inner = s[i].xi;
      g_inner = s[i].mu - e;
    }
    for (double x = std::max(inner, band.xi_max()) + 1.0; g_outer < 0; x += 1.0) {
      if (x > band.xi_max() + 30)
        throw SpectralError(ErrorKind::NotConverged,
                            "right branch root for e=" + fmt(e) + " beyond resolvable range");
      const double gx = band.evaluate(x).mu - e;
      if (gx >= 0) {
        outer = x;
        g_outer = gx;
      } else {
        inner = x;
        g_inner = gx;
      }
    }
  }

  // Safeguarded Newton on mu(xi) - e with fresh evaluations.
  double lo = std::min(inner, outer), hi = std::max(inner, outer);
  double g_lo = lo == inner ? g_inner : g_outer;
  double x = lo - g_lo * (hi - lo) / ((lo == inner ? g_outer : g_inner) - g_lo);
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
  BandPoint p = band.evaluate(x);
  const double tol = 1e-13 * std::max(1.0, std::abs(e));
  for (int it = 0; it < kMaxRootIterations; ++it) {
    const double g = p.mu - e;
    if (std::abs(g) <= tol || hi - lo < 1e-15 * std::max(1.0, std::abs(x))) break;
    if ((g < 0) == (g_lo < 0)) {
      lo = x;
      g_lo = g;
    } else {
      hi = x;
    }
    double next = p.mu_prime != 0.0 ? x - g / p.mu_prime : lo;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
    p = band.evaluate(x);
  }
  out.value = p.xi;
  out.residual = std::abs(p.mu - e);
  out.mu_prime = p.mu_prime;
  return out;
}

SegmentExtrema segment_extrema(const BandFunction& band, double a, double b,
                               const std::function<double(const BandPoint&)>& field,
                               int n_points) {
  if (!(a <= b) || n_points < 2)
    throw SpectralError(ErrorKind::ConfigInvalid, "bad segment [" + fmt(a) + ", " + fmt(b) + "]");
  SegmentExtrema out;
  out.evaluated.resize(std::size_t(n_points));
  parallel_for(out.evaluated.size(), [&](std::size_t i) {
    const double x = i + 1 == out.evaluated.size() ? b : a + (b - a) * double(i) / (n_points - 1);
    out.evaluated[i] = band.evaluate(x);
  });
  std::vector<double> f;
  for (const auto& p : out.evaluated) f.push_back(field(p));
  const std::size_t imin = std::size_t(std::min_element(f.begin(), f.end()) - f.begin());
  const std::size_t imax = std::size_t(std::max_element(f.begin(), f.end()) - f.begin());
  out.min_value = f[imin];
  out.min_xi = out.evaluated[imin].xi;
  out.max_value = f[imax];
  out.max_xi = out.evaluated[imax].xi;

  // Golden section on sign * field; the bracket [x_{k-1}, x_{k+1}] holds the extremum.
  std::vector<BandPoint> extra;
  auto refine = [&](std::size_t k, double sign, double& value, double& where) {
    if (k == 0 || k + 1 == f.size()) return;
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = out.evaluated[k - 1].xi, hi = out.evaluated[k + 1].xi;
    double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
    BandPoint p1 = band.evaluate(x1), p2 = band.evaluate(x2);
    extra.push_back(p1);
    extra.push_back(p2);
    double f1 = sign * field(p1), f2 = sign * field(p2);
    while (hi - lo > 1e-5 * std::max(1.0, std::abs(lo))) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - r * (hi - lo);
        p1 = band.evaluate(x1);
        extra.push_back(p1);
        f1 = sign * field(p1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + r * (hi - lo);
        p2 = band.evaluate(x2);
        extra.push_back(p2);
        f2 = sign * field(p2);
      }
    }
    const double best = std::min(f1, f2);
    if (best < sign * value) {
      value = sign * best;
      where = f1 < f2 ? x1 : x2;
    }
  };
  refine(imin, 1.0, out.min_value, out.min_xi);
  refine(imax, -1.0, out.max_value, out.max_xi);
  out.evaluated.insert(out.evaluated.end(), extra.begin(), extra.end());
  std::sort(out.evaluated.begin(), out.evaluated.end(),
            [](const BandPoint& l, const BandPoint& r) { return l.xi < r.xi; });
  return out;
}

bool PropertyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.passed; });
}

std::vector<std::string> PropertyReport::failed_names() const {
  std::vector<std::string> names;
  for (const auto& c : checks)
    if (!c.passed) names.push_back(c.name + "[j=" + std::to_string(c.band_index) + "]");
  return names;
}

PropertyReport check_rappel(std::span<const BandFunction> bands) {
  PropertyReport report;
  for (const BandFunction& band : bands) {
    const int j = band.band_index();
    const auto s = band.samples();
    auto add = [&](std::string name, bool ok, double measured, double threshold,
                   std::string detail = {}) {
      report.checks.push_back({std::move(name), j, ok, measured, threshold, std::move(detail)});
    };

    int up = 0, down = 0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      if (s[i].mu_prime < 0 && s[i + 1].mu_prime >= 0) ++up;
      if (s[i].mu_prime >= 0 && s[i + 1].mu_prime < 0) ++down;
    }

    BandMinimum m;
    bool have_min = false;
    std::string why;
    try {
      m = find_minimum(band);
      have_min = true;
    } catch (const SpectralError& err) {
      why = std::string(to_string(err.kind()));
    }

    auto add_limit = [&] {
      if (band.xi_max() >= 6.0) {
        const double dev = std::abs(band.evaluate(6.0).mu - (2.0 * j - 1));
        add("large_xi_limit", dev < 1e-3, dev, 1e-3, "|mu_j(6) - (2j-1)|");
      } else {
        add("large_xi_limit", false, kPlusInfinity, 1e-3, "sampled range ends before xi = 6");
      }
    };

    if (have_min) {
      const bool interior = m.xi_star > band.xi_min() && m.xi_star < band.xi_max();
      add("unique_minimum", up == 1 && down == 0 && interior && m.second_derivative > 0,
          m.second_derivative, 0.0,
          "sign changes up=" + std::to_string(up) + " down=" + std::to_string(down));

      int violations = 0;
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i].xi < m.xi_star - 1e-3) {
          if (!(s[i].mu_prime < 0)) ++violations;
          if (i + 1 < s.size() && s[i + 1].xi < m.xi_star && !(s[i + 1].mu < s[i].mu)) ++violations;
        } else if (s[i].xi > m.xi_star + 1e-3) {
          if (!(s[i].mu_prime > 0)) ++violations;
          if (i > 0 && s[i - 1].xi > m.xi_star && !(s[i].mu > s[i - 1].mu)) ++violations;
        }
      }
      add("monotone_sides", violations == 0, violations, 0.0);

      const double gap = std::abs(m.theta - m.xi_star * m.xi_star);
      add("theta_equals_xi_squared", gap < 1e-6, gap, 1e-6);
      add_limit();

      const double lo = j == 1 ? 0.0 : 2.0 * j - 3, hi = 2.0 * j - 1;
      add("theta_bounds", m.theta > lo && m.theta < hi, m.theta, hi,
          "open interval (" + fmt(lo) + ", " + fmt(hi) + ")");
    } else {
      for (const char* name : {"unique_minimum", "monotone_sides", "theta_equals_xi_squared"})
        add(name, false, kPlusInfinity, 0.0, why);
      add_limit();
      add("theta_bounds", false, kPlusInfinity, 0.0, why);
    }

  }
  return report;
}

}  // namespace degennes
