// degennes: command-line front end.
//
//   degennes band        sample mu_1..mu_n, locate minima, run the property checks
//   degennes conjecture  sign of mu_1''' at xi0 at two resolutions
//   degennes current     c(e) scan or window extrema of mu_1'
//   degennes agmon       weighted norms int e^{Kx} |u_1|^2 below energy e
//   degennes mourre      constants ledger, LAP bound, scaling exponents
//   degennes audit       log-log fit of the composed bound against h
//
// Exit codes: 0 ok, 2 checks failed, 3 numerical non-convergence, 4 invalid input.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "degennes/band.hpp"
#include "degennes/currents.hpp"
#include "degennes/mourre.hpp"
#include "degennes/report.hpp"

using namespace degennes;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitChecksFailed = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitInvalid = 4;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NoBracket: return kExitChecksFailed;
    case ErrorKind::NotConverged:
    case ErrorKind::TruncationDominated:
    case ErrorKind::FitUnstable: return kExitNumerical;
    default: return kExitInvalid;
  }
}

struct Common {
  std::string format = "json";
  std::string output;
  std::uint64_t seed = 20240601;
  bool plot = false;
  DiscretizationConfig disc;
};

struct BandArgs {
  int bands = 3;
  double xi_min = -1.0;
  double xi_max = 6.0;
  int samples = 141;
  int fidelity_points = 20;
};

struct ConjectureArgs {
  double step = kDefaultDerivativeStep;
};

struct CurrentArgs {
  std::optional<double> e;
  double delta = 1e-3;
  bool scan = false;
  int scan_points = 50;
  std::optional<double> scan_lo, scan_hi;
};

struct AgmonArgs {
  double e = 0.9;
  double K = 1.0;
  int n_xi = 25;
};

struct MourreArgs {
  double alpha = 0.2;
  double h = 1e-2;
  double a = 0.2;
  double b = 0.1;
  std::optional<double> beta, gamma;
  double V_inf = 1.0;
  std::optional<double> c0;
  double c1 = 1.0, c2 = 1.0;
  double I_lo = 2.0, I_hi = 3.0, J_lo = 1.0, J_hi = 4.0, M = 1.0;
  double norm_C = 1.0, norm_CA = 1.0, norm_AC = 1.0;
};

struct AuditArgs {
  double alpha = 0.2;
  double h_min = 1e-4;
  double h_max = 1e-1;
  int h_points = 13;
  AuditOptions options;
};

// Effective configuration, in declaration order: global options, then the
// selected subcommand's options prefixed with its name.
ConfigEcho collect_echo(const CLI::App& app, const CLI::App& sub) {
  ConfigEcho echo;
  auto add = [&](const CLI::App& a, const std::string& prefix) {
    for (const CLI::Option* opt : a.get_options()) {
      if (opt->get_lnames().empty()) continue;
      const std::string name = opt->get_lnames().front();
      if (name == "help" || name == "config") continue;
      std::string value;
      if (opt->get_expected_max() == 0) {  // flag
        value = opt->count() ? "true" : "false";
      } else if (opt->count()) {
        for (const auto& r : opt->results()) value += (value.empty() ? "" : " ") + r;
      } else {
        value = opt->get_default_str();
        if (value.empty()) value = "auto";  // unset optional, resolved at run time
      }
      echo.emplace_back(prefix + name, value);
    }
  };
  add(app, "");
  add(sub, sub.get_name() + ".");
  return echo;
}

Json echo_json(const ConfigEcho& echo) {
  Json j = Json::object();
  for (const auto& [k, v] : echo) j[k] = v;
  return j;
}

std::string echo_key(const ConfigEcho& echo) {
  std::string key;
  for (const auto& [k, v] : echo) key += k + "=" + v + "\n";
  return key;
}

class Sink {
 public:
  explicit Sink(const Common& c) : path_(c.output) {
    if (!path_.empty()) {
      file_.open(path_, std::ios::out | std::ios::trunc | std::ios::binary);
      if (!file_) throw SpectralError(ErrorKind::ConfigInvalid, "cannot open output " + path_);
    }
  }
  std::ostream& out() { return path_.empty() ? std::cout : static_cast<std::ostream&>(file_); }
  fs::path directory() const {
    return path_.empty() ? fs::current_path() : fs::absolute(path_).parent_path();
  }
  std::optional<fs::path> sibling(const std::string& suffix) const {
    if (path_.empty()) return std::nullopt;
    fs::path p(path_);
    return p.parent_path() / (p.stem().string() + suffix);
  }

 private:
  std::string path_;
  std::ofstream file_;
};

void write_plot(const Sink& sink, const std::string& command, const ConfigEcho& echo,
                const Plot& plot) {
  const fs::path path = sink.directory() / plot_filename(command, echo_key(echo) + plot.title);
  std::ofstream f(path, std::ios::binary);
  f << render_svg(plot);
  std::cerr << "plot: " << path.string() << '\n';
}

void emit_json(Sink& sink, const Json& j) { sink.out() << j.dump(2) << '\n'; }

Json header(const ConfigEcho& echo, const DiscretizationConfig& disc) {
  return Json{{"config", echo_json(echo)}, {"discretization", disc}};
}

// --- commands ----------------------------------------------------------------

int cmd_band(const Common& c, const BandArgs& a, const ConfigEcho& echo, Sink& sink) {
  std::vector<BandFunction> bands;
  for (int j = 1; j <= a.bands; ++j)
    bands.push_back(sample_band(j, a.xi_min, a.xi_max, a.samples, c.disc));

  std::vector<BandReport> reports;
  for (const auto& band : bands) {
    std::optional<BandMinimum> m;
    try {
      m = find_minimum(band);
    } catch (const SpectralError& err) {
      if (err.kind() != ErrorKind::NoBracket) throw;
    }
    reports.push_back(make_band_report(band, m));
  }
  const PropertyReport props = check_rappel(bands);

  // Hermite interpolant against fresh solves at random off-node points of band 1.
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> dist(a.xi_min, a.xi_max);
  double max_dev = 0.0;
  for (int k = 0; k < a.fidelity_points; ++k) {
    const double xi = dist(rng);
    max_dev = std::max(max_dev, std::abs(bands[0].interpolate(xi) - bands[0].evaluate(xi).mu));
  }

  if (c.format == "json") {
    Json j = header(echo, c.disc);
    j["bands"] = reports;
    j["properties"] = props;
    j["interpolation"] = Json{{"seed", c.seed},
                              {"points", a.fidelity_points},
                              {"max_deviation", number(max_dev)}};
    emit_json(sink, j);
  } else {
    write_band_csv(sink.out(), bands, echo);
    if (auto p = sink.sibling("_properties.csv")) {
      std::ofstream f(*p, std::ios::binary);
      write_properties_csv(f, props, echo);
    }
  }
  if (c.plot) {
    Plot plot{"band functions", "xi", "mu_j(xi)", {}, false, false};
    for (const auto& band : bands) {
      PlotSeries s{"mu_" + std::to_string(band.band_index()), {}, {}};
      for (const auto& p : band.samples()) {
        s.x.push_back(p.xi);
        s.y.push_back(p.mu);
      }
      plot.series.push_back(std::move(s));
    }
    write_plot(sink, "band", echo, plot);
  }

  for (const auto& check : props.checks)
    std::cerr << (check.passed ? "pass " : "FAIL ") << check.name << "[j=" << check.band_index
              << "] measured=" << format_number(check.measured)
              << (check.detail.empty() ? "" : " (" + check.detail + ")") << '\n';
  return props.all_passed() ? kExitOk : kExitChecksFailed;
}

int cmd_conjecture(const Common& c, const ConjectureArgs& a, const ConfigEcho& echo, Sink& sink) {
  const ConjectureVerdict v = conjecture_verdict(c.disc, a.step);
  Json j = header(echo, c.disc);
  const Json body = v;
  for (const auto& [k, val] : body.items()) j[k] = val;
  if (c.format == "json")
    emit_json(sink, j);
  else
    write_key_value_csv(sink.out(), body, echo);
  std::cerr << "verdict " << to_string(v.verdict) << ": mu1'''(xi0) = "
            << format_number(v.third_derivative) << " +- " << format_number(v.error_bar) << '\n';
  return v.verdict == Verdict::Refuted ? kExitChecksFailed : kExitOk;
}

int cmd_current(const Common& c, const CurrentArgs& a, const ConfigEcho& echo, Sink& sink) {
  const BandSet bands = compute_band_set(c.disc);
  Json j = header(echo, c.disc);
  j["theta0"] = number(bands.theta0());
  j["theta1"] = number(bands.theta1);
  if (a.scan) {
    const double lo = a.scan_lo.value_or(bands.theta0());
    const double hi = a.scan_hi.value_or(bands.theta1);
    if (!(hi > lo) || a.scan_points < 1)
      throw SpectralError(ErrorKind::ConfigInvalid, "empty scan range");
    std::vector<double> grid;
    for (int k = 1; k <= a.scan_points; ++k) grid.push_back(lo + (hi - lo) * k / (a.scan_points + 1));
    const CurrentScan scan = current_sign_scan(grid, bands);
    if (c.format == "json") {
      j["scan"] = scan;
      emit_json(sink, j);
    } else {
      write_scan_csv(sink.out(), scan, echo);
    }
    if (c.plot) {
      PlotSeries s{"c(e)", {}, {}};
      for (const auto& r : scan.rows) {
        s.x.push_back(r.e);
        s.y.push_back(r.c);
      }
      write_plot(sink, "current", echo, {"algebraic current", "e", "c(e)", {s}, false, false});
    }
    return kExitOk;
  }
  const double e = a.e.value_or(bands.theta0() + 0.05);
  const CurrentReport rep = current_window(e, a.delta, bands);
  if (c.format == "json") {
    j["report"] = rep;
    emit_json(sink, j);
  } else {
    write_key_value_csv(sink.out(), Json(rep), echo);
  }
  return kExitOk;
}

int cmd_agmon(const Common& c, const AgmonArgs& a, const ConfigEcho& echo, Sink& sink) {
  const BandSet bands = compute_band_set(c.disc);
  const AgmonReport rep = agmon_report(a.e, a.K, a.n_xi, bands, c.disc);
  if (c.format == "json") {
    Json j = header(echo, c.disc);
    j["report"] = rep;
    emit_json(sink, j);
  } else {
    write_agmon_csv(sink.out(), rep, echo);
  }
  if (c.plot) {
    PlotSeries s{"int e^{Kx}|u_1|^2", {}, {}};
    for (const auto& r : rep.per_xi) {
      s.x.push_back(r.xi);
      s.y.push_back(r.weighted_norm);
    }
    write_plot(sink, "agmon", echo, {"Agmon weighted norms", "xi", "weighted norm", {s}, false, false});
  }
  return kExitOk;
}

int cmd_mourre(const Common& c, const MourreArgs& a, const ConfigEcho& echo, Sink& sink) {
  const ScalingExponents exps = scaling_exponents(Rational::from_double(a.alpha));
  Json j = header(echo, c.disc);
  j["exponents"] = exps;
  MourreHypotheses hyp;
  if (a.c0) {
    hyp.c0 = *a.c0;
    hyp.c1 = a.c1;
    hyp.c2 = a.c2;
    hyp.I = {a.I_lo, a.I_hi};
    hyp.J = {a.J_lo, a.J_hi};
    hyp.M = a.M;
  } else {
    const BandSet bands = compute_band_set(c.disc);
    const double beta = a.beta.value_or(2 * a.alpha + 0.5);
    const double gamma = a.gamma.value_or(std::max(beta, 1 + 2 * a.alpha + 0.5));
    const SemiclassicalWindow w =
        build_window(a.h, a.alpha, beta, gamma, a.a, a.b, a.V_inf, bands.theta0());
    const MourreConstant mc = unperturbed_mourre_constant(w, bands);
    j["window"] = w;
    j["mourre_constant"] = mc;
    hyp.c0 = mc.c0;
    hyp.c1 = std::pow(a.h, 1 - a.alpha);
    hyp.c2 = std::pow(a.h, 2 - a.alpha);
    hyp.I = w.I;
    hyp.J = w.J;
    hyp.M = a.M;
  }
  const ConstantsLedger L = ledger(hyp);
  j["ledger"] = L;
  j["lap_bound"] = lap_bound(L, a.norm_C, a.norm_CA, a.norm_AC);
  if (c.format == "json") {
    emit_json(sink, j);
  } else {
    Json body = j;
    body.erase("config");
    write_key_value_csv(sink.out(), body, echo);
  }
  return kExitOk;
}

int cmd_audit(const Common& c, const AuditArgs& a, const ConfigEcho& echo, Sink& sink) {
  const BandSet bands = compute_band_set(c.disc);
  const std::vector<double> hs = log_spaced(a.h_min, a.h_max, a.h_points);
  const ScalingAudit audit = scaling_audit(a.alpha, hs, bands, a.options);
  if (c.format == "json") {
    Json j = header(echo, c.disc);
    j["audit"] = audit;
    emit_json(sink, j);
  } else {
    write_audit_csv(sink.out(), audit, echo);
  }
  if (c.plot) {
    PlotSeries data{"C_final", {}, {}}, fit{"fit", {}, {}};
    for (const auto& r : audit.rows) {
      data.x.push_back(r.h);
      data.y.push_back(r.C_final);
      fit.x.push_back(r.h);
      fit.y.push_back(std::exp(audit.intercept + audit.slope * std::log(r.h)));
    }
    write_plot(sink, "audit", echo, {"scaling audit", "h", "C_final", {data, fit}, true, true});
  }
  std::cerr << "alpha=" << format_number(a.alpha) << " slope=" << format_number(audit.slope)
            << " target=" << format_number(audit.target)
            << (audit.within_tolerance ? " (match)" : " (MISMATCH)") << '\n';
  return audit.within_tolerance ? kExitOk : kExitChecksFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Band structure, edge currents and Mourre constants of the de Gennes model"};
  app.option_defaults()->always_capture_default();
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value configuration file (flags take precedence)");

  Common common;
  app.add_option("--format", common.format, "report format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--output,-o", common.output, "output file (stdout when empty)");
  app.add_option("--seed", common.seed, "seed for randomized checks");
  app.add_flag("--plot", common.plot, "write SVG plots next to the output");
  app.add_option("--domain-length", common.disc.domain_length, "nominal truncation length L");
  app.add_option("--grid-points", common.disc.grid_points, "grid intervals on [0, L]");
  app.add_option("--refinement-levels", common.disc.refinement_levels, "Richardson levels");
  app.add_option("--target-tol", common.disc.target_tol, "accepted eigenvalue error");

  BandArgs band;
  auto* sub_band = app.add_subcommand("band", "sample bands and check their structure");
  sub_band->add_option("--bands", band.bands, "number of bands")->check(CLI::Range(1, 6));
  sub_band->add_option("--xi-min", band.xi_min);
  sub_band->add_option("--xi-max", band.xi_max);
  sub_band->add_option("--samples", band.samples);
  sub_band->add_option("--fidelity-points", band.fidelity_points);

  ConjectureArgs conj;
  auto* sub_conj = app.add_subcommand("conjecture", "sign of the third derivative at the minimum");
  sub_conj->add_option("--step", conj.step, "base finite-difference step s");

  CurrentArgs cur;
  auto* sub_cur = app.add_subcommand("current", "algebraic current and window extrema");
  sub_cur->add_option("--e", cur.e, "window centre (default Theta0 + 0.05)");
  sub_cur->add_option("--delta", cur.delta, "window half-width");
  sub_cur->add_flag("--scan", cur.scan, "tabulate c(e) instead");
  sub_cur->add_option("--scan-points", cur.scan_points);
  sub_cur->add_option("--scan-lo", cur.scan_lo, "default Theta0");
  sub_cur->add_option("--scan-hi", cur.scan_hi, "default Theta1");

  AgmonArgs ag;
  auto* sub_ag = app.add_subcommand("agmon", "exponentially weighted norms of ground states");
  sub_ag->add_option("--e", ag.e);
  sub_ag->add_option("--K", ag.K);
  sub_ag->add_option("--n-xi", ag.n_xi);

  MourreArgs mo;
  auto* sub_mo = app.add_subcommand("mourre", "constants ledger and LAP bound");
  sub_mo->set_help_flag("--help", "print help");  // frees -h for the semiclassical parameter
  sub_mo->add_option("--alpha", mo.alpha);
  sub_mo->add_option("--h", mo.h);
  sub_mo->add_option("--a", mo.a);
  sub_mo->add_option("--b", mo.b);
  sub_mo->add_option("--beta", mo.beta, "default 2 alpha + 0.5");
  sub_mo->add_option("--gamma", mo.gamma, "default max(beta, 1.5 + 2 alpha)");
  sub_mo->add_option("--V-inf", mo.V_inf);
  sub_mo->add_option("--c0", mo.c0, "abstract hypotheses instead of the semiclassical window");
  sub_mo->add_option("--c1", mo.c1);
  sub_mo->add_option("--c2", mo.c2);
  sub_mo->add_option("--I-lo", mo.I_lo);
  sub_mo->add_option("--I-hi", mo.I_hi);
  sub_mo->add_option("--J-lo", mo.J_lo);
  sub_mo->add_option("--J-hi", mo.J_hi);
  sub_mo->add_option("--M", mo.M);
  sub_mo->add_option("--norm-C", mo.norm_C);
  sub_mo->add_option("--norm-CA", mo.norm_CA);
  sub_mo->add_option("--norm-AC", mo.norm_AC);

  AuditArgs au;
  auto* sub_au = app.add_subcommand("audit", "h-scaling of the composed LAP bound");
  sub_au->add_option("--alpha", au.alpha);
  sub_au->add_option("--h-min", au.h_min);
  sub_au->add_option("--h-max", au.h_max);
  sub_au->add_option("--h-points", au.h_points);
  sub_au->add_option("--a", au.options.a);
  sub_au->add_option("--b", au.options.b);
  sub_au->add_option("--c0-prefactor", au.options.c0_prefactor);
  sub_au->add_option("--c1-prefactor", au.options.c1_prefactor);
  sub_au->add_option("--c2-prefactor", au.options.c2_prefactor);
  sub_au->add_option("--fit-threshold", au.options.fit_threshold);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const ConfigEcho echo = collect_echo(app, *sub);
  try {
    common.disc.validate();
    Sink sink(common);
    if (sub == sub_band) return cmd_band(common, band, echo, sink);
    if (sub == sub_conj) return cmd_conjecture(common, conj, echo, sink);
    if (sub == sub_cur) return cmd_current(common, cur, echo, sink);
    if (sub == sub_ag) return cmd_agmon(common, ag, echo, sink);
    if (sub == sub_mo) return cmd_mourre(common, mo, echo, sink);
    if (sub == sub_au) return cmd_audit(common, au, echo, sink);
  } catch (const SpectralError& err) {
    std::cerr << err.what() << '\n';
    return exit_code(err.kind());
  }
  return kExitInvalid;
}
