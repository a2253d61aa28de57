#include "degennes/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

namespace degennes {

Json number(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "PLUS_INFINITY" : "MINUS_INFINITY";
  return v;
}

double number_from(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "PLUS_INFINITY") return std::numeric_limits<double>::infinity();
    if (s == "MINUS_INFINITY") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  return j.get<double>();
}

std::string format_number(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "PLUS_INFINITY" : "MINUS_INFINITY";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

double num(const Json& j, const char* key) { return number_from(j.at(key)); }

Json interval(const Interval& i) { return Json::array({number(i.lo), number(i.hi)}); }
Interval interval_from(const Json& j) { return {number_from(j.at(0)), number_from(j.at(1))}; }

Branch branch_from(const std::string& s) { return s == "RIGHT" ? Branch::Right : Branch::Left; }

Verdict verdict_from(const std::string& s) {
  if (s == "SUPPORTED") return Verdict::Supported;
  if (s == "REFUTED") return Verdict::Refuted;
  return Verdict::Inconclusive;
}

Rational rational_from(const Json& j) { return Rational(j.at(0).get<std::int64_t>(), j.at(1).get<std::int64_t>()); }

Json rational(const Rational& r) {
  return Json{{"value", r.to_double()}, {"exact", r.str()}, {"fraction", {r.num, r.den}}};
}

}  // namespace

BandReport make_band_report(const BandFunction& band, std::optional<BandMinimum> minimum) {
  return {band.band_index(), std::vector<BandSample>(band.samples().begin(), band.samples().end()),
          minimum};
}

void to_json(Json& j, const DiscretizationConfig& v) {
  j = Json{{"domain_length", number(v.domain_length)},
           {"grid_points", v.grid_points},
           {"refinement_levels", v.refinement_levels},
           {"target_tol", number(v.target_tol)},
           {"strict", v.strict}};
}
void from_json(const Json& j, DiscretizationConfig& v) {
  v.domain_length = num(j, "domain_length");
  v.grid_points = j.at("grid_points").get<int>();
  v.refinement_levels = j.at("refinement_levels").get<int>();
  v.target_tol = num(j, "target_tol");
  v.strict = j.at("strict").get<bool>();
}

void to_json(Json& j, const BandSample& v) {
  j = Json{{"xi", number(v.xi)},
           {"mu", number(v.mu)},
           {"mu_prime", number(v.mu_prime)},
           {"est_error", number(v.est_error)}};
}
void from_json(const Json& j, BandSample& v) {
  v = {num(j, "xi"), num(j, "mu"), num(j, "mu_prime"), num(j, "est_error")};
}

void to_json(Json& j, const BandMinimum& v) {
  j = Json{{"xi_star", number(v.xi_star)},
           {"theta", number(v.theta)},
           {"second_derivative", number(v.second_derivative)},
           {"third_derivative", number(v.third_derivative)},
           {"error_bars", {number(v.error_bars[0]), number(v.error_bars[1])}}};
}
void from_json(const Json& j, BandMinimum& v) {
  v.xi_star = num(j, "xi_star");
  v.theta = num(j, "theta");
  v.second_derivative = num(j, "second_derivative");
  v.third_derivative = num(j, "third_derivative");
  v.error_bars = {number_from(j.at("error_bars").at(0)), number_from(j.at("error_bars").at(1))};
}

void to_json(Json& j, const BandReport& v) {
  j = Json{{"band_index", v.band_index}, {"samples", v.samples}};
  j["minimum"] = v.minimum ? Json(*v.minimum) : Json(nullptr);
}
void from_json(const Json& j, BandReport& v) {
  v.band_index = j.at("band_index").get<int>();
  v.samples = j.at("samples").get<std::vector<BandSample>>();
  if (j.at("minimum").is_null())
    v.minimum.reset();
  else
    v.minimum = j.at("minimum").get<BandMinimum>();
}

void to_json(Json& j, const PropertyCheck& v) {
  j = Json{{"name", v.name},
           {"band_index", v.band_index},
           {"passed", v.passed},
           {"measured", number(v.measured)},
           {"threshold", number(v.threshold)},
           {"detail", v.detail}};
}
void from_json(const Json& j, PropertyCheck& v) {
  v.name = j.at("name").get<std::string>();
  v.band_index = j.at("band_index").get<int>();
  v.passed = j.at("passed").get<bool>();
  v.measured = num(j, "measured");
  v.threshold = num(j, "threshold");
  v.detail = j.at("detail").get<std::string>();
}

void to_json(Json& j, const PropertyReport& v) {
  j = Json{{"all_passed", v.all_passed()}, {"checks", v.checks}};
}
void from_json(const Json& j, PropertyReport& v) {
  v.checks = j.at("checks").get<std::vector<PropertyCheck>>();
}

void to_json(Json& j, const ConjectureVerdict& v) {
  j = Json{{"third_derivative", number(v.third_derivative)},
           {"error_bar", number(v.error_bar)},
           {"verdict", to_string(v.verdict)},
           {"xi0", number(v.xi0)},
           {"second_derivative", number(v.second_derivative)},
           {"grid_points", v.grid_points},
           {"resolution_values",
            {number(v.resolution_values[0]), number(v.resolution_values[1])}},
           {"resolution_bars", {number(v.resolution_bars[0]), number(v.resolution_bars[1])}}};
}
void from_json(const Json& j, ConjectureVerdict& v) {
  v.third_derivative = num(j, "third_derivative");
  v.error_bar = num(j, "error_bar");
  v.verdict = verdict_from(j.at("verdict").get<std::string>());
  v.xi0 = num(j, "xi0");
  v.second_derivative = num(j, "second_derivative");
  v.grid_points = j.at("grid_points").get<std::array<int, 2>>();
  for (std::size_t k = 0; k < 2; ++k) {
    v.resolution_values[k] = number_from(j.at("resolution_values").at(k));
    v.resolution_bars[k] = number_from(j.at("resolution_bars").at(k));
  }
}

void to_json(Json& j, const CurrentScan& v) {
  Json rows = Json::array();
  for (const auto& r : v.rows) rows.push_back(Json{{"e", number(r.e)}, {"c", number(r.c)}});
  j = Json{{"rows", rows},
           {"e_star_candidate", v.e_star_candidate ? number(*v.e_star_candidate) : Json("NONE_FOUND")}};
}
void from_json(const Json& j, CurrentScan& v) {
  v.rows.clear();
  for (const auto& r : j.at("rows")) v.rows.push_back({num(r, "e"), num(r, "c")});
  const Json& e = j.at("e_star_candidate");
  if (e.is_string() && e.get<std::string>() == "NONE_FOUND")
    v.e_star_candidate.reset();
  else
    v.e_star_candidate = number_from(e);
}

void to_json(Json& j, const CurrentReport& v) {
  j = Json{{"e", number(v.e)},
           {"delta", number(v.delta)},
           {"c_of_e", number(v.c_of_e)},
           {"lambda_min_over_h", number(v.lambda_min_over_h)},
           {"lambda_max_over_h", number(v.lambda_max_over_h)},
           {"spectral_radius_over_h", number(v.spectral_radius_over_h)},
           {"dominant_side", to_string(v.dominant_side)},
           {"left_preimage", {number(v.left_lo), number(v.left_hi)}},
           {"right_preimage", {number(v.right_lo), number(v.right_hi)}}};
}
void from_json(const Json& j, CurrentReport& v) {
  v.e = num(j, "e");
  v.delta = num(j, "delta");
  v.c_of_e = num(j, "c_of_e");
  v.lambda_min_over_h = num(j, "lambda_min_over_h");
  v.lambda_max_over_h = num(j, "lambda_max_over_h");
  v.spectral_radius_over_h = num(j, "spectral_radius_over_h");
  v.dominant_side = branch_from(j.at("dominant_side").get<std::string>());
  v.left_lo = number_from(j.at("left_preimage").at(0));
  v.left_hi = number_from(j.at("left_preimage").at(1));
  v.right_lo = number_from(j.at("right_preimage").at(0));
  v.right_hi = number_from(j.at("right_preimage").at(1));
}

void to_json(Json& j, const AgmonReport& v) {
  Json rows = Json::array();
  for (const auto& r : v.per_xi)
    rows.push_back(Json{{"xi", number(r.xi)},
                        {"weighted_norm", number(r.weighted_norm)},
                        {"norm", number(r.norm)}});
  j = Json{{"e", number(v.e)},
           {"K", number(v.K)},
           {"per_xi", rows},
           {"sup_weighted_norm", number(v.sup_weighted_norm)},
           {"x_eK", number(v.x_eK)},
           {"C_e", number(v.C_e)}};
}
void from_json(const Json& j, AgmonReport& v) {
  v.e = num(j, "e");
  v.K = num(j, "K");
  v.per_xi.clear();
  for (const auto& r : j.at("per_xi"))
    v.per_xi.push_back({num(r, "xi"), num(r, "weighted_norm"), num(r, "norm")});
  v.sup_weighted_norm = num(j, "sup_weighted_norm");
  v.x_eK = num(j, "x_eK");
  v.C_e = num(j, "C_e");
}

void to_json(Json& j, const MourreHypotheses& v) {
  j = Json{{"c0", number(v.c0)}, {"c1", number(v.c1)}, {"c2", number(v.c2)},
           {"I", interval(v.I)},  {"J", interval(v.J)},  {"M", number(v.M)}};
}
void from_json(const Json& j, MourreHypotheses& v) {
  v.c0 = num(j, "c0");
  v.c1 = num(j, "c1");
  v.c2 = num(j, "c2");
  v.I = interval_from(j.at("I"));
  v.J = interval_from(j.at("J"));
  v.M = num(j, "M");
}

void to_json(Json& j, const LapBound& v) {
  j = Json{{"eps_hat", number(v.eps_hat)}, {"K1", number(v.K1)},         {"K2", number(v.K2)},
           {"K", number(v.K)},             {"C_eps0", number(v.C_eps0)}, {"C_final", number(v.C_final)}};
}
void from_json(const Json& j, LapBound& v) {
  v = {num(j, "eps_hat"), num(j, "K1"), num(j, "K2"), num(j, "K"), num(j, "C_eps0"), num(j, "C_final")};
}

void to_json(Json& j, const ConstantsLedger& v) {
  j = Json{{"hypotheses", v.hyp},
           {"sup_J_ell_plus_i", number(v.sup_J_ell_plus_i)},
           {"sup_B_z_plus_i", number(v.sup_B_z_plus_i)},
           {"dist_I_Jc", number(v.dist_I_Jc)},
           {"eps1", number(v.eps1)},
           {"eps0", number(v.eps0)},
           {"eps2", number(v.eps2)},
           {"c0_tilde", number(v.c0_tilde)},
           {"integrals",
            {{"inv_sqrt", number(v.integrals.inv_sqrt)},
             {"log_sqrt", number(v.integrals.log_sqrt)},
             {"inv_sqrt_error", number(v.integrals.inv_sqrt_error)},
             {"log_sqrt_error", number(v.integrals.log_sqrt_error)}}}};
  const LapBound& b = v.bound;
  j["eps_hat"] = number(b.eps_hat);
  j["K1"] = number(b.K1);
  j["K2"] = number(b.K2);
  j["K"] = number(b.K);
  j["C_eps0"] = number(b.C_eps0);
  j["C_final"] = number(b.C_final);

  Json eps_col = Json::array(), re = Json::array(), im = Json::array();
  Json c_col = Json::array(), d1 = Json::array(), d2 = Json::array(), d3 = Json::array();
  const double mid = 0.5 * (v.hyp.I.lo + v.hyp.I.hi);
  for (double eps : {0.25 * v.eps0, 0.5 * v.eps0, v.eps0, v.eps1}) {
    for (std::complex<double> z : {std::complex<double>(v.hyp.I.lo, 0.0),
                                   std::complex<double>(mid, 0.5 * v.hyp.M),
                                   std::complex<double>(v.hyp.I.hi, v.hyp.M)}) {
      eps_col.push_back(number(eps));
      re.push_back(number(z.real()));
      im.push_back(number(z.imag()));
      c_col.push_back(number(v.C(eps, z)));
      d1.push_back(number(v.D1(eps, z)));
      d2.push_back(number(v.D2(eps, z)));
      d3.push_back(number(v.D3(eps, z)));
    }
  }
  j["grid_eps"] = eps_col;
  j["grid_z_re"] = re;
  j["grid_z_im"] = im;
  j["C_of"] = c_col;
  j["D1"] = d1;
  j["D2"] = d2;
  j["D3"] = d3;
}
void from_json(const Json& j, ConstantsLedger& v) {
  v.hyp = j.at("hypotheses").get<MourreHypotheses>();
  v.sup_J_ell_plus_i = num(j, "sup_J_ell_plus_i");
  v.sup_B_z_plus_i = num(j, "sup_B_z_plus_i");
  v.dist_I_Jc = num(j, "dist_I_Jc");
  v.eps1 = num(j, "eps1");
  v.eps0 = num(j, "eps0");
  v.eps2 = num(j, "eps2");
  v.c0_tilde = num(j, "c0_tilde");
  const Json& in = j.at("integrals");
  v.integrals = {num(in, "inv_sqrt"), num(in, "log_sqrt"), num(in, "inv_sqrt_error"),
                 num(in, "log_sqrt_error")};
  v.bound = {num(j, "eps_hat"), num(j, "K1"), num(j, "K2"), num(j, "K"), num(j, "C_eps0"),
             num(j, "C_final")};
}

void to_json(Json& j, const ScalingExponents& v) {
  Json table = Json::object();
  for (const auto& [name, r] : v.table) table[name] = rational(r);
  Json cands = Json::array();
  for (const auto& r : v.candidates) cands.push_back(rational(r));
  j = Json{{"alpha", rational(v.alpha)},
           {"exponents", table},
           {"candidates", cands},
           {"final_exponent", rational(v.final_exponent)}};
}
void from_json(const Json& j, ScalingExponents& v) {
  v.alpha = rational_from(j.at("alpha").at("fraction"));
  v.table.clear();
  for (const auto& [name, r] : j.at("exponents").items())
    v.table.emplace_back(name, rational_from(r.at("fraction")));
  for (std::size_t k = 0; k < 3; ++k)
    v.candidates[k] = rational_from(j.at("candidates").at(k).at("fraction"));
  v.final_exponent = rational_from(j.at("final_exponent").at("fraction"));
}

void to_json(Json& j, const SemiclassicalWindow& v) {
  j = Json{{"h", number(v.h)},         {"alpha", number(v.alpha)}, {"beta", number(v.beta)},
           {"gamma", number(v.gamma)}, {"a", number(v.a)},         {"b", number(v.b)},
           {"theta0", number(v.theta0)}, {"e", number(v.e)},       {"delta", number(v.delta)},
           {"d", number(v.d)},         {"I", interval(v.I)},       {"J", interval(v.J)},
           {"V_inf", number(v.V_inf)}, {"c_h", number(v.c_h)}};
}
void from_json(const Json& j, SemiclassicalWindow& v) {
  v.h = num(j, "h");
  v.alpha = num(j, "alpha");
  v.beta = num(j, "beta");
  v.gamma = num(j, "gamma");
  v.a = num(j, "a");
  v.b = num(j, "b");
  v.theta0 = num(j, "theta0");
  v.e = num(j, "e");
  v.delta = num(j, "delta");
  v.d = num(j, "d");
  v.I = interval_from(j.at("I"));
  v.J = interval_from(j.at("J"));
  v.V_inf = num(j, "V_inf");
  v.c_h = num(j, "c_h");
}

void to_json(Json& j, const MourreConstant& v) {
  j = Json{{"raw_inf", number(v.raw_inf)},
           {"c0", number(v.c0)},
           {"normalized", number(v.normalized)},
           {"degenerate", v.degenerate},
           {"left_preimage", {number(v.left_lo), number(v.left_hi)}},
           {"right_preimage", {number(v.right_lo), number(v.right_hi)}}};
}
void from_json(const Json& j, MourreConstant& v) {
  v.raw_inf = num(j, "raw_inf");
  v.c0 = num(j, "c0");
  v.normalized = num(j, "normalized");
  v.degenerate = j.at("degenerate").get<bool>();
  v.left_lo = number_from(j.at("left_preimage").at(0));
  v.left_hi = number_from(j.at("left_preimage").at(1));
  v.right_lo = number_from(j.at("right_preimage").at(0));
  v.right_hi = number_from(j.at("right_preimage").at(1));
}

void to_json(Json& j, const ScalingAudit& v) {
  Json rows = Json::array();
  for (const auto& r : v.rows)
    rows.push_back(Json{{"h", number(r.h)},
                        {"c0", number(r.c0)},
                        {"c1", number(r.c1)},
                        {"c2", number(r.c2)},
                        {"eps0", number(r.eps0)},
                        {"C_final", number(r.C_final)}});
  j = Json{{"alpha", number(v.alpha)},
           {"slope", number(v.slope)},
           {"intercept", number(v.intercept)},
           {"residual", number(v.residual)},
           {"target", number(v.target)},
           {"within_tolerance", v.within_tolerance},
           {"rows", rows}};
}
void from_json(const Json& j, ScalingAudit& v) {
  v.alpha = num(j, "alpha");
  v.slope = num(j, "slope");
  v.intercept = num(j, "intercept");
  v.residual = num(j, "residual");
  v.target = num(j, "target");
  v.within_tolerance = j.at("within_tolerance").get<bool>();
  v.rows.clear();
  for (const auto& r : j.at("rows"))
    v.rows.push_back({num(r, "h"), num(r, "c0"), num(r, "c1"), num(r, "c2"), num(r, "eps0"),
                      num(r, "C_final")});
}

// --- CSV ----------------------------------------------------------------------

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

void echo_config(CsvWriter& w, const ConfigEcho& echo) {
  for (const auto& [k, v] : echo) w.comment(k, v);
}

void flatten(const Json& j, const std::string& prefix, CsvWriter& w) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, w);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), w);
  } else if (j.is_number_float()) {
    w.row({prefix, format_number(j.get<double>())});
  } else if (j.is_string()) {
    w.row({prefix, j.get<std::string>()});
  } else {
    w.row({prefix, j.dump()});
  }
}

}  // namespace

void CsvWriter::comment(const std::string& key, const std::string& value) {
  out_ << "# " << key << '=' << value << '\n';
}

void CsvWriter::header(std::initializer_list<std::string> columns) { row(columns); }

void CsvWriter::row(std::initializer_list<std::string> cells) {
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out_ << ',';
    out_ << csv_cell(c);
    first = false;
  }
  out_ << '\n';
}

void write_band_csv(std::ostream& out, std::span<const BandFunction> bands, const ConfigEcho& echo) {
  CsvWriter w(out);
  echo_config(w, echo);
  w.header({"band_index", "xi", "mu", "mu_prime", "est_error"});
  for (const auto& band : bands)
    for (const auto& s : band.samples())
      w.row({std::to_string(band.band_index()), format_number(s.xi), format_number(s.mu),
             format_number(s.mu_prime), format_number(s.est_error)});
}

void write_properties_csv(std::ostream& out, const PropertyReport& report, const ConfigEcho& echo) {
  CsvWriter w(out);
  echo_config(w, echo);
  w.header({"name", "band_index", "passed", "measured", "threshold", "detail"});
  for (const auto& c : report.checks)
    w.row({c.name, std::to_string(c.band_index), c.passed ? "true" : "false",
           format_number(c.measured), format_number(c.threshold), c.detail});
}

void write_scan_csv(std::ostream& out, const CurrentScan& scan, const ConfigEcho& echo) {
  CsvWriter w(out);
  echo_config(w, echo);
  w.comment("e_star_candidate",
            scan.e_star_candidate ? format_number(*scan.e_star_candidate) : "NONE_FOUND");
  w.header({"e", "c"});
  for (const auto& r : scan.rows) w.row({format_number(r.e), format_number(r.c)});
}

void write_agmon_csv(std::ostream& out, const AgmonReport& rep, const ConfigEcho& echo) {
  CsvWriter w(out);
  echo_config(w, echo);
  w.comment("e", format_number(rep.e));
  w.comment("K", format_number(rep.K));
  w.comment("sup_weighted_norm", format_number(rep.sup_weighted_norm));
  w.comment("x_eK", format_number(rep.x_eK));
  w.comment("C_e", format_number(rep.C_e));
  w.header({"xi", "weighted_norm", "norm"});
  for (const auto& r : rep.per_xi)
    w.row({format_number(r.xi), format_number(r.weighted_norm), format_number(r.norm)});
}

void write_audit_csv(std::ostream& out, const ScalingAudit& audit, const ConfigEcho& echo) {
  CsvWriter w(out);
  echo_config(w, echo);
  w.comment("alpha", format_number(audit.alpha));
  w.comment("slope", format_number(audit.slope));
  w.comment("target", format_number(audit.target));
  w.comment("residual", format_number(audit.residual));
  w.header({"h", "c0", "c1", "c2", "eps0", "C_final"});
  for (const auto& r : audit.rows)
    w.row({format_number(r.h), format_number(r.c0), format_number(r.c1), format_number(r.c2),
           format_number(r.eps0), format_number(r.C_final)});
}

void write_key_value_csv(std::ostream& out, const Json& object, const ConfigEcho& echo) {
  CsvWriter w(out);
  echo_config(w, echo);
  w.header({"key", "value"});
  flatten(object, "", w);
}

// --- SVG ----------------------------------------------------------------------

namespace {

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v, bool log_axis) {
  char buf[32];
  if (log_axis)
    std::snprintf(buf, sizeof buf, "1e%g", v);
  else
    std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

std::string render_svg(const Plot& plot) {
  const double W = 720, H = 450, left = 80, right = 170, top = 40, bottom = 60;
  const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  auto tx = [&](double x) { return plot.log_x ? std::log10(x) : x; };
  auto ty = [&](double y) { return plot.log_y ? std::log10(y) : y; };
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : plot.series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      const double x = tx(s.x[i]), y = ty(s.y[i]);
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      xmin = std::min(xmin, x), xmax = std::max(xmax, x);
      ymin = std::min(ymin, y), ymax = std::max(ymax, y);
    }
  if (!(xmin <= xmax)) xmin = 0, xmax = 1;
  if (!(ymin <= ymax)) ymin = 0, ymax = 1;
  if (xmax == xmin) xmin -= 0.5, xmax += 0.5;
  if (ymax == ymin) ymin -= 0.5, ymax += 0.5;
  const double pw = W - left - right, ph = H - top - bottom;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << svg_num(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
    << escape_xml(plot.title) << "</text>\n";
  o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = xmin + (xmax - xmin) * k / 4.0, yv = ymin + (ymax - ymin) * k / 4.0;
    o << "<line x1=\"" << svg_num(px(xv)) << "\" y1=\"" << top + ph << "\" x2=\"" << svg_num(px(xv))
      << "\" y2=\"" << top + ph + 5 << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << svg_num(px(xv)) << "\" y=\"" << top + ph + 18
      << "\" text-anchor=\"middle\">" << tick_label(xv, plot.log_x) << "</text>\n";
    o << "<line x1=\"" << left - 5 << "\" y1=\"" << svg_num(py(yv)) << "\" x2=\"" << left
      << "\" y2=\"" << svg_num(py(yv)) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << left - 8 << "\" y=\"" << svg_num(py(yv) + 4)
      << "\" text-anchor=\"end\">" << tick_label(yv, plot.log_y) << "</text>\n";
  }
  o << "<text x=\"" << svg_num(left + pw / 2) << "\" y=\"" << H - 15
    << "\" text-anchor=\"middle\">" << escape_xml(plot.x_label) << "</text>\n";
  o << "<text transform=\"translate(18," << svg_num(top + ph / 2)
    << ") rotate(-90)\" text-anchor=\"middle\">" << escape_xml(plot.y_label) << "</text>\n";

  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const char* color = palette[k % 6];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      const double x = tx(s.x[i]), y = ty(s.y[i]);
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      o << svg_num(px(x)) << ',' << svg_num(py(y)) << ' ';
    }
    o << "\"/>\n";
    const double ly = top + 16 + 18.0 * double(k);
    o << "<line x1=\"" << W - right + 12 << "\" y1=\"" << ly << "\" x2=\"" << W - right + 36
      << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << W - right + 42 << "\" y=\"" << ly + 4 << "\">" << escape_xml(s.name)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string plot_filename(const std::string& command, const std::string& key) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(key)));
  return command + "_" + buf + ".svg";
}

}  // namespace degennes
