#pragma once

// Serialization of reports: JSON with stable key order, CSV with 17
// significant digits, static SVG line plots.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "degennes/band.hpp"
#include "degennes/currents.hpp"
#include "degennes/mourre.hpp"

namespace degennes {

using Json = nlohmann::ordered_json;

/// Non-finite values are written as the strings PLUS_INFINITY / MINUS_INFINITY / NaN.
Json number(double v);
double number_from(const Json& j);
std::string format_number(double v);

struct BandReport {
  friend bool operator==(const BandReport&, const BandReport&) = default;

  int band_index = 1;
  std::vector<BandSample> samples;
  std::optional<BandMinimum> minimum;
};

BandReport make_band_report(const BandFunction& band, std::optional<BandMinimum> minimum);

void to_json(Json& j, const DiscretizationConfig& v);
void from_json(const Json& j, DiscretizationConfig& v);
void to_json(Json& j, const BandSample& v);
void from_json(const Json& j, BandSample& v);
void to_json(Json& j, const BandMinimum& v);
void from_json(const Json& j, BandMinimum& v);
void to_json(Json& j, const BandReport& v);
void from_json(const Json& j, BandReport& v);
void to_json(Json& j, const PropertyCheck& v);
void from_json(const Json& j, PropertyCheck& v);
void to_json(Json& j, const PropertyReport& v);
void from_json(const Json& j, PropertyReport& v);
void to_json(Json& j, const ConjectureVerdict& v);
void from_json(const Json& j, ConjectureVerdict& v);
void to_json(Json& j, const CurrentScan& v);
void from_json(const Json& j, CurrentScan& v);
void to_json(Json& j, const CurrentReport& v);
void from_json(const Json& j, CurrentReport& v);
void to_json(Json& j, const AgmonReport& v);
void from_json(const Json& j, AgmonReport& v);
void to_json(Json& j, const MourreHypotheses& v);
void from_json(const Json& j, MourreHypotheses& v);
void to_json(Json& j, const LapBound& v);
void from_json(const Json& j, LapBound& v);
void to_json(Json& j, const ConstantsLedger& v);  // includes D1, D2, D3 on an (eps, z) grid
void from_json(const Json& j, ConstantsLedger& v);
void to_json(Json& j, const ScalingExponents& v);
void from_json(const Json& j, ScalingExponents& v);
void to_json(Json& j, const SemiclassicalWindow& v);
void from_json(const Json& j, SemiclassicalWindow& v);
void to_json(Json& j, const MourreConstant& v);
void from_json(const Json& j, MourreConstant& v);
void to_json(Json& j, const ScalingAudit& v);
void from_json(const Json& j, ScalingAudit& v);

/// CSV writer: optional '#' comment lines, a header, then rows.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void comment(const std::string& key, const std::string& value);
  void header(std::initializer_list<std::string> columns);
  void row(std::initializer_list<std::string> cells);

 private:
  std::ostream& out_;
};

using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

void write_band_csv(std::ostream& out, std::span<const BandFunction> bands,
                    const ConfigEcho& echo = {});
void write_properties_csv(std::ostream& out, const PropertyReport& report,
                          const ConfigEcho& echo = {});
void write_scan_csv(std::ostream& out, const CurrentScan& scan, const ConfigEcho& echo = {});
void write_agmon_csv(std::ostream& out, const AgmonReport& report, const ConfigEcho& echo = {});
void write_audit_csv(std::ostream& out, const ScalingAudit& audit, const ConfigEcho& echo = {});
/// Flattens a JSON object into key,value rows (nested keys joined with '.').
void write_key_value_csv(std::ostream& out, const Json& object, const ConfigEcho& echo = {});

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  bool log_x = false;
  bool log_y = false;
};

std::string render_svg(const Plot& plot);

std::uint64_t fnv1a(const std::string& text);

/// "<command>_<16 hex digits>.svg", the hash taken over key.
std::string plot_filename(const std::string& command, const std::string& key);

}  // namespace degennes
