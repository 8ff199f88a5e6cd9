#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "cocoon/json.hpp"
#include "cocoon/pipeline.hpp"
#include "cocoon/semantics.hpp"
#include "cocoon/table.hpp"

namespace cocoon::report {

inline constexpr std::string_view kToolVersion = "0.1.0";

// The exported profile. Top-level keys, in order: "Semantic Context",
// "Statistical Profile", "Semantic Profile", "Semantic Review", "Meta".
//
// Entries are keyed target -> kind. A step that has not produced anything is
// {"status": "pending" | "running" | "failed" | "stale"} ("error" added on
// failure); an entry whose step is not done carries "step_status".
struct ProfileDocument {
  Json semantic_context = Json::object();
  Json statistical_profile = Json::object();
  Json semantic_profile = Json::object();
  Json semantic_review = Json::object();
  Json meta = Json::object();

  Json to_json() const;
  std::string dump() const;  // two-space indent, deterministic
  // Throws ParseError when a top-level key is missing or not an object.
  static ProfileDocument from_json(const Json& doc);
  static ProfileDocument parse(std::string_view text);

  bool operator==(const ProfileDocument&) const = default;
};

// Throws NothingToExport when no step has completed.
ProfileDocument export_document(const pipeline::SessionState& state);
inline std::string export_json(const pipeline::SessionState& state) {
  return export_document(state).dump();
}
inline std::string export_json(const pipeline::Session& s) { return export_json(s.snapshot()); }

enum class ChartKind { Histogram, Bar, Map };
std::string_view to_string(ChartKind kind);

// Equal-width bins over [edges.front(), edges.back()]; bin i holds values in
// [edges[i], edges[i+1]), the last bin also holds the maximum. Dates bin on
// days since 1970-01-01, timestamps on microseconds.
struct HistogramData {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
  std::string unit;  // "number", "date" or "timestamp"
};

struct BarData {
  std::vector<std::pair<std::string, std::size_t>> bars;  // top 20 plus "<other>"
};

// Coordinate points (lat, lon), or per-region counts for single-column
// geographic types such as zip codes.
struct MapData {
  std::vector<std::pair<double, double>> points;
  std::vector<std::pair<std::string, std::size_t>> regions;
};

struct ChartSpec {
  ChartKind kind = ChartKind::Histogram;
  std::vector<std::string> columns;
  std::variant<HistogramData, BarData, MapData> payload;

  Json to_json() const;
};

inline constexpr std::size_t kMaxHistogramBins = 30;
inline constexpr std::size_t kMaxBars = 20;
inline constexpr std::size_t kMaxMapPoints = 1000;

// Picks the chart by higher-order type first, then primitive type:
//   lat/long pair                    map of the first distinct in-range points
//   zip/FIPS/country/state           map of region counts
//   category or boolean              bar
//   integer, float, date, timestamp  histogram with min(30, ceil(sqrt(n))) bins
// Throws NoChartApplicable for free text and for columns without values.
ChartSpec build_chart_data(const ColumnTable& table, const std::vector<std::string>& columns,
                           const semantics::HigherOrderAssignment& assignment);

// One chart per column or coordinate pair, skipping those without a chart.
std::vector<ChartSpec> build_all_charts(const ColumnTable& table,
                                        const semantics::HigherOrderAssignment& assignment);
Json charts_to_json(const std::vector<ChartSpec>& charts);

// Self-contained HTML page: hierarchy with alert counts, then one section per
// target with statistics, expectation, thought and verdict. Error verdicts get
// <span class="alert-red" data-step="...">, others a green tick.
std::string render_static_report(const ProfileDocument& doc, const std::vector<ChartSpec>& charts);

}  // namespace cocoon::report
