#include "cocoon/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "cocoon/errors.hpp"

namespace cocoon::report {

namespace {

using pipeline::StepStatus;

const char* kSections[] = {"Semantic Context", "Statistical Profile", "Semantic Profile",
                           "Semantic Review", "Meta"};

Json status_marker(const pipeline::StepRecord& rec) {
  Json j = {{"status", std::string(pipeline::to_string(rec.status))}};
  if (rec.status == StepStatus::Failed && !rec.error.empty()) j["error"] = rec.error;
  return j;
}

void mark_if_not_done(Json& entry, const pipeline::StepRecord& rec) {
  if (rec.status != StepStatus::Done) {
    entry["step_status"] = std::string(pipeline::to_string(rec.status));
  }
}

std::string section_status(const std::vector<StepStatus>& statuses) {
  if (statuses.empty()) return "pending";
  const auto count = [&](StepStatus s) {
    return std::count(statuses.begin(), statuses.end(), s);
  };
  if (static_cast<std::size_t>(count(StepStatus::Done)) == statuses.size()) return "done";
  if (static_cast<std::size_t>(count(StepStatus::Pending)) == statuses.size()) return "pending";
  if (count(StepStatus::Failed) > 0) return "failed";
  if (count(StepStatus::Stale) > 0) return "stale";
  return "partial";
}

std::string html_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

// Escapes everything, then restores the underline markup.
std::string summary_html(std::string_view text) {
  std::string out = html_escape(text);
  for (auto [from, to] : {std::pair<std::string_view, std::string_view>{"&lt;u&gt;", "<u>"},
                          {"&lt;/u&gt;", "</u>"}}) {
    for (std::size_t pos = 0; (pos = out.find(from, pos)) != std::string::npos;) {
      out.replace(pos, from.size(), to);
      pos += to.size();
    }
  }
  return out;
}

std::string percent(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f%%", value);
  return buf;
}

std::string fmt_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string text_of(const Json& j) {
  if (j.is_string()) return j.get<std::string>();
  return j.dump();
}

}  // namespace

Json ProfileDocument::to_json() const {
  Json j = Json::object();
  j[kSections[0]] = semantic_context;
  j[kSections[1]] = statistical_profile;
  j[kSections[2]] = semantic_profile;
  j[kSections[3]] = semantic_review;
  j[kSections[4]] = meta;
  return j;
}

std::string ProfileDocument::dump() const { return to_json().dump(2) + "\n"; }

ProfileDocument ProfileDocument::from_json(const Json& doc) {
  if (!doc.is_object()) throw ParseError(0, 0, "profile document must be a JSON object");
  for (const char* key : kSections) {
    if (!doc.contains(key) || !doc[key].is_object()) {
      throw ParseError(0, 0, std::string("profile document lacks object \"") + key + "\"");
    }
  }
  ProfileDocument out;
  out.semantic_context = doc[kSections[0]];
  out.statistical_profile = doc[kSections[1]];
  out.semantic_profile = doc[kSections[2]];
  out.semantic_review = doc[kSections[3]];
  out.meta = doc[kSections[4]];
  return out;
}

ProfileDocument ProfileDocument::parse(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(0, 0, std::string("invalid profile JSON: ") + e.what());
  }
  return from_json(doc);
}

ProfileDocument export_document(const pipeline::SessionState& state) {
  const bool any_done = std::any_of(state.steps.begin(), state.steps.end(), [](const auto& kv) {
    return kv.second.status == StepStatus::Done;
  });
  if (!any_done) throw NothingToExport("no step has completed yet");

  const ColumnTable& table = *state.table;
  const auto plan = pipeline::plan_steps(state);
  const auto record = [&](const StepId& id) {
    const auto it = state.steps.find(id);
    return it == state.steps.end() ? pipeline::StepRecord{} : it->second;
  };

  ProfileDocument doc;

  // Semantic Context
  Json& ctx = doc.semantic_context;
  const auto ts = context::table_summary_step();
  const auto hs = context::hierarchy_step();
  ctx["Table Summary"] =
      state.table_summary ? Json(state.table_summary->text) : status_marker(record(ts));
  ctx["Attribute Hierarchy"] =
      state.hierarchy ? state.hierarchy->to_json() : status_marker(record(hs));
  if (state.hierarchy) {
    Json summaries = Json::object();
    for (const auto& leaf : state.hierarchy->leaves()) {
      for (const auto& c : leaf.columns) {
        const auto it = state.column_summaries.find(c);
        summaries[c] = it != state.column_summaries.end()
                           ? Json(it->second)
                           : status_marker(record(context::column_summary_step(c)));
      }
    }
    ctx["Column Summary"] = std::move(summaries);
  } else {
    ctx["Column Summary"] = status_marker(pipeline::StepRecord{});
  }
  ctx["Higher-Order Types"] = state.assignment().to_json();
  if (state.docs) ctx["Documentation"] = *state.docs;

  // Profiles and reviews, in plan order.
  std::map<std::string, std::vector<StepStatus>> by_section;
  for (const auto& p : plan) {
    const auto& id = p.id;
    const auto rec = record(id);
    const char* section = id.phase == phase::kStat     ? kSections[1]
                          : id.phase == phase::kSem    ? kSections[2]
                          : id.phase == phase::kReview ? kSections[3]
                                                       : kSections[0];
    by_section[section].push_back(rec.status);
    if (id.phase == phase::kContext || id.phase == phase::kClassify) continue;

    Json entry;
    if (id.phase == phase::kStat) {
      const auto it = state.stat.find(id);
      if (it != state.stat.end()) entry = stat_to_json(it->second, table);
    } else if (id.phase == phase::kSem) {
      const auto it = state.sem.find(id);
      if (it != state.sem.end()) {
        entry = semantics::expectation_to_json(it->second.expectation);
        entry["Thought"] = it->second.thought;
      }
    } else {
      const auto it = state.verdicts.find(id);
      if (it != state.verdicts.end()) {
        const auto& v = it->second;
        entry = {{"is_error", v.is_error},
                 {"reasoning", v.reasoning},
                 {"status", std::string(semantics::to_string(v.status))}};
        if (!v.note.empty()) entry["note"] = v.note;
        if (v.status != semantics::VerdictStatus::Machine) {
          entry["machine_is_error"] = v.machine_is_error;
        }
        if (v.gated) entry["gated"] = true;
      }
    }
    if (entry.is_null()) {
      entry = status_marker(rec);
    } else {
      mark_if_not_done(entry, rec);
    }
    Json& target = (id.phase == phase::kStat     ? doc.statistical_profile
                    : id.phase == phase::kSem    ? doc.semantic_profile
                                                 : doc.semantic_review)[id.target];
    target[id.kind] = std::move(entry);
  }

  // Meta
  Json& meta = doc.meta;
  meta["table"] = table.name();
  meta["rows"] = table.row_count();
  meta["columns"] = table.column_count();
  Json types = Json::object();
  for (const auto& s : table.schema()) types[s.name] = std::string(to_string(s.ptype));
  meta["column_types"] = std::move(types);
  meta["tool_version"] = std::string(kToolVersion);
  meta["provider"] =
      state.provider_kind ? Json(std::string(llm::to_string(*state.provider_kind))) : Json();
  Json sections = Json::object();
  for (int i = 0; i < 4; ++i) sections[kSections[i]] = section_status(by_section[kSections[i]]);
  meta["sections"] = std::move(sections);
  Json steps = Json::object();
  for (const auto& p : plan) {
    steps[p.id.str()] = std::string(pipeline::to_string(record(p.id).status));
  }
  meta["steps"] = std::move(steps);
  meta["alert_counts"] = pipeline::alert_counts(state).to_json();
  return doc;
}

std::string_view to_string(ChartKind kind) {
  switch (kind) {
    case ChartKind::Histogram: return "histogram";
    case ChartKind::Bar: return "bar";
    case ChartKind::Map: return "map";
  }
  return "histogram";
}

Json ChartSpec::to_json() const {
  Json j = {{"kind", std::string(report::to_string(kind))}, {"columns", columns}};
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, HistogramData>) {
          j["edges"] = p.edges;
          j["counts"] = p.counts;
          j["unit"] = p.unit;
        } else if constexpr (std::is_same_v<T, BarData>) {
          Json bars = Json::array();
          for (const auto& [k, n] : p.bars) bars.push_back({{"value", k}, {"count", n}});
          j["bars"] = std::move(bars);
        } else {
          Json pts = Json::array();
          for (const auto& [lat, lon] : p.points) pts.push_back({lat, lon});
          j["points"] = std::move(pts);
          Json regions = Json::array();
          for (const auto& [k, n] : p.regions) regions.push_back({{"region", k}, {"count", n}});
          j["regions"] = std::move(regions);
        }
      },
      payload);
  return j;
}

Json charts_to_json(const std::vector<ChartSpec>& charts) {
  Json out = Json::array();
  for (const auto& c : charts) out.push_back(c.to_json());
  return out;
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::optional<double> coordinate(const Value& v) {
  if (is_null(v)) return std::nullopt;
  if (auto n = as_number(v)) return n;
  if (const auto* s = std::get_if<std::string>(&v)) return parse_float(*s);
  return std::nullopt;
}

ChartSpec map_points(const ColumnTable& table, const std::vector<std::string>& pair) {
  // Latitude is recognised by name; otherwise the listed order is (lat, lon).
  std::string lat = pair[0], lon = pair[1];
  const auto l0 = lower(pair[0]), l1 = lower(pair[1]);
  const bool first_is_lon = l0.find("lon") != std::string::npos ||
                            l0.find("lng") != std::string::npos ||
                            l1.find("lat") != std::string::npos;
  if (first_is_lon) std::swap(lat, lon);
  const auto& lat_col = table.column(lat);
  const auto& lon_col = table.column(lon);
  MapData data;
  std::set<std::pair<double, double>> seen;
  for (std::size_t r = 0; r < table.row_count() && data.points.size() < kMaxMapPoints; ++r) {
    const auto y = coordinate(lat_col[r]);
    const auto x = coordinate(lon_col[r]);
    if (!y || !x) continue;
    if (*y < -90 || *y > 90 || *x < -180 || *x > 180) continue;
    if (seen.insert({*y, *x}).second) data.points.emplace_back(*y, *x);
  }
  return {ChartKind::Map, {lat, lon}, std::move(data)};
}

std::vector<std::pair<std::string, std::size_t>> counts_by_value(const Column& col) {
  std::map<std::string, std::size_t> index;
  std::vector<std::pair<std::string, std::size_t>> out;
  for (const auto& v : col.cells()) {
    if (is_null(v)) continue;
    auto text = to_text(v);
    const auto [it, fresh] = index.try_emplace(text, out.size());
    if (fresh) out.emplace_back(std::move(text), 0);
    ++out[it->second].second;
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

ChartSpec bar_chart(const ColumnTable& table, const std::string& column) {
  auto counts = counts_by_value(table.column(column));
  BarData data;
  std::size_t other = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (i < kMaxBars) {
      data.bars.push_back(counts[i]);
    } else {
      other += counts[i].second;
    }
  }
  if (other > 0) data.bars.emplace_back(std::string(stats::kOtherBucket), other);
  return {ChartKind::Bar, {column}, std::move(data)};
}

ChartSpec histogram(const ColumnTable& table, const std::string& column) {
  const auto& col = table.column(column);
  std::vector<double> xs;
  for (const auto& v : col.cells()) {
    if (is_null(v)) continue;
    if (const auto* d = std::get_if<Date>(&v)) {
      xs.push_back(static_cast<double>(d->days));
    } else if (const auto* t = std::get_if<Timestamp>(&v)) {
      xs.push_back(static_cast<double>(t->micros));
    } else if (auto n = as_number(v)) {
      xs.push_back(*n);
    }
  }
  if (xs.empty()) throw NoChartApplicable(column + " has no values to chart");
  const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  double lo = *lo_it, hi = *hi_it;
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  std::size_t k = std::min<std::size_t>(
      kMaxHistogramBins, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(xs.size())))));
  HistogramData data;
  const auto make_edges = [&](std::size_t bins) {
    data.edges.assign(bins + 1, 0.0);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i <= bins; ++i) data.edges[i] = lo + width * static_cast<double>(i);
    data.edges.back() = hi;
  };
  make_edges(k);
  for (std::size_t i = 1; i < data.edges.size(); ++i) {
    if (!(data.edges[i] > data.edges[i - 1])) {
      k = 1;
      make_edges(1);
      break;
    }
  }
  data.counts.assign(k, 0);
  for (double x : xs) {
    auto pos = std::upper_bound(data.edges.begin(), data.edges.end(), x) - data.edges.begin() - 1;
    pos = std::clamp<std::ptrdiff_t>(pos, 0, static_cast<std::ptrdiff_t>(k) - 1);
    ++data.counts[static_cast<std::size_t>(pos)];
  }
  const auto ptype = col.schema().ptype;
  data.unit = ptype == PrimitiveType::Date        ? "date"
              : ptype == PrimitiveType::Timestamp ? "timestamp"
                                                  : "number";
  return {ChartKind::Histogram, {column}, std::move(data)};
}

}  // namespace

ChartSpec build_chart_data(const ColumnTable& table, const std::vector<std::string>& columns,
                           const semantics::HigherOrderAssignment& assignment) {
  using semantics::HigherOrderType;
  if (columns.empty()) throw NoChartApplicable("no columns given");
  for (const auto& c : columns) table.column(c);  // throws UnknownColumn
  const auto* entry = assignment.entry_of(columns.front());
  if (columns.size() == 2 || (entry && entry->type == HigherOrderType::LatLong)) {
    const auto pair = columns.size() == 2 ? columns : entry->columns;
    if (pair.size() != 2) throw NoChartApplicable("a map needs a latitude and a longitude column");
    return map_points(table, pair);
  }
  if (columns.size() > 2) throw NoChartApplicable("no chart spans more than two columns");
  const std::string& column = columns.front();
  const auto& col = table.column(column);
  if (col.non_null_count() == 0) throw NoChartApplicable(column + " has no values to chart");
  const auto ptype = col.schema().ptype;
  if (entry) {
    switch (entry->type) {
      case HigherOrderType::ZipCode:
      case HigherOrderType::FipsCode:
      case HigherOrderType::CountryName:
      case HigherOrderType::UsStateName: {
        MapData data;
        data.regions = counts_by_value(col);
        return {ChartKind::Map, {column}, std::move(data)};
      }
      case HigherOrderType::Category:
        return bar_chart(table, column);
      case HigherOrderType::FreeText:
        throw NoChartApplicable(column + " is free text");
      case HigherOrderType::LatLong:
        break;
    }
  }
  if (ptype == PrimitiveType::Boolean) return bar_chart(table, column);
  if (ptype == PrimitiveType::String) {
    // Without a classification, fall back to the statistical category test.
    if (!entry && stats::is_categorical(table, column)) return bar_chart(table, column);
    throw NoChartApplicable(column + " is free text");
  }
  return histogram(table, column);
}

std::vector<ChartSpec> build_all_charts(const ColumnTable& table,
                                        const semantics::HigherOrderAssignment& assignment) {
  std::vector<ChartSpec> out;
  std::set<std::string> done;
  for (const auto& name : table.column_names()) {
    if (done.count(name)) continue;
    std::vector<std::string> cols{name};
    const auto* entry = assignment.entry_of(name);
    if (entry && entry->columns.size() > 1) cols = entry->columns;
    for (const auto& c : cols) done.insert(c);
    try {
      out.push_back(build_chart_data(table, cols, assignment));
    } catch (const NoChartApplicable&) {
    }
  }
  return out;
}

namespace {

std::string svg_bars(const std::vector<std::size_t>& counts, const std::vector<std::string>& labels) {
  const std::size_t max = counts.empty() ? 1 : std::max<std::size_t>(
                                                   1, *std::max_element(counts.begin(), counts.end()));
  const double w = 320.0, h = 80.0;
  const double bw = counts.empty() ? w : w / static_cast<double>(counts.size());
  std::string out = "<svg class=\"chart\" width=\"320\" height=\"80\" viewBox=\"0 0 320 80\">";
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double bh = h * static_cast<double>(counts[i]) / static_cast<double>(max);
    out += "<rect x=\"" + fmt_number(bw * static_cast<double>(i)) + "\" y=\"" +
           fmt_number(h - bh) + "\" width=\"" + fmt_number(std::max(bw - 1, 0.5)) +
           "\" height=\"" + fmt_number(bh) + "\"><title>" + html_escape(labels[i]) + ": " +
           std::to_string(counts[i]) + "</title></rect>";
  }
  return out + "</svg>";
}

std::string chart_html(const ChartSpec& chart) {
  std::string out = "<div class=\"chart-box\"><div class=\"chart-kind\">" +
                    std::string(to_string(chart.kind)) + "</div>";
  if (const auto* h = std::get_if<HistogramData>(&chart.payload)) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i + 1 < h->edges.size(); ++i) {
      labels.push_back("[" + fmt_number(h->edges[i]) + ", " + fmt_number(h->edges[i + 1]) + ")");
    }
    out += svg_bars(h->counts, labels);
  } else if (const auto* b = std::get_if<BarData>(&chart.payload)) {
    std::vector<std::size_t> counts;
    std::vector<std::string> labels;
    for (const auto& [k, n] : b->bars) {
      labels.push_back(k);
      counts.push_back(n);
    }
    out += svg_bars(counts, labels);
  } else if (const auto* m = std::get_if<MapData>(&chart.payload)) {
    if (!m->points.empty()) {
      double y0 = 90, y1 = -90, x0 = 180, x1 = -180;
      for (const auto& [lat, lon] : m->points) {
        y0 = std::min(y0, lat);
        y1 = std::max(y1, lat);
        x0 = std::min(x0, lon);
        x1 = std::max(x1, lon);
      }
      const double sx = x1 > x0 ? 300.0 / (x1 - x0) : 1.0;
      const double sy = y1 > y0 ? 140.0 / (y1 - y0) : 1.0;
      out += "<svg class=\"chart\" width=\"320\" height=\"160\" viewBox=\"0 0 320 160\">";
      for (const auto& [lat, lon] : m->points) {
        out += "<circle r=\"1.5\" cx=\"" + fmt_number(10 + (lon - x0) * sx) + "\" cy=\"" +
               fmt_number(150 - (lat - y0) * sy) + "\"/>";
      }
      out += "</svg>";
    } else {
      std::vector<std::size_t> counts;
      std::vector<std::string> labels;
      for (const auto& [k, n] : m->regions) {
        labels.push_back(k);
        counts.push_back(n);
      }
      out += svg_bars(counts, labels);
    }
  }
  return out + "</div>";
}

std::string evidence_html(const Json& stat) {
  std::string out = "<dl class=\"evidence\">";
  for (const auto& [key, value] : stat.items()) {
    if (key == "step_status" || key == "status") continue;
    std::string shown;
    if (key == "MissingPercentage" && value.is_number()) {
      shown = percent(value.get<double>());
    } else if (key == "UniqueRatio" && value.is_number()) {
      shown = fmt_number(value.get<double>());
    } else if (value.is_string()) {
      shown = "<code>" + html_escape(value.get<std::string>()) + "</code>";
    } else if (value.is_primitive()) {
      shown = html_escape(value.dump());
    } else if (value.empty()) {
      shown = "none";
    } else {
      shown = "<code>" + html_escape(value.dump()) + "</code>";
    }
    out += "<dt>" + html_escape(key) + "</dt><dd>" + shown + "</dd>";
  }
  return out + "</dl>";
}

std::string tree_html(const Json& node) {
  std::string out = "<li><span class=\"node\">" + html_escape(text_of(node.value("name", Json("")))) +
                    "</span>";
  const int count = node.value("count", 0);
  out += count > 0 ? " <span class=\"badge\">" + std::to_string(count) + "</span>" : "";
  if (node.contains("children")) {
    out += "<ul>";
    for (const auto& c : node["children"]) out += tree_html(c);
    out += "</ul>";
  }
  return out + "</li>";
}

constexpr std::string_view kStyle = R"(
body { font-family: sans-serif; margin: 2em; color: #222; max-width: 70em; }
h1 { font-size: 1.5em; }
section.target { border-top: 1px solid #ccc; padding-top: 0.5em; margin-top: 1em; }
div.kind { margin: 0.5em 0 1em 1em; }
dl.evidence { display: grid; grid-template-columns: max-content auto; gap: 0.2em 1em; }
dl.evidence dt { font-weight: bold; }
dl.evidence dd { margin: 0; }
.alert-red { color: #c00; font-weight: bold; }
.ok-green { color: #080; font-weight: bold; }
.badge { background: #c00; color: #fff; border-radius: 0.8em; padding: 0 0.5em; font-size: 0.8em; }
.status { color: #777; font-style: italic; }
.thought, .reasoning { white-space: pre-wrap; }
svg.chart rect { fill: #4a7ab5; }
svg.chart circle { fill: #b5524a; }
.chart-kind { font-size: 0.8em; color: #777; }
)";

}  // namespace

std::string render_static_report(const ProfileDocument& doc, const std::vector<ChartSpec>& charts) {
  const std::string table = text_of(doc.meta.value("table", Json("table")));
  std::map<std::string, const ChartSpec*> chart_of;
  for (const auto& c : charts) {
    std::string key;
    for (std::size_t i = 0; i < c.columns.size(); ++i) key += (i ? "+" : "") + c.columns[i];
    chart_of[key] = &c;
    if (c.columns.size() == 2) chart_of[c.columns[1] + "+" + c.columns[0]] = &c;
  }

  std::string out = "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
  out += "<title>Profile of " + html_escape(table) + "</title>\n<style>" + std::string(kStyle) +
         "</style>\n</head>\n<body>\n";
  out += "<h1>Profile of " + html_escape(table) + "</h1>\n<p>" +
         html_escape(text_of(doc.meta.value("rows", Json(0)))) + " rows, " +
         html_escape(text_of(doc.meta.value("columns", Json(0)))) + " columns</p>\n";

  const Json& ctx = doc.semantic_context;
  out += "<h2>Semantic Context</h2>\n";
  if (ctx.contains("Table Summary") && ctx["Table Summary"].is_string()) {
    out += "<p class=\"summary\">" + summary_html(ctx["Table Summary"].get<std::string>()) +
           "</p>\n";
  } else {
    out += "<p class=\"status\">Table summary not available.</p>\n";
  }
  if (doc.meta.contains("alert_counts")) {
    out += "<h3>Hierarchy</h3>\n<ul class=\"tree\">" + tree_html(doc.meta["alert_counts"]) +
           "</ul>\n";
  }

  out += "<h2>Findings</h2>\n";
  const Json empty = Json::object();
  for (const auto& [target, kinds] : doc.statistical_profile.items()) {
    out += "<section class=\"target\" id=\"target-" + html_escape(target) + "\">\n<h3>" +
           html_escape(target) + "</h3>\n";
    if (ctx.contains("Column Summary") && ctx["Column Summary"].is_object() &&
        ctx["Column Summary"].contains(target) && ctx["Column Summary"][target].is_string()) {
      out += "<p class=\"column-summary\">" +
             html_escape(ctx["Column Summary"][target].get<std::string>()) + "</p>\n";
    }
    if (const auto it = chart_of.find(target); it != chart_of.end()) {
      out += chart_html(*it->second) + "\n";
    }
    const Json& sems = doc.semantic_profile.contains(target) ? doc.semantic_profile[target] : empty;
    const Json& reviews =
        doc.semantic_review.contains(target) ? doc.semantic_review[target] : empty;
    for (const auto& [kind, stat] : kinds.items()) {
      const std::string step = "review." + kind + ":" + target;
      out += "<div class=\"kind\">\n<h4>" + html_escape(kind) + "</h4>\n";
      if (stat.contains("status") && !stat.contains("step_status") && stat.size() <= 2) {
        out += "<p class=\"status\">statistics " + html_escape(text_of(stat["status"])) +
               "</p>\n";
      } else {
        out += evidence_html(stat) + "\n";
      }
      if (sems.contains(kind)) {
        const Json& sem = sems[kind];
        if (sem.contains("Thought")) {
          Json exp = sem;
          exp.erase("Thought");
          exp.erase("step_status");
          out += "<p class=\"expectation\">Expected: <code>" + html_escape(exp.dump()) +
                 "</code></p>\n<p class=\"thought\">" + html_escape(text_of(sem["Thought"])) +
                 "</p>\n";
        }
      }
      if (reviews.contains(kind)) {
        const Json& v = reviews[kind];
        if (v.contains("is_error")) {
          const bool is_error = v["is_error"].get<bool>();
          out += "<p class=\"verdict\">";
          out += is_error ? "<span class=\"alert-red\" data-step=\"" + html_escape(step) +
                                "\" title=\"error\">&#10071;</span> "
                          : "<span class=\"ok-green\" data-step=\"" + html_escape(step) +
                                "\" title=\"no error\">&#10004;</span> ";
          out += "<span class=\"verdict-status\">" + html_escape(text_of(v.value("status", Json("")))) +
                 "</span></p>\n<p class=\"reasoning\">" + html_escape(text_of(v["reasoning"])) +
                 "</p>\n";
        } else {
          out += "<p class=\"status\">review " + html_escape(text_of(v.value("status", Json("")))) +
                 "</p>\n";
        }
      }
      out += "</div>\n";
    }
    out += "</section>\n";
  }

  std::string data = charts_to_json(charts).dump();
  for (std::size_t pos = 0; (pos = data.find("</", pos)) != std::string::npos; pos += 3) {
    data.replace(pos, 2, "<\\/");
  }
  out += "<script type=\"application/json\" id=\"chart-data\">" + data + "</script>\n";
  out += "</body>\n</html>\n";
  return out;
}

}  // namespace cocoon::report
