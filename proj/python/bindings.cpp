#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cocoon/csv.hpp"
#include "cocoon/errors.hpp"
#include "cocoon/json.hpp"
#include "cocoon/llm.hpp"
#include "cocoon/pipeline.hpp"
#include "cocoon/profile.hpp"
#include "cocoon/query.hpp"
#include "cocoon/report.hpp"
#include "cocoon/stats.hpp"

namespace py = pybind11;
using namespace cocoon;

namespace {

// Documents cross the boundary as JSON text and come out as plain Python objects.
py::object to_py(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

Json from_py(const py::handle& obj) {
  return Json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

std::vector<std::string> as_columns(const py::handle& columns) {
  if (py::isinstance<py::str>(columns)) return {columns.cast<std::string>()};
  return columns.cast<std::vector<std::string>>();
}

stats::Target target_for(const ColumnTable& t, ErrorKind kind, const py::object& columns) {
  if (kind == ErrorKind::Duplication || columns.is_none()) return table_target(t);
  const auto cols = as_columns(columns);
  if (cols.size() == 1) return stats::column_target(t, cols.front());
  return stats::tuple_target(t, cols);
}

ErrorKind parse_kind(const std::string& name) {
  const auto k = error_kind_from_string(name);
  if (!k) throw ConfigError("unknown error kind: " + name);
  return *k;
}

StepId parse_step(const std::string& text) {
  const auto id = StepId::parse(text);
  if (!id) throw UnknownStep("malformed step id: " + text);
  return *id;
}

std::shared_ptr<llm::LlmClient> make_client(const py::object& mock_script,
                                            const std::optional<std::filesystem::path>& transcript,
                                            int max_retries) {
  llm::ProviderConfig cfg;
  cfg.max_retries = max_retries;
  std::shared_ptr<llm::Provider> provider;
  if (transcript) {
    cfg.kind = llm::ProviderKind::Replay;
    cfg.transcript_path = *transcript;
    provider = llm::make_provider(cfg);
  } else if (py::isinstance<py::dict>(mock_script)) {
    provider = std::make_shared<llm::MockProvider>(llm::MockScript::from_json(from_py(mock_script)));
  } else if (!mock_script.is_none()) {
    cfg.script_path = mock_script.cast<std::filesystem::path>();
    provider = llm::make_provider(cfg);
  } else {
    return nullptr;
  }
  return std::make_shared<llm::LlmClient>(provider, cfg);
}

Json run_report(const pipeline::RunReport& r) {
  Json executed = Json::array();
  for (const auto& id : r.executed) executed.push_back(id.str());
  Json failed = Json::object();
  for (const auto& [id, cause] : r.failed) failed[id.str()] = cause;
  return {{"executed", std::move(executed)}, {"failed", std::move(failed)}};
}

std::vector<std::string> step_names(const std::vector<StepId>& ids) {
  std::vector<std::string> out;
  for (const auto& id : ids) out.push_back(id.str());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Semantic table profiling core";
  m.attr("__version__") = std::string(report::kToolVersion);

  // Registered base first: translators are tried most recent first.
  auto& base = py::register_exception<Error>(m, "CocoonError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<UnknownColumn>(m, "UnknownColumn", base.ptr());
  py::register_exception<SyntaxError>(m, "QuerySyntaxError", base.ptr());
  py::register_exception<BindError>(m, "QueryBindError", base.ptr());
  py::register_exception<KindNotApplicable>(m, "KindNotApplicable", base.ptr());
  py::register_exception<EditRejected>(m, "EditRejected", base.ptr());
  py::register_exception<ConflictError>(m, "ConflictError", base.ptr());
  py::register_exception<UnknownStep>(m, "UnknownStep", base.ptr());
  py::register_exception<AlreadyFinalized>(m, "AlreadyFinalized", base.ptr());
  py::register_exception<NothingToExport>(m, "NothingToExport", base.ptr());

  py::class_<ColumnTable, std::shared_ptr<ColumnTable>>(m, "Table")
      .def_static(
          "from_csv",
          [](const std::string& text, const std::string& name) { return parse_csv(text, name); },
          py::arg("text"), py::arg("name") = "table")
      .def_static(
          "load",
          [](const std::filesystem::path& path, std::optional<std::string> name) {
            return load_csv(path, name.value_or(path.stem().string()));
          },
          py::arg("path"), py::arg("name") = py::none())
      .def_property_readonly("name", &ColumnTable::name)
      .def_property_readonly("row_count", &ColumnTable::row_count)
      .def_property_readonly("column_names", &ColumnTable::column_names)
      .def_property_readonly("column_types",
                             [](const ColumnTable& t) {
                               py::dict out;
                               for (std::size_t i = 0; i < t.column_count(); ++i) {
                                 out[py::str(t.column(i).name())] =
                                     std::string(to_string(t.column(i).type()));
                               }
                               return out;
                             })
      .def("column",
           [](const ColumnTable& t, const std::string& name) {
             Json cells = Json::array();
             for (const auto& v : t.column(name).cells()) cells.push_back(to_json(v));
             return to_py(cells);
           })
      .def("to_csv", [](const ColumnTable& t) { return write_csv(t); })
      .def(
          "query",
          [](const ColumnTable& t, const std::string& text) {
            const auto r = query::run_query(text, t);
            Json rows = Json::array();
            for (const auto& row : r.rows) rows.push_back(to_json(row));
            return to_py({{"columns", r.columns}, {"row_indices", r.row_indices}, {"rows", rows}});
          },
          py::arg("text"))
      .def(
          "stat",
          [](const ColumnTable& t, const std::string& kind, const py::object& columns) {
            const auto k = parse_kind(kind);
            return to_py(stat_to_json(compute_stat(k, t, target_for(t, k, columns)), t));
          },
          py::arg("kind"), py::arg("columns") = py::none(),
          "Statistical measurement for one error kind over a column, a tuple or the table.")
      .def("__len__", &ColumnTable::row_count)
      .def("__repr__", [](const ColumnTable& t) {
        return "<Table " + t.name() + " " + std::to_string(t.row_count()) + "x" +
               std::to_string(t.column_count()) + ">";
      });

  m.def(
      "induce_regex",
      [](const std::vector<std::string>& values, double coverage) {
        const auto s = stats::induce_regex_pattern(values, coverage);
        py::dict out;
        out["pattern"] = s.regex_pattern ? py::cast(*s.regex_pattern) : py::none();
        out["coverage"] = s.coverage;
        out["outlier_count"] = s.outlier_count;
        out["sample_outlier"] = s.sample_outlier;
        out["sample_inlier"] = s.sample_inlier;
        return out;
      },
      py::arg("values"), py::arg("coverage") = stats::kDefaultCoverage);
  m.def("quantiles", &stats::quantiles_of, py::arg("values"),
        "[min, Q1, median, Q3, max] with linear interpolation.");
  m.def(
      "normalize_query",
      [](const std::string& text) { return query::render_query(query::parse_query(text)); },
      py::arg("text"), "Canonical text of a query.");

  py::class_<pipeline::Session, std::shared_ptr<pipeline::Session>>(m, "Session")
      .def(py::init([](const ColumnTable& table, const py::object& mock_script,
                       std::optional<std::filesystem::path> transcript,
                       std::optional<std::string> docs, int max_retries) {
             return std::make_shared<pipeline::Session>(
                 table, make_client(mock_script, transcript, max_retries), std::move(docs));
           }),
           py::arg("table"), py::arg("mock_script") = py::none(),
           py::arg("transcript") = py::none(), py::arg("docs") = py::none(),
           py::arg("max_retries") = 3,
           "mock_script: dict of step id to responses, or a path to one. transcript: replay "
           "a recorded transcript. With neither, only statistical steps can run.")
      .def(
          "run",
          [](pipeline::Session& s, std::optional<std::string> until) {
            pipeline::RunReport r;
            {
              py::gil_scoped_release release;
              r = s.run(until);
            }
            return to_py(run_report(r));
          },
          py::arg("until") = py::none())
      .def_property_readonly("revision", &pipeline::Session::revision)
      .def_property_readonly("table", [](const pipeline::Session& s) { return s.table(); })
      .def("statuses",
           [](const pipeline::Session& s) {
             py::dict out;
             for (const auto& [id, rec] : s.snapshot().steps) {
               out[py::str(id.str())] = std::string(pipeline::to_string(rec.status));
             }
             return out;
           })
      .def("export_json", [](const pipeline::Session& s) { return report::export_json(s); })
      .def("export",
           [](const pipeline::Session& s) {
             return to_py(report::export_document(s.snapshot()).to_json());
           })
      .def("alert_counts",
           [](const pipeline::Session& s) { return to_py(pipeline::alert_counts(s).to_json()); })
      .def("charts",
           [](const pipeline::Session& s) {
             const auto snap = s.snapshot();
             return to_py(report::charts_to_json(
                 report::build_all_charts(*snap.table, snap.assignment())));
           })
      .def("report_html",
           [](const pipeline::Session& s) {
             const auto snap = s.snapshot();
             return report::render_static_report(
                 report::export_document(snap),
                 report::build_all_charts(*snap.table, snap.assignment()));
           })
      .def(
          "edit_table_summary",
          [](pipeline::Session& s, const std::string& text) {
            return step_names(s.edit_context(context::TableSummaryEdit{text}));
          },
          py::arg("text"), "Returns the steps made stale.")
      .def(
          "edit_column_summary",
          [](pipeline::Session& s, const std::string& column, const std::string& text) {
            return step_names(s.edit_context(context::ColumnSummaryEdit{column, text}));
          },
          py::arg("column"), py::arg("text"))
      .def(
          "edit_hierarchy",
          [](pipeline::Session& s, const py::object& tree) {
            auto parsed = context::parse_hierarchy(from_py(tree));
            if (!parsed.value) throw EditRejected(parsed.diagnostic);
            return step_names(s.edit_context(context::HierarchyEdit{std::move(*parsed.value)}));
          },
          py::arg("tree"))
      .def(
          "override_verdict",
          [](pipeline::Session& s, const std::string& step, bool is_error,
             const std::string& note) {
            const auto v = s.override_verdict(parse_step(step), is_error, note);
            py::dict out;
            out["is_error"] = v.is_error;
            out["machine_is_error"] = v.machine_is_error;
            out["status"] = std::string(semantics::to_string(v.status));
            out["note"] = v.note;
            return out;
          },
          py::arg("step"), py::arg("is_error"), py::arg("note") = "");
}
