#include <algorithm>
#include <cstdio>
#include <sstream>

#include "emocap/error.hpp"
#include "emocap/evaluation.hpp"
#include "json_util.hpp"

namespace emocap {

using nlohmann::json;

namespace {

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", round_half_up(v, 2));
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void to_json(json& j, const LabelMetrics& v) {
  j = json{{"label", v.label},
           {"precision", v.precision},
           {"recall", v.recall},
           {"f1", v.f1},
           {"support", v.support},
           {"true_positives", v.true_positives},
           {"predicted", v.predicted}};
}

void to_json(json& j, const ConfusionMatrix& v) {
  json counts = json::array();
  for (std::size_t r = 0; r < v.row_labels().size(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < v.column_labels().size(); ++c) row.push_back(v.at(r, c));
    counts.push_back(std::move(row));
  }
  j = json{{"rows", v.row_labels()}, {"columns", v.column_labels()}, {"counts", std::move(counts)}};
}

void from_json(const json& j, ConfusionMatrix& v) {
  const auto rows = detail::require_array(j, "rows", "matrix").get<std::vector<std::string>>();
  const auto columns = detail::require_array(j, "columns", "matrix").get<std::vector<std::string>>();
  const json& counts = detail::require_array(j, "counts", "matrix");
  if (columns.size() < rows.size() || !std::equal(rows.begin(), rows.end(), columns.begin())) {
    throw SchemaError("matrix.columns", "must start with the row labels");
  }
  if (counts.size() != rows.size()) throw SchemaError("matrix.counts", "row count mismatch");
  ConfusionMatrix m(rows);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!counts[r].is_array() || counts[r].size() != columns.size()) {
      throw SchemaError(detail::index_path("matrix.counts", r), "column count mismatch");
    }
    for (std::size_t c = 0; c < columns.size(); ++c) {
      // Zero counts still register out-of-list columns.
      const auto n = counts[r][c].get<std::size_t>();
      m.add(rows[r],
            c < rows.size() ? NormalizedLabel::canonical(columns[c])
                            : NormalizedLabel::out_of_list(columns[c]),
            n);
    }
  }
  v = std::move(m);
}

void to_json(json& j, const EvaluationReport& v) {
  j = json{{"variant", to_string(v.variant)},
           {"samples", v.samples},
           {"accuracy", v.accuracy},
           {"per_label", v.per_label},
           {"matrix", v.matrix}};
}

void from_json(const json& j, EvaluationReport& v) {
  EvaluationReport r;
  r.variant = parse_variant(detail::require_string(j, "variant", ""));
  r.samples = detail::require(j, "samples", "").get<std::size_t>();
  r.accuracy = detail::require(j, "accuracy", "").get<double>();
  const json& per = detail::require_array(j, "per_label", "");
  for (std::size_t i = 0; i < per.size(); ++i) {
    const std::string path = detail::index_path("per_label", i);
    LabelMetrics m;
    m.label = detail::require_string(per[i], "label", path);
    m.precision = detail::require(per[i], "precision", path).get<double>();
    m.recall = detail::require(per[i], "recall", path).get<double>();
    m.f1 = detail::require(per[i], "f1", path).get<double>();
    m.support = detail::require(per[i], "support", path).get<std::size_t>();
    m.true_positives = detail::require(per[i], "true_positives", path).get<std::size_t>();
    m.predicted = detail::require(per[i], "predicted", path).get<std::size_t>();
    r.per_label.push_back(std::move(m));
  }
  r.matrix = detail::require(j, "matrix", "").get<ConfusionMatrix>();
  v = std::move(r);
}

void to_json(json& j, const ReportComparison& v) {
  json rows = json::array();
  for (const auto& d : v.per_label) {
    rows.push_back({{"label", d.label}, {"precision", d.precision}, {"recall", d.recall}, {"f1", d.f1}});
  }
  j = json{{"from", to_string(v.from)}, {"to", to_string(v.to)}, {"per_label", std::move(rows)},
           {"accuracy", v.accuracy}};
}

void to_json(json& j, const ChanceBaselines& v) {
  j = json{{"uniform", v.uniform}, {"majority", v.majority}, {"majority_label", v.majority_label}};
}

std::string report_json(const EvaluationReport& report) { return json(report).dump(2) + "\n"; }

std::string report_csv(const EvaluationReport& report) {
  std::ostringstream out;
  out << "Emotion,Precision,Recall,F1 Score,Support\n";
  for (const auto& m : report.per_label) {
    out << csv_field(m.label) << ',' << fixed2(m.precision) << ',' << fixed2(m.recall) << ','
        << fixed2(m.f1) << ',' << m.support << '\n';
  }
  out << "Total Accuracy," << fixed2(report.accuracy) << ",,," << report.samples << '\n';
  return out.str();
}

std::string comparison_csv(std::span<const EvaluationReport> reports) {
  if (reports.empty()) return {};
  const auto labels = reports.front().labels();
  for (const auto& r : reports) {
    if (r.labels() != labels) throw EvaluationError("reports use different label sets");
  }
  std::ostringstream out;
  out << "Emotion";
  for (const auto& r : reports) {
    const std::string name(display_name(r.variant));
    out << ',' << name << " Precision," << name << " Recall," << name << " F1 Score";
  }
  out << '\n';
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out << csv_field(labels[i]);
    for (const auto& r : reports) {
      const auto& m = r.per_label[i];
      out << ',' << fixed2(m.precision) << ',' << fixed2(m.recall) << ',' << fixed2(m.f1);
    }
    out << '\n';
  }
  out << "Total Accuracy";
  for (const auto& r : reports) out << ',' << fixed2(r.accuracy) << ",,";
  out << '\n';
  return out.str();
}

std::string confusion_matrix_text(const ConfusionMatrix& matrix) {
  const auto& rows = matrix.row_labels();
  const auto& cols = matrix.column_labels();
  std::size_t label_width = std::string_view("truth \\ predicted").size();
  for (const auto& r : rows) label_width = std::max(label_width, r.size());
  std::vector<std::size_t> widths;
  for (const auto& c : cols) widths.push_back(std::max<std::size_t>(c.size(), 3));

  std::ostringstream out;
  auto pad = [&](const std::string& s, std::size_t w, bool right) {
    const std::string fill(w > s.size() ? w - s.size() : 0, ' ');
    out << (right ? fill + s : s + fill);
  };
  pad("truth \\ predicted", label_width, false);
  for (std::size_t c = 0; c < cols.size(); ++c) {
    out << " | ";
    pad(cols[c], widths[c], false);
  }
  out << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    pad(rows[r], label_width, false);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      out << " | ";
      pad(std::to_string(matrix.at(r, c)), widths[c], true);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace emocap
