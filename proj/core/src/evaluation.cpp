#include "emocap/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "emocap/error.hpp"

namespace emocap {

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labels)
    : rows_(std::move(labels)), columns_(rows_), counts_(rows_.size(), std::vector<std::size_t>(rows_.size(), 0)) {
  std::set<std::string> unique(rows_.begin(), rows_.end());
  if (unique.size() != rows_.size()) throw EvaluationError("duplicate label in confusion matrix");
}

std::size_t ConfusionMatrix::row_index(std::string_view label) const {
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i] == label) return i;
  }
  throw EvaluationError("'" + std::string(label) + "' is not a ground-truth label");
}

void ConfusionMatrix::add(std::string_view truth, const NormalizedLabel& predicted, std::size_t n) {
  const std::size_t row = row_index(truth);
  std::size_t column = 0;
  if (predicted.in_list()) {
    column = row_index(predicted.text());
  } else {
    auto begin = columns_.begin() + static_cast<std::ptrdiff_t>(rows_.size());
    auto it = std::lower_bound(begin, columns_.end(), predicted.text());
    column = static_cast<std::size_t>(it - columns_.begin());
    if (it == columns_.end() || *it != predicted.text()) {
      columns_.insert(it, predicted.text());
      for (auto& r : counts_) r.insert(r.begin() + static_cast<std::ptrdiff_t>(column), 0);
    }
  }
  counts_[row][column] += n;
}

std::size_t ConfusionMatrix::at(std::size_t row, std::size_t column) const {
  return counts_.at(row).at(column);
}

std::size_t ConfusionMatrix::at(std::string_view truth, std::string_view predicted) const {
  const std::size_t row = row_index(truth);
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (columns_[c] == predicted) return counts_[row][c];
  }
  return 0;
}

std::size_t ConfusionMatrix::row_sum(std::size_t row) const {
  std::size_t n = 0;
  for (auto v : counts_.at(row)) n += v;
  return n;
}

std::size_t ConfusionMatrix::column_sum(std::size_t column) const {
  std::size_t n = 0;
  for (const auto& r : counts_) n += r.at(column);
  return n;
}

std::size_t ConfusionMatrix::total() const {
  std::size_t n = 0;
  for (std::size_t r = 0; r < rows_.size(); ++r) n += row_sum(r);
  return n;
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t n = 0;
  for (std::size_t r = 0; r < rows_.size(); ++r) n += counts_[r][r];
  return n;
}

const LabelMetrics& EvaluationReport::metrics(std::string_view label) const {
  for (const auto& m : per_label) {
    if (m.label == label) return m;
  }
  throw EvaluationError("report has no label '" + std::string(label) + "'");
}

std::vector<std::string> EvaluationReport::labels() const {
  std::vector<std::string> out;
  for (const auto& m : per_label) out.push_back(m.label);
  return out;
}

double precision_of(std::size_t true_positives, std::size_t predicted) {
  return predicted == 0 ? 0.0 : static_cast<double>(true_positives) / static_cast<double>(predicted);
}

double recall_of(std::size_t true_positives, std::size_t support) {
  return support == 0 ? 0.0 : static_cast<double>(true_positives) / static_cast<double>(support);
}

double f1_score(double precision, double recall) {
  const double sum = precision + recall;
  return sum == 0.0 ? 0.0 : 2.0 * precision * recall / sum;
}

namespace {
// Absorbs binary representation error so that e.g. 0.285 rounds to 0.29.
constexpr double kRoundingSlack = 1e-9;
}

double round_half_up(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const double magnitude = std::floor(std::fabs(value) * scale + 0.5 + kRoundingSlack) / scale;
  return std::copysign(magnitude, value);
}

long long hundredths(double value) {
  const auto magnitude = static_cast<long long>(std::floor(std::fabs(value) * 100.0 + 0.5 + kRoundingSlack));
  return value < 0 ? -magnitude : magnitude;
}

EvaluationReport score(std::span<const PredictionRecord> predictions,
                       std::span<const GroundTruthSample> truth, CaptionVariant variant,
                       std::span<const std::string> labels) {
  using Key = std::pair<std::string, std::string>;
  std::map<Key, const GroundTruthSample*> truth_of;
  for (const auto& t : truth) {
    if (!truth_of.emplace(Key{t.scene_id, t.person_key}, &t).second) {
      throw EvaluationError("duplicate ground truth for " + t.scene_id + "/" + t.person_key);
    }
  }

  EvaluationReport report;
  report.variant = variant;
  report.matrix = ConfusionMatrix(std::vector<std::string>(labels.begin(), labels.end()));

  std::set<Key> scored;
  for (const auto& p : predictions) {
    if (p.variant != variant) continue;
    Key key{p.scene_id, p.person_key};
    if (!scored.insert(key).second) {
      throw EvaluationError("duplicate prediction for " + p.scene_id + "/" + p.person_key);
    }
    auto t = truth_of.find(key);
    if (t == truth_of.end()) {
      throw EvaluationError("no ground truth for prediction " + p.scene_id + "/" + p.person_key);
    }
    report.matrix.add(t->second->label, p.final_label);
  }
  if (scored.size() != truth_of.size()) {
    for (const auto& [key, sample] : truth_of) {
      if (!scored.contains(key)) {
        throw EvaluationError("no " + std::string(to_string(variant)) + " prediction for " +
                              key.first + "/" + key.second);
      }
    }
  }

  const ConfusionMatrix& m = report.matrix;
  for (std::size_t i = 0; i < m.row_labels().size(); ++i) {
    LabelMetrics lm;
    lm.label = m.row_labels()[i];
    lm.true_positives = m.at(i, i);
    lm.support = m.row_sum(i);
    lm.predicted = m.column_sum(i);
    lm.precision = precision_of(lm.true_positives, lm.predicted);
    lm.recall = recall_of(lm.true_positives, lm.support);
    lm.f1 = f1_score(lm.precision, lm.recall);
    report.per_label.push_back(std::move(lm));
  }
  report.samples = m.total();
  report.accuracy =
      report.samples == 0 ? 0.0 : static_cast<double>(m.trace()) / static_cast<double>(report.samples);
  return report;
}

ChanceBaselines chance_baseline(std::span<const GroundTruthSample> truth,
                                std::span<const std::string> labels) {
  if (truth.empty()) throw EvaluationError("chance baseline needs at least one sample");
  if (labels.empty()) throw EvaluationError("chance baseline needs at least one label");
  std::map<std::string, std::size_t> counts;
  for (const auto& t : truth) ++counts[t.label];
  ChanceBaselines out;
  out.uniform = 1.0 / static_cast<double>(labels.size());
  std::size_t best = 0;
  // Label order decides among equally frequent labels.
  for (const auto& label : labels) {
    auto it = counts.find(label);
    if (it != counts.end() && it->second > best) {
      best = it->second;
      out.majority_label = label;
    }
  }
  out.majority = static_cast<double>(best) / static_cast<double>(truth.size());
  return out;
}

const MetricDelta& ReportComparison::delta(std::string_view label) const {
  for (const auto& d : per_label) {
    if (d.label == label) return d;
  }
  throw EvaluationError("comparison has no label '" + std::string(label) + "'");
}

ReportComparison compare_reports(const EvaluationReport& from, const EvaluationReport& to) {
  if (from.labels() != to.labels()) throw EvaluationError("reports use different label sets");
  ReportComparison out;
  out.from = from.variant;
  out.to = to.variant;
  for (std::size_t i = 0; i < from.per_label.size(); ++i) {
    const auto& a = from.per_label[i];
    const auto& b = to.per_label[i];
    out.per_label.push_back({a.label, b.precision - a.precision, b.recall - a.recall, b.f1 - a.f1});
  }
  out.accuracy = to.accuracy - from.accuracy;
  return out;
}

}  // namespace emocap
