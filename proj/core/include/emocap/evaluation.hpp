#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "emocap/aggregation.hpp"
#include "emocap/caption.hpp"
#include "emocap/scene.hpp"

namespace emocap {

/// Rows are ground-truth labels. Columns are the same labels followed by
/// any out-of-list predictions, appended in alphabetical order.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::vector<std::string> labels);

  /// `truth` must be a row label. Out-of-list predictions get a column on
  /// first sight.
  void add(std::string_view truth, const NormalizedLabel& predicted, std::size_t n = 1);

  const std::vector<std::string>& row_labels() const noexcept { return rows_; }
  const std::vector<std::string>& column_labels() const noexcept { return columns_; }
  /// Number of leading columns that are canonical labels.
  std::size_t canonical_columns() const noexcept { return rows_.size(); }

  std::size_t at(std::size_t row, std::size_t column) const;
  std::size_t at(std::string_view truth, std::string_view predicted) const;
  std::size_t row_sum(std::size_t row) const;
  std::size_t column_sum(std::size_t column) const;
  std::size_t total() const;
  std::size_t trace() const;

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t row_index(std::string_view label) const;

  std::vector<std::string> rows_;
  std::vector<std::string> columns_;
  // counts_[row][column]
  std::vector<std::vector<std::size_t>> counts_;
};

struct LabelMetrics {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  std::size_t true_positives = 0;
  std::size_t predicted = 0;

  bool operator==(const LabelMetrics&) const = default;
};

struct EvaluationReport {
  CaptionVariant variant = CaptionVariant::full;
  std::vector<LabelMetrics> per_label;
  double accuracy = 0.0;
  std::size_t samples = 0;
  ConfusionMatrix matrix;

  const LabelMetrics& metrics(std::string_view label) const;
  std::vector<std::string> labels() const;
  bool operator==(const EvaluationReport&) const = default;
};

/// tp / predicted, 0 when nothing was predicted.
double precision_of(std::size_t true_positives, std::size_t predicted);
/// tp / support, 0 when the label has no samples.
double recall_of(std::size_t true_positives, std::size_t support);
/// Harmonic mean, 0 when precision + recall is 0.
double f1_score(double precision, double recall);

/// Half-up rounding used for display.
double round_half_up(double value, int decimals = 2);
/// The value in hundredths after half-up rounding (0.666 -> 67).
long long hundredths(double value);

/// Scores the predictions of one variant. Predictions for other variants
/// are ignored. Throws EvaluationError for a duplicate prediction, a
/// prediction without ground truth, a ground-truth sample without a
/// prediction, or a truth label outside `labels`.
EvaluationReport score(std::span<const PredictionRecord> predictions,
                       std::span<const GroundTruthSample> truth, CaptionVariant variant,
                       std::span<const std::string> labels);

struct ChanceBaselines {
  /// 1 / number of labels.
  double uniform = 0.0;
  /// Share of the most frequent ground-truth label.
  double majority = 0.0;
  std::string majority_label;
};

ChanceBaselines chance_baseline(std::span<const GroundTruthSample> truth,
                                std::span<const std::string> labels);

struct MetricDelta {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Signed changes from `from` to `to`.
struct ReportComparison {
  CaptionVariant from = CaptionVariant::full;
  CaptionVariant to = CaptionVariant::full;
  std::vector<MetricDelta> per_label;
  double accuracy = 0.0;

  const MetricDelta& delta(std::string_view label) const;
};

ReportComparison compare_reports(const EvaluationReport& from, const EvaluationReport& to);

void to_json(nlohmann::json& j, const LabelMetrics& v);
void to_json(nlohmann::json& j, const ConfusionMatrix& v);
void from_json(const nlohmann::json& j, ConfusionMatrix& v);
void to_json(nlohmann::json& j, const EvaluationReport& v);
void from_json(const nlohmann::json& j, EvaluationReport& v);
void to_json(nlohmann::json& j, const ReportComparison& v);
void to_json(nlohmann::json& j, const ChanceBaselines& v);

/// Full-precision JSON document.
std::string report_json(const EvaluationReport& report);
/// Two-decimal table: Emotion,Precision,Recall,F1 Score,Support, then a
/// Total Accuracy row.
std::string report_csv(const EvaluationReport& report);
/// Side-by-side table with one Precision/Recall/F1 triple per report.
std::string comparison_csv(std::span<const EvaluationReport> reports);
/// Fixed-width grid of the confusion matrix, truth in rows.
std::string confusion_matrix_text(const ConfusionMatrix& matrix);

}  // namespace emocap
