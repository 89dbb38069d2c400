#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "emocap/aggregation.hpp"
#include "emocap/backend.hpp"
#include "emocap/caption.hpp"
#include "emocap/evaluation.hpp"
#include "emocap/store.hpp"

namespace emocap {

/// One caption per agreed ground-truth sample, in ground-truth order.
std::vector<Caption> render_samples(const ProjectStore& store, CaptionVariant variant);

/// One caption per person of every stored scene.
std::vector<Caption> render_all(const ProjectStore& store, CaptionVariant variant);

struct ExperimentOptions {
  CaptionVariant variant = CaptionVariant::full;
  /// Defaults to the manifest's repeat count.
  std::optional<int> repeats;
  /// Defaults to the manifest's backend. Only model and temperature matter
  /// for hashing; the transport is whatever backend is passed in.
  std::optional<BackendConfig> backend;
  /// Samples processed concurrently. Output order does not depend on it.
  std::size_t parallelism = 1;
  /// Write captions, predictions and the report into the store.
  bool persist = true;
};

struct ExperimentResult {
  std::vector<Caption> captions;
  std::vector<PredictionRecord> predictions;
  EvaluationReport report;
  std::size_t completions = 0;
};

/// Render, query and vote for every agreed sample without scoring.
ExperimentResult predict_samples(const ProjectStore& store, const ExperimentOptions& options,
                                 CompletionBackend& backend);

/// Render -> complete_n -> aggregate -> score, then persist. Any stage error
/// aborts the run; completions already written to the cache stay there.
ExperimentResult run_experiment(ProjectStore& store, const ExperimentOptions& options,
                                CompletionBackend& backend);

/// A mock that answers every sample's prompt with its ground-truth label.
MockBackend truth_echo_backend(const ProjectStore& store, CaptionVariant variant,
                               const std::optional<BackendConfig>& backend = std::nullopt);

}  // namespace emocap
