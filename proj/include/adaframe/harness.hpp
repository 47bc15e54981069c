#pragma once

#include <string>
#include <vector>

#include "adaframe/baselines.hpp"
#include "adaframe/inference.hpp"

namespace adaframe {

struct Split {
  std::uint64_t seed = 0;
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

/// Seeded shuffle, first `train_fraction` of the permutation for training.
Split split_dataset(std::size_t n, std::uint64_t seed, double train_fraction = 0.8);

std::vector<FeatureSequence> select(const Dataset& dataset, std::span<const std::size_t> indices);

struct SweepRow {
  std::string method;
  std::string setting;
  double mean_frames = 0.0;
  double accuracy = 0.0;
  double mean_gflops = 0.0;
};

struct SweepReport {
  std::vector<std::string> metadata;  // emitted as leading "# " lines
  std::vector<SweepRow> rows;
};

/// Summary of one evaluation pass plus the per-video results behind it.
struct Evaluation {
  SweepRow row;
  std::vector<InferenceResult> results;
  double window_hit_fraction = 0.0;  // NaN when windows are unknown
};

/// Adaptive inference over `data` at one stop configuration.
Evaluation evaluate_adaptive(const AgentParameters& params, std::span<const FeatureSequence> data,
                             const StopConfig& stop, const CostModel& cost = {});

Evaluation evaluate_entropy_stop(const AgentParameters& params, std::span<const FeatureSequence> data,
                                 double threshold, std::size_t horizon, const CostModel& cost = {});

/// One adaptive row per mu. A patience of 0 selects the default rule.
SweepReport sweep(const AgentParameters& params, std::size_t horizon, std::span<const FeatureSequence> data,
                  std::span<const double> mu_grid, std::size_t patience = 0,
                  PatienceMode mode = PatienceMode::cumulative);

/// Fails when the checkpoint cannot consume the dataset.
void check_compatible(const AgentParameters& params, const Dataset& dataset);

std::string format_setting(double value);
std::string report_csv(const SweepReport& report);
std::string inference_log_csv(std::span<const FeatureSequence> data, std::span<const InferenceResult> results);

}  // namespace adaframe
