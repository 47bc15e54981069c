#pragma once

#include <limits>
#include <vector>

#include "adaframe/agent.hpp"
#include "adaframe/data.hpp"
#include "adaframe/learning.hpp"

namespace adaframe {

enum class PatienceMode {
  cumulative,   // every violation counts
  consecutive,  // counter resets on a step without violation
};

struct StopConfig {
  double mu = std::numeric_limits<double>::infinity();  // utility-drop margin
  std::size_t patience = 2;
  std::size_t horizon = 5;  // K
  PatienceMode mode = PatienceMode::cumulative;
  StartFrame start = StartFrame::first;

  /// p = 2 when mu < 0.7, otherwise floor(K/2) + 1.
  static StopConfig with_default_patience(double mu, std::size_t horizon);
  void validate() const;
};

/// Running-max utility stop rule, usable on its own for replaying utility traces.
class StopRule {
 public:
  explicit StopRule(const StopConfig& config) : config_(config) {}

  /// Feeds V_t; returns true when inference should stop at this step.
  bool observe(double utility);
  std::size_t violations() const { return violations_; }

 private:
  StopConfig config_;
  double running_max_ = -std::numeric_limits<double>::infinity();
  std::size_t violations_ = 0;
};

struct InferenceResult {
  std::size_t prediction = 0;
  Vector scores;
  std::size_t frames_used = 0;
  std::size_t stop_step = 0;
  std::vector<std::size_t> visited;
  std::vector<double> utilities;
  double cost_gflops = 0.0;
};

/// Deterministic rollout (l = a_t) that stops per the running-max rule or at K.
InferenceResult run_adaptive(const AgentParameters& params, const FeatureSequence& seq,
                             const StopConfig& stop);

/// Deterministic K-step rollout; identical to run_adaptive with mu = infinity.
InferenceResult run_fixed(const AgentParameters& params, const FeatureSequence& seq, std::size_t horizon,
                          StartFrame start = StartFrame::first);

/// Per-step decision H(s_t) < threshold.
std::vector<bool> stop_by_entropy(std::span<const Vector> scores, double threshold);

/// Deterministic rollout that stops at the first step whose prediction entropy
/// drops below `threshold`, or at K.
InferenceResult run_entropy_stop(const AgentParameters& params, const FeatureSequence& seq,
                                 double threshold, std::size_t horizon,
                                 StartFrame start = StartFrame::first);

enum class CostMethod { adaframe, baseline };
enum class OverheadMode { per_frame, one_time };

struct CostModel {
  double gflops_full_frame = 7.82;
  double gflops_adaframe_overhead = 1.32;
  double gflops_recurrent_per_step = 0.0;  // LSTM + heads, negligible by default
  OverheadMode overhead = OverheadMode::per_frame;

  /// Counts 2 x parameter_count FLOPs per recurrent step.
  static CostModel with_exact_recurrent_cost(const AgentDims& dims);
};

double cost_of(std::size_t frames_used, const CostModel& model, CostMethod method);
double cost_of(const InferenceResult& result, const CostModel& model, CostMethod method);

}  // namespace adaframe
