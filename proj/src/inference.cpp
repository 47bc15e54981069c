#include "adaframe/inference.hpp"

namespace adaframe {

StopConfig StopConfig::with_default_patience(double mu, std::size_t horizon) {
  StopConfig c;
  c.mu = mu;
  c.horizon = horizon;
  c.patience = mu < 0.7 ? 2 : horizon / 2 + 1;
  return c;
}

void StopConfig::validate() const {
  if (!(mu >= 0.0)) throw std::invalid_argument("StopConfig: mu must be >= 0");
  if (patience < 1) throw std::invalid_argument("StopConfig: patience must be >= 1");
  if (horizon < 1) throw std::invalid_argument("StopConfig: horizon must be >= 1");
}

bool StopRule::observe(double utility) {
  // Compare against the max of earlier steps, then fold in the current value.
  const bool violated = running_max_ - utility > config_.mu;
  if (violated) {
    ++violations_;
  } else if (config_.mode == PatienceMode::consecutive) {
    violations_ = 0;
  }
  running_max_ = std::max(running_max_, utility);
  return violations_ >= config_.patience;
}

namespace {

template <typename ShouldStop>
InferenceResult deterministic_rollout(const AgentParameters& params, const FeatureSequence& seq,
                                      std::size_t horizon, StartFrame start, ShouldStop&& should_stop) {
  if (seq.frame_count() == 0) throw std::invalid_argument("inference: empty sequence");
  InferenceResult out;
  AgentState state = AgentState::initial(params.dims.hidden_dim);
  std::size_t frame = start_frame_index(start, seq.frame_count());
  for (std::size_t t = 1; t <= horizon; ++t) {
    StepResult r = step(params, state, seq.frame(frame), seq.memory);
    out.visited.push_back(frame);
    out.utilities.push_back(r.output.utility);
    out.scores = std::move(r.output.scores);
    state = std::move(r.state);
    if (t == horizon || should_stop(out)) break;
    frame = location_to_index(r.output.location_mean, seq.frame_count());
  }
  out.frames_used = out.visited.size();
  out.stop_step = out.frames_used;
  Eigen::Index best = 0;
  out.scores.maxCoeff(&best);
  out.prediction = static_cast<std::size_t>(best);
  out.cost_gflops = cost_of(out, CostModel{}, CostMethod::adaframe);
  return out;
}

}  // namespace

InferenceResult run_adaptive(const AgentParameters& params, const FeatureSequence& seq,
                             const StopConfig& stop) {
  stop.validate();
  StopRule rule(stop);
  return deterministic_rollout(params, seq, stop.horizon, stop.start,
                               [&rule](const InferenceResult& r) { return rule.observe(r.utilities.back()); });
}

InferenceResult run_fixed(const AgentParameters& params, const FeatureSequence& seq, std::size_t horizon,
                          StartFrame start) {
  StopConfig stop;
  stop.horizon = horizon;
  stop.start = start;
  return run_adaptive(params, seq, stop);
}

std::vector<bool> stop_by_entropy(std::span<const Vector> scores, double threshold) {
  std::vector<bool> decisions;
  decisions.reserve(scores.size());
  for (const auto& s : scores) decisions.push_back(entropy(s) < threshold);
  return decisions;
}

InferenceResult run_entropy_stop(const AgentParameters& params, const FeatureSequence& seq,
                                 double threshold, std::size_t horizon, StartFrame start) {
  return deterministic_rollout(params, seq, horizon, start, [threshold](const InferenceResult& r) {
    return entropy(r.scores) < threshold;
  });
}

CostModel CostModel::with_exact_recurrent_cost(const AgentDims& dims) {
  CostModel m;
  m.gflops_recurrent_per_step = 2.0 * static_cast<double>(parameter_count(dims)) * 1e-9;
  return m;
}

double cost_of(std::size_t frames_used, const CostModel& model, CostMethod method) {
  const double n = static_cast<double>(frames_used);
  if (method == CostMethod::baseline) return n * model.gflops_full_frame;
  const double per_frame = model.gflops_full_frame + model.gflops_recurrent_per_step;
  if (model.overhead == OverheadMode::per_frame) {
    return n * (per_frame + model.gflops_adaframe_overhead);
  }
  return frames_used == 0 ? 0.0 : n * per_frame + model.gflops_adaframe_overhead;
}

double cost_of(const InferenceResult& result, const CostModel& model, CostMethod method) {
  return cost_of(result.frames_used, model, method);
}

}  // namespace adaframe
