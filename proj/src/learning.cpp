#include "adaframe/learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace adaframe {

std::size_t start_frame_index(StartFrame start, std::size_t frame_count) {
  return start == StartFrame::middle ? frame_count / 2 : 0;
}

void TrainConfig::validate() const {
  if (horizon < 1) throw std::invalid_argument("TrainConfig: horizon must be >= 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("TrainConfig: gamma must be in (0, 1]");
  if (!(sigma > 0.0)) throw std::invalid_argument("TrainConfig: sigma must be positive");
  if (!(lambda >= 0.0)) throw std::invalid_argument("TrainConfig: lambda must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
  if (hidden_dim < 1) throw std::invalid_argument("TrainConfig: hidden_dim must be >= 1");
}

double TrainConfig::learning_rate_at(std::size_t epoch) const {
  if (lr_decay_every == 0) return learning_rate;
  return learning_rate * std::pow(lr_decay, static_cast<double>(epoch / lr_decay_every));
}

namespace {

void check_class(const Vector& scores, std::size_t gt) {
  if (gt >= static_cast<std::size_t>(scores.size())) {
    throw std::out_of_range("ground-truth class out of range");
  }
}

}  // namespace

double margin(const Vector& scores, std::size_t gt) {
  check_class(scores, gt);
  if (scores.size() < 2) throw std::invalid_argument("margin: need at least two classes");
  double best_other = -std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < scores.size(); ++c) {
    if (static_cast<std::size_t>(c) != gt) best_other = std::max(best_other, scores(c));
  }
  return scores(static_cast<Eigen::Index>(gt)) - best_other;
}

double reward_margin_increase(std::span<const double> margins, FirstStepReward first) {
  if (margins.empty()) throw std::invalid_argument("reward_margin_increase: empty margin history");
  if (margins.size() == 1) {
    return first == FirstStepReward::zero_floor ? std::max(0.0, margins[0]) : 0.0;
  }
  double history = first == FirstStepReward::zero_floor ? 0.0 : margins[0];
  for (std::size_t i = 0; i + 1 < margins.size(); ++i) history = std::max(history, margins[i]);
  return std::max(0.0, margins.back() - history);
}

std::vector<double> margin_increase_rewards(std::span<const double> margins, FirstStepReward first) {
  std::vector<double> rewards(margins.size());
  for (std::size_t t = 0; t < margins.size(); ++t) {
    rewards[t] = reward_margin_increase(margins.first(t + 1), first);
  }
  return rewards;
}

double reward_prediction(const Vector& scores, std::size_t gt) {
  check_class(scores, gt);
  return scores(static_cast<Eigen::Index>(gt));
}

double reward_prediction_transition(const Vector& scores, const Vector* previous, std::size_t gt) {
  check_class(scores, gt);
  const double before = previous != nullptr ? reward_prediction(*previous, gt) : 0.0;
  return scores(static_cast<Eigen::Index>(gt)) - before;
}

std::vector<double> compute_rewards(std::span<const Vector> scores, std::size_t gt, RewardKind kind,
                                    FirstStepReward first) {
  std::vector<double> rewards(scores.size());
  switch (kind) {
    case RewardKind::margin_increase: {
      std::vector<double> margins(scores.size());
      for (std::size_t t = 0; t < scores.size(); ++t) margins[t] = margin(scores[t], gt);
      return margin_increase_rewards(margins, first);
    }
    case RewardKind::prediction:
      for (std::size_t t = 0; t < scores.size(); ++t) rewards[t] = reward_prediction(scores[t], gt);
      break;
    case RewardKind::prediction_transition:
      for (std::size_t t = 0; t < scores.size(); ++t) {
        rewards[t] = reward_prediction_transition(scores[t], t > 0 ? &scores[t - 1] : nullptr, gt);
      }
      break;
  }
  return rewards;
}

std::vector<double> discounted_returns(std::span<const double> rewards, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("discounted_returns: gamma must be in (0, 1]");
  std::vector<double> returns(rewards.size());
  double running = 0.0;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    running = rewards[i] + gamma * running;
    returns[i] = running;
  }
  return returns;
}

double loss_classification(const Vector& scores, std::size_t gt) {
  check_class(scores, gt);
  return -std::log(std::max(scores(static_cast<Eigen::Index>(gt)), kProbabilityFloor));
}

double loss_utility(double value, double target) {
  const double diff = value - target;
  return 0.5 * diff * diff;
}

double gaussian_log_density(double x, double mean, double stddev) {
  const double z = (x - mean) / stddev;
  return -0.5 * z * z - std::log(stddev) - 0.5 * std::log(2.0 * std::numbers::pi);
}

double Trajectory::total_reward() const {
  return std::accumulate(steps.begin(), steps.end(), 0.0,
                         [](double acc, const TrajectoryStep& s) { return acc + s.reward; });
}

Rollout rollout(const AgentParameters& params, const FeatureSequence& seq, const TrainConfig& config,
                Rng* rng) {
  const std::size_t frames = seq.frame_count();
  const std::size_t horizon = config.horizon;
  Rollout out;
  out.trajectory.label = seq.label;
  out.trajectory.steps.resize(horizon);
  out.caches.resize(horizon);

  AgentState state = AgentState::initial(params.dims.hidden_dim);
  std::size_t frame = start_frame_index(config.start, frames);
  for (std::size_t t = 0; t < horizon; ++t) {
    TrajectoryStep& s = out.trajectory.steps[t];
    StepResult r = step(params, state, seq.frame(frame), seq.memory, &out.caches[t]);
    s.frame = frame;
    s.scores = std::move(r.output.scores);
    s.location_mean = r.output.location_mean;
    s.utility = r.output.utility;
    state = std::move(r.state);
    if (t + 1 < horizon) {
      const double next = rng != nullptr ? gaussian_sample(s.location_mean, config.sigma, *rng)
                                         : s.location_mean;
      s.next_location = next;
      frame = location_to_index(next, frames);
    }
  }

  std::vector<Vector> scores;
  scores.reserve(horizon);
  for (const auto& s : out.trajectory.steps) scores.push_back(s.scores);
  const auto rewards =
      compute_rewards(scores, seq.label, config.reward, config.first_step_reward);
  const auto returns = discounted_returns(rewards, config.gamma);
  for (std::size_t t = 0; t < horizon; ++t) {
    auto& s = out.trajectory.steps[t];
    s.margin = margin(s.scores, seq.label);
    s.reward = rewards[t];
    s.ret = returns[t];
  }
  Eigen::Index best = 0;
  out.trajectory.steps.back().scores.maxCoeff(&best);
  out.trajectory.prediction = static_cast<std::size_t>(best);
  return out;
}

std::vector<PolicyTerm> policy_gradient_terms(const Trajectory& trajectory, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("policy_gradient_terms: sigma must be positive");
  std::vector<PolicyTerm> terms;
  for (const auto& s : trajectory.steps) {
    if (!s.next_location) continue;
    terms.push_back({s.ret - s.utility, (*s.next_location - s.location_mean) / (sigma * sigma)});
  }
  return terms;
}

LossBreakdown trajectory_losses(const Trajectory& trajectory, double sigma) {
  LossBreakdown loss;
  loss.classification = loss_classification(trajectory.steps.back().scores, trajectory.label);
  for (const auto& s : trajectory.steps) {
    loss.utility += loss_utility(s.utility, s.ret);
    if (s.next_location) {
      loss.policy_surrogate -=
          (s.ret - s.utility) * gaussian_log_density(*s.next_location, s.location_mean, sigma);
    }
  }
  return loss;
}

AgentGradients backward(const AgentParameters& params, const Rollout& ro, const TrainConfig& config,
                        const ObjectiveTerms& terms) {
  const auto& steps = ro.trajectory.steps;
  const double sigma2 = config.sigma * config.sigma;
  AgentGradients grads = AgentParameters::zeros(params.dims);
  StateGrads carry{Vector::Zero(params.dims.hidden_dim), Vector::Zero(params.dims.hidden_dim)};

  for (std::size_t t = steps.size(); t-- > 0;) {
    const TrajectoryStep& s = steps[t];
    HeadGrads heads;
    heads.d_logits = Vector::Zero(params.dims.num_classes);
    if (t + 1 == steps.size()) {
      heads.d_logits = s.scores;
      heads.d_logits(ro.trajectory.label) -= 1.0;
      heads.d_logits *= terms.classification;
    }
    heads.d_utility = terms.utility * config.lambda * (s.utility - s.ret);
    if (s.next_location) {
      const double advantage = s.ret - s.utility;
      heads.d_location_mean =
          -terms.selection * config.lambda * advantage * (*s.next_location - s.location_mean) / sigma2;
    }
    carry = step_backward(ro.caches[t], params, heads, carry, grads);
  }
  return grads;
}

void momentum_update(std::span<double> weights, std::span<double> velocity,
                     std::span<const double> grads, double lr, double momentum, double decay) {
  if (velocity.size() != weights.size() || grads.size() != weights.size()) {
    throw ShapeError("momentum_update: block size mismatch");
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    velocity[i] = momentum * velocity[i] + grads[i];
    weights[i] -= lr * velocity[i] + lr * decay * weights[i];
  }
}

void SgdMomentum::apply(AgentParameters& params, const AgentGradients& grads, double lr,
                        double momentum, double weight_decay) {
  auto w = params.blocks();
  auto v = velocity_.blocks();
  const auto g = grads.blocks();
  for (std::size_t b = 0; b < kParamBlockCount; ++b) {
    momentum_update(w[b].values, v[b].values, g[b].values, lr, momentum,
                    w[b].is_bias ? 0.0 : weight_decay);
  }
}

double clip_global_norm(AgentGradients& grads, double max_norm) {
  const double norm = std::sqrt(grads.squared_norm());
  if (max_norm > 0.0 && norm > max_norm) grads *= max_norm / norm;
  return norm;
}

EpochMetrics train_epoch(AgentParameters& params, SgdMomentum& optimizer,
                         std::span<const FeatureSequence> data, const TrainConfig& config,
                         std::size_t epoch, Rng& rng) {
  if (data.empty()) throw std::invalid_argument("train_epoch: empty dataset");
  config.validate();

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng.engine());

  EpochMetrics m;
  m.epoch = epoch;
  m.lr = config.learning_rate_at(epoch);
  std::size_t correct = 0;
  std::size_t visits = 0;
  std::size_t hits = 0;
  double steps_seen = 0.0;

  for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
    const std::size_t end = std::min(order.size(), begin + config.batch_size);
    AgentGradients batch_grads = AgentParameters::zeros(params.dims);
    for (std::size_t k = begin; k < end; ++k) {
      const FeatureSequence& seq = data[order[k]];
      const Rollout ro = rollout(params, seq, config, &rng);
      const LossBreakdown loss = trajectory_losses(ro.trajectory, config.sigma);
      if (!std::isfinite(loss.total(config.lambda))) {
        std::ostringstream msg;
        msg << "non-finite loss at epoch " << epoch << ", video " << seq.id << " (cls "
            << loss.classification << ", utl " << loss.utility << ", sel " << loss.policy_surrogate
            << ")";
        throw TrainingError(msg.str());
      }
      batch_grads += backward(params, ro, config);

      m.loss_cls += loss.classification;
      m.loss_utl += loss.utility;
      m.j_sel += ro.trajectory.total_reward();
      steps_seen += static_cast<double>(ro.trajectory.steps.size());
      if (ro.trajectory.prediction == seq.label) ++correct;
      if (seq.window) {
        for (const auto& s : ro.trajectory.steps) {
          ++visits;
          if (seq.window->contains(s.frame)) ++hits;
        }
      }
    }
    batch_grads *= 1.0 / static_cast<double>(end - begin);
    clip_global_norm(batch_grads, config.grad_clip);
    optimizer.apply(params, batch_grads, m.lr, config.momentum, config.weight_decay);
  }

  const double n = static_cast<double>(data.size());
  m.mean_reward = m.j_sel / steps_seen;
  m.loss_cls /= n;
  m.loss_utl /= n;
  m.j_sel /= n;
  m.train_accuracy = static_cast<double>(correct) / n;
  m.window_hit_fraction = visits > 0 ? static_cast<double>(hits) / static_cast<double>(visits)
                                     : std::numeric_limits<double>::quiet_NaN();
  return m;
}

AgentParameters train(std::span<const FeatureSequence> data, std::uint32_t num_classes,
                      const TrainConfig& config, const EpochCallback& on_epoch) {
  if (data.empty()) throw std::invalid_argument("train: empty dataset");
  config.validate();
  AgentDims dims;
  dims.feature_dim = data.front().features.cols();
  dims.memory_dim = data.front().memory.dim();
  dims.hidden_dim = static_cast<Eigen::Index>(config.hidden_dim);
  dims.num_classes = num_classes;

  Rng init_rng = Rng(config.seed).split(1);
  Rng train_rng = Rng(config.seed).split(2);
  AgentParameters params = init_params(dims, config.init_scale, init_rng);
  SgdMomentum optimizer(dims);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const EpochMetrics m = train_epoch(params, optimizer, data, config, epoch, train_rng);
    if (on_epoch) on_epoch(m);
  }
  return params;
}

std::string metrics_csv_header() { return "epoch,lr,loss_cls,loss_utl,J_sel_estimate,mean_reward,train_accuracy"; }

std::string metrics_csv_row(const EpochMetrics& m) {
  std::ostringstream out;
  out.precision(10);
  out << m.epoch << ',' << m.lr << ',' << m.loss_cls << ',' << m.loss_utl << ',' << m.j_sel << ','
      << m.mean_reward << ',' << m.train_accuracy;
  return out.str();
}

}  // namespace adaframe
