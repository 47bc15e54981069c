#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "adaframe/agent.hpp"
#include "adaframe/data.hpp"

namespace adaframe {

enum class RewardKind {
  margin_increase,        // max{0, m_t - max_{t'<t} m_t'}
  prediction,             // p_t^gt
  prediction_transition,  // p_t^gt - p_{t-1}^gt
};

/// How the first step of margin_increase is rewarded.
enum class FirstStepReward {
  zero_floor,  // history max starts at 0: r_1 = max{0, m_1}
  none,        // r_1 = 0
};

enum class StartFrame { first, middle };

std::size_t start_frame_index(StartFrame start, std::size_t frame_count);

struct TrainConfig {
  std::size_t horizon = 5;  // K = T_e
  double gamma = 0.9;
  double sigma = 0.1;
  double lambda = 1.0;
  double learning_rate = 1e-3;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  std::size_t epochs = 100;
  std::size_t batch_size = 32;
  double lr_decay = 0.1;
  std::size_t lr_decay_every = 40;
  double grad_clip = 5.0;  // global-norm clip; <= 0 disables
  RewardKind reward = RewardKind::margin_increase;
  FirstStepReward first_step_reward = FirstStepReward::zero_floor;
  StartFrame start = StartFrame::first;
  double init_scale = 0.1;
  std::size_t hidden_dim = 32;
  std::uint64_t seed = 0;

  void validate() const;
  double learning_rate_at(std::size_t epoch) const;
};

/// s^gt - max_{c != gt} s^c
double margin(const Vector& scores, std::size_t gt);

/// Reward for the last entry of `margins` under the margin-increase rule.
double reward_margin_increase(std::span<const double> margins,
                              FirstStepReward first = FirstStepReward::zero_floor);
std::vector<double> margin_increase_rewards(std::span<const double> margins,
                                            FirstStepReward first = FirstStepReward::zero_floor);

double reward_prediction(const Vector& scores, std::size_t gt);
/// p_t^gt - p_{t-1}^gt with p_0^gt = 0 when there is no previous step.
double reward_prediction_transition(const Vector& scores, const Vector* previous, std::size_t gt);

std::vector<double> compute_rewards(std::span<const Vector> scores, std::size_t gt, RewardKind kind,
                                    FirstStepReward first = FirstStepReward::zero_floor);

/// R_t = sum_{i >= 0} gamma^i r_{t+i}
std::vector<double> discounted_returns(std::span<const double> rewards, double gamma);

inline constexpr double kProbabilityFloor = 1e-12;

/// -log s^gt, with s^gt floored at 1e-12.
double loss_classification(const Vector& scores, std::size_t gt);
/// 1/2 (V - R)^2
double loss_utility(double value, double target);

double gaussian_log_density(double x, double mean, double stddev);

struct TrajectoryStep {
  std::size_t frame = 0;
  Vector scores;
  double location_mean = 0.0;         // a_t
  std::optional<double> next_location;  // l_{t+1} ~ N(a_t, sigma^2); absent on the last step
  double margin = 0.0;
  double reward = 0.0;
  double ret = 0.0;      // R_t
  double utility = 0.0;  // V_t
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  std::uint32_t label = 0;
  std::size_t prediction = 0;

  double total_reward() const;
};

struct Rollout {
  Trajectory trajectory;
  std::vector<StepCache> caches;
};

/// K-step rollout. With an Rng the next location is sampled from the Gaussian
/// policy; without one the mean a_t is used.
Rollout rollout(const AgentParameters& params, const FeatureSequence& seq, const TrainConfig& config,
                Rng* rng);

struct PolicyTerm {
  double advantage = 0.0;  // R_t - V_t, held constant
  double score = 0.0;      // d log pi / d a_t = (l_{t+1} - a_t) / sigma^2
};

/// One term per step that selected a following frame (t = 1..K-1).
std::vector<PolicyTerm> policy_gradient_terms(const Trajectory& trajectory, double sigma);

struct LossBreakdown {
  double classification = 0.0;
  double utility = 0.0;
  double policy_surrogate = 0.0;  // -sum_t (R_t - V_t) log pi(l_{t+1} | a_t)

  double total(double lambda) const { return classification + lambda * (utility + policy_surrogate); }
};

LossBreakdown trajectory_losses(const Trajectory& trajectory, double sigma);

/// Per-term multipliers on top of lambda; used to isolate a single loss term.
struct ObjectiveTerms {
  double classification = 1.0;
  double utility = 1.0;
  double selection = 1.0;
};

/// Gradient of L_cls + lambda L_utl - lambda J_sel for one rollout, through
/// time. Returns R_t and the advantages are treated as constants.
AgentGradients backward(const AgentParameters& params, const Rollout& rollout, const TrainConfig& config,
                        const ObjectiveTerms& terms = {});

/// In-place momentum SGD on one flat block:
/// v <- momentum v + g;  w <- w - lr v - lr decay w
void momentum_update(std::span<double> weights, std::span<double> velocity,
                     std::span<const double> grads, double lr, double momentum, double decay);

class SgdMomentum {
 public:
  explicit SgdMomentum(const AgentDims& dims) : velocity_(AgentParameters::zeros(dims)) {}

  /// v <- momentum v + g;  w <- w - lr v - lr wd w  (no decay on biases)
  void apply(AgentParameters& params, const AgentGradients& grads, double lr, double momentum,
             double weight_decay);

  const AgentParameters& velocity() const { return velocity_; }

 private:
  AgentParameters velocity_;
};

/// Rescales to global norm `max_norm` if above it. Returns the norm before clipping.
double clip_global_norm(AgentGradients& grads, double max_norm);

struct EpochMetrics {
  std::size_t epoch = 0;
  double lr = 0.0;
  double loss_cls = 0.0;
  double loss_utl = 0.0;
  double j_sel = 0.0;        // mean total reward per rollout
  double mean_reward = 0.0;  // mean per-step reward
  double train_accuracy = 0.0;
  double window_hit_fraction = 0.0;  // NaN when windows are unknown
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One pass over `data` in shuffled minibatches. Throws TrainingError on a
/// non-finite loss before touching the parameters of that batch.
EpochMetrics train_epoch(AgentParameters& params, SgdMomentum& optimizer,
                         std::span<const FeatureSequence> data, const TrainConfig& config,
                         std::size_t epoch, Rng& rng);

using EpochCallback = std::function<void(const EpochMetrics&)>;

/// Initializes from config.seed and runs config.epochs epochs.
AgentParameters train(std::span<const FeatureSequence> data, std::uint32_t num_classes,
                      const TrainConfig& config, const EpochCallback& on_epoch = {});

std::string metrics_csv_header();
std::string metrics_csv_row(const EpochMetrics& m);

}  // namespace adaframe
