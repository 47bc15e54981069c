#pragma once

// Independent reference computations used by the unit and acceptance suites.
// Nothing here calls the library's backward passes, reward or stop-rule code.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "adaframe/learning.hpp"

namespace adaframe::oracle {

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-scale, scale);
  return m;
}

/// Brute-force margin-increase reward: r_t = max{0, m_t - max(0, m_1..m_{t-1})}.
inline std::vector<double> margin_rewards(const std::vector<double>& m) {
  std::vector<double> r(m.size());
  for (std::size_t t = 0; t < m.size(); ++t) {
    double history = 0.0;
    for (std::size_t s = 0; s < t; ++s) history = std::max(history, m[s]);
    r[t] = std::max(0.0, m[t] - history);
  }
  return r;
}

/// Step-by-step replay of the running-max utility stop rule with cumulative
/// patience. Returns the 1-based stop step.
inline std::size_t simulate_stop(const std::vector<double>& utilities, double mu, std::size_t patience) {
  std::size_t count = 0;
  for (std::size_t t = 0; t < utilities.size(); ++t) {
    if (t > 0) {
      const double best = *std::max_element(utilities.begin(), utilities.begin() + static_cast<std::ptrdiff_t>(t));
      if (best - utilities[t] > mu) ++count;
    }
    if (count >= patience) return t + 1;
  }
  return utilities.size();
}

struct ObjectiveParts {
  double classification = 0.0;
  double utility = 0.0;
  double selection = 0.0;  // -sum_t A_t log pi(l_{t+1} | a_t)
};

/// Replays a recorded trajectory (frames, location samples, returns and
/// advantages frozen) under `params` and evaluates each objective term.
inline ObjectiveParts frozen_objective(const AgentParameters& params, const FeatureSequence& seq,
                                       const Trajectory& recorded, double sigma) {
  ObjectiveParts out;
  AgentState state = AgentState::initial(params.dims.hidden_dim);
  for (std::size_t t = 0; t < recorded.steps.size(); ++t) {
    const TrajectoryStep& rec = recorded.steps[t];
    const StepResult r = step(params, state, seq.frame(rec.frame), seq.memory);
    state = r.state;
    if (t + 1 == recorded.steps.size()) out.classification = -std::log(r.output.scores(recorded.label));
    const double diff = r.output.utility - rec.ret;
    out.utility += 0.5 * diff * diff;
    if (rec.next_location) {
      const double advantage = rec.ret - rec.utility;
      const double z = (*rec.next_location - r.output.location_mean) / sigma;
      const double log_pi = -0.5 * z * z - std::log(sigma * std::sqrt(2.0 * std::numbers::pi));
      out.selection -= advantage * log_pi;
    }
  }
  return out;
}

struct GradientCase {
  AgentParameters params;
  FeatureSequence seq;
  TrainConfig config;
};

/// Random small configuration: D_full <= 8, D_mem <= 6, H <= 8, C <= 5, K <= 6, T_d <= 4.
inline GradientCase random_gradient_case(Rng& rng) {
  GradientCase c;
  const AgentDims dims{1 + static_cast<Eigen::Index>(rng.index(8)), 2 * (1 + static_cast<Eigen::Index>(rng.index(3))),
                       1 + static_cast<Eigen::Index>(rng.index(8)), 2 + static_cast<Eigen::Index>(rng.index(4))};
  c.params = init_params(dims, 0.6, rng);
  for (auto& b : c.params.blocks()) {
    if (b.is_bias) {
      for (double& v : b.values) v = rng.uniform(-0.5, 0.5);
    }
  }
  const auto frames = static_cast<Eigen::Index>(5 + rng.index(20));
  const auto slots = 1 + static_cast<Eigen::Index>(rng.index(4));
  c.seq.label = static_cast<std::uint32_t>(rng.index(static_cast<std::size_t>(dims.num_classes)));
  c.seq.features = random_matrix(frames, dims.feature_dim, rng, 2.0);
  c.seq.memory = GlobalMemory(random_matrix(slots, dims.memory_dim, rng));
  c.config.horizon = 1 + rng.index(6);
  c.config.sigma = 0.1;
  c.config.gamma = 0.9;
  c.config.lambda = 1.0;
  return c;
}

}  // namespace adaframe::oracle
