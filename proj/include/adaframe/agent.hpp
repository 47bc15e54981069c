#pragma once

#include <array>
#include <span>
#include <string_view>

#include "adaframe/lstm.hpp"
#include "adaframe/memory.hpp"

namespace adaframe {

struct AgentDims {
  Eigen::Index feature_dim = 0;  // D_full
  Eigen::Index memory_dim = 0;   // D_mem
  Eigen::Index hidden_dim = 0;   // H
  Eigen::Index num_classes = 0;  // C

  Eigen::Index lstm_input_dim() const { return feature_dim + memory_dim + hidden_dim; }
  void validate() const;

  friend bool operator==(const AgentDims&, const AgentDims&) = default;
};

/// Closed-form number of trainable scalars for the given dimensions.
std::size_t parameter_count(const AgentDims& dims);

struct ParamBlock {
  std::string_view name;
  std::span<double> values;
  bool is_bias;
};

struct ConstParamBlock {
  std::string_view name;
  std::span<const double> values;
  bool is_bias;
};

inline constexpr std::size_t kParamBlockCount = 7;

/// All trainable weights of the agent. Also used as the gradient container.
struct AgentParameters {
  AgentDims dims;
  Matrix lstm_weights;    // 4H x (D_full + D_mem + H)
  Vector lstm_bias;       // 4H
  Matrix query_proj;      // W_h: D_mem x H
  Matrix class_weights;   // W_p: C x H
  Vector class_bias;      // C
  Vector location_weights;  // w_s: H
  Vector utility_weights;   // w_u: H

  static AgentParameters zeros(const AgentDims& dims);

  /// Blocks in checkpoint order.
  std::array<ParamBlock, kParamBlockCount> blocks();
  std::array<ConstParamBlock, kParamBlockCount> blocks() const;

  std::size_t size() const;
  Vector flatten() const;
  void assign_flat(const Vector& flat);
  void check_shapes() const;

  AgentParameters& operator+=(const AgentParameters& other);
  AgentParameters& operator*=(double scale);
  double squared_norm() const;

  friend bool operator==(const AgentParameters& a, const AgentParameters& b);
};

using AgentGradients = AgentParameters;

/// Weights uniform in [-scale, scale]; forget-gate bias 1, other biases 0.
AgentParameters init_params(const AgentDims& dims, double scale, Rng& rng);

struct AgentState {
  Vector h;
  Vector c;
  int t = 0;

  static AgentState initial(Eigen::Index hidden_dim);
};

struct StepOutput {
  Vector scores;               // s_t
  double location_mean = 0.0;  // a_t
  double utility = 0.0;        // V_t
};

struct StepCache {
  AttentionCache attention;
  LstmCache lstm;
  StepOutput output;

  bool filled() const { return lstm.filled(); }
};

struct StepResult {
  AgentState state;
  StepOutput output;
  AttentionResult attention;
};

/// One memory-augmented LSTM step followed by the prediction, selection and
/// utility heads.
StepResult step(const AgentParameters& params, const AgentState& state, const Vector& frame,
                const GlobalMemory& memory, StepCache* cache = nullptr,
                ContextValues values = ContextValues::encoded);

/// Loss gradients arriving at the heads of one step.
struct HeadGrads {
  Vector d_logits;              // w.r.t. W_p h + b_p
  double d_location_mean = 0.0;  // w.r.t. a_t
  double d_utility = 0.0;        // w.r.t. V_t
};

struct StateGrads {
  Vector d_h;
  Vector d_c;
};

/// Backward through the heads, the LSTM cell and the attention read.
/// `from_future` carries dL/dh_t and dL/dc_t from later steps; the result is
/// dL/dh_{t-1}, dL/dc_{t-1}. Parameter gradients accumulate into `grads`.
StateGrads step_backward(const StepCache& cache, const AgentParameters& params,
                         const HeadGrads& heads, const StateGrads& from_future,
                         AgentGradients& grads);

/// Clamp to [0, 1], scale by T, floor, clamp to T-1.
std::size_t location_to_index(double location, std::size_t frame_count);

}  // namespace adaframe
