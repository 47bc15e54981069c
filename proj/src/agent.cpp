#include "adaframe/agent.hpp"

#include <algorithm>

namespace adaframe {

void AgentDims::validate() const {
  if (feature_dim < 1 || memory_dim < 1 || hidden_dim < 1) {
    throw std::invalid_argument("AgentDims: dimensions must be positive");
  }
  if (num_classes < 2) throw std::invalid_argument("AgentDims: need at least two classes");
  if (memory_dim % 2 != 0) throw std::invalid_argument("AgentDims: memory_dim must be even");
}

std::size_t parameter_count(const AgentDims& d) {
  const auto h = static_cast<std::size_t>(d.hidden_dim);
  const auto in = static_cast<std::size_t>(d.lstm_input_dim());
  const auto m = static_cast<std::size_t>(d.memory_dim);
  const auto c = static_cast<std::size_t>(d.num_classes);
  return 4 * h * in + 4 * h + m * h + c * h + c + h + h;
}

AgentParameters AgentParameters::zeros(const AgentDims& d) {
  d.validate();
  AgentParameters p;
  p.dims = d;
  p.lstm_weights = Matrix::Zero(4 * d.hidden_dim, d.lstm_input_dim());
  p.lstm_bias = Vector::Zero(4 * d.hidden_dim);
  p.query_proj = Matrix::Zero(d.memory_dim, d.hidden_dim);
  p.class_weights = Matrix::Zero(d.num_classes, d.hidden_dim);
  p.class_bias = Vector::Zero(d.num_classes);
  p.location_weights = Vector::Zero(d.hidden_dim);
  p.utility_weights = Vector::Zero(d.hidden_dim);
  return p;
}

namespace {

template <typename Block, typename Self>
std::array<Block, kParamBlockCount> collect_blocks(Self& p) {
  auto span_of = [](auto& m) { return std::span(m.data(), static_cast<std::size_t>(m.size())); };
  return {{
      {"lstm_weights", span_of(p.lstm_weights), false},
      {"lstm_bias", span_of(p.lstm_bias), true},
      {"query_proj", span_of(p.query_proj), false},
      {"class_weights", span_of(p.class_weights), false},
      {"class_bias", span_of(p.class_bias), true},
      {"location_weights", span_of(p.location_weights), false},
      {"utility_weights", span_of(p.utility_weights), false},
  }};
}

}  // namespace

std::array<ParamBlock, kParamBlockCount> AgentParameters::blocks() {
  return collect_blocks<ParamBlock>(*this);
}

std::array<ConstParamBlock, kParamBlockCount> AgentParameters::blocks() const {
  return collect_blocks<ConstParamBlock>(*this);
}

std::size_t AgentParameters::size() const {
  std::size_t n = 0;
  for (const auto& b : blocks()) n += b.values.size();
  return n;
}

Vector AgentParameters::flatten() const {
  Vector flat(static_cast<Eigen::Index>(size()));
  Eigen::Index offset = 0;
  for (const auto& b : blocks()) {
    for (double v : b.values) flat(offset++) = v;
  }
  return flat;
}

void AgentParameters::assign_flat(const Vector& flat) {
  require_size("AgentParameters::assign_flat", flat.size(), static_cast<Eigen::Index>(size()));
  Eigen::Index offset = 0;
  for (auto& b : blocks()) {
    for (double& v : b.values) v = flat(offset++);
  }
}

void AgentParameters::check_shapes() const {
  dims.validate();
  const auto h = dims.hidden_dim;
  require_shape("lstm_weights", lstm_weights, 4 * h, dims.lstm_input_dim());
  require_size("lstm_bias", lstm_bias.size(), 4 * h);
  require_shape("query_proj", query_proj, dims.memory_dim, h);
  require_shape("class_weights", class_weights, dims.num_classes, h);
  require_size("class_bias", class_bias.size(), dims.num_classes);
  require_size("location_weights", location_weights.size(), h);
  require_size("utility_weights", utility_weights.size(), h);
}

AgentParameters& AgentParameters::operator+=(const AgentParameters& other) {
  if (!(dims == other.dims)) throw ShapeError("AgentParameters: dimension mismatch");
  lstm_weights += other.lstm_weights;
  lstm_bias += other.lstm_bias;
  query_proj += other.query_proj;
  class_weights += other.class_weights;
  class_bias += other.class_bias;
  location_weights += other.location_weights;
  utility_weights += other.utility_weights;
  return *this;
}

AgentParameters& AgentParameters::operator*=(double scale) {
  for (auto& b : blocks()) {
    for (double& v : b.values) v *= scale;
  }
  return *this;
}

double AgentParameters::squared_norm() const {
  double s = 0.0;
  for (const auto& b : blocks()) {
    for (double v : b.values) s += v * v;
  }
  return s;
}

bool operator==(const AgentParameters& a, const AgentParameters& b) {
  if (!(a.dims == b.dims)) return false;
  const auto ab = a.blocks();
  const auto bb = b.blocks();
  for (std::size_t i = 0; i < kParamBlockCount; ++i) {
    if (!std::equal(ab[i].values.begin(), ab[i].values.end(), bb[i].values.begin(),
                    bb[i].values.end())) {
      return false;
    }
  }
  return true;
}

AgentParameters init_params(const AgentDims& dims, double scale, Rng& rng) {
  AgentParameters p = AgentParameters::zeros(dims);
  for (auto& b : p.blocks()) {
    if (b.is_bias) continue;
    for (double& v : b.values) v = scale == 0.0 ? 0.0 : rng.uniform(-scale, scale);
  }
  p.lstm_bias.segment(dims.hidden_dim, dims.hidden_dim).setOnes();
  return p;
}

AgentState AgentState::initial(Eigen::Index hidden_dim) {
  return {Vector::Zero(hidden_dim), Vector::Zero(hidden_dim), 0};
}

StepResult step(const AgentParameters& params, const AgentState& state, const Vector& frame,
                const GlobalMemory& memory, StepCache* cache, ContextValues values) {
  const AgentDims& d = params.dims;
  require_size("step: frame", frame.size(), d.feature_dim);
  require_size("step: h", state.h.size(), d.hidden_dim);
  require_size("step: c", state.c.size(), d.hidden_dim);
  require_size("step: memory dim", memory.dim(), d.memory_dim);

  StepResult result;
  result.attention = attend(memory, state.h, params.query_proj, values,
                            cache != nullptr ? &cache->attention : nullptr);

  Vector input(d.lstm_input_dim());
  input << frame, result.attention.context, state.h;
  LstmCache lstm = lstm_forward(params.lstm_weights, params.lstm_bias, input, state.c);

  result.output.scores = softmax(params.class_weights * lstm.h + params.class_bias);
  result.output.location_mean = sigmoid(params.location_weights.dot(lstm.h));
  result.output.utility = params.utility_weights.dot(lstm.h);
  result.state = {lstm.h, lstm.c, state.t + 1};

  if (cache != nullptr) {
    cache->lstm = std::move(lstm);
    cache->output = result.output;
  }
  return result;
}

StateGrads step_backward(const StepCache& cache, const AgentParameters& params,
                         const HeadGrads& heads, const StateGrads& from_future,
                         AgentGradients& grads) {
  if (!cache.filled() || !cache.attention.filled()) {
    throw std::logic_error("step_backward: missing forward cache");
  }
  const AgentDims& d = params.dims;
  require_size("step_backward: d_logits", heads.d_logits.size(), d.num_classes);
  const Vector& h = cache.lstm.h;
  const double a = cache.output.location_mean;
  const double d_location_pre = heads.d_location_mean * a * (1.0 - a);

  grads.class_weights.noalias() += heads.d_logits * h.transpose();
  grads.class_bias += heads.d_logits;
  grads.location_weights += d_location_pre * h;
  grads.utility_weights += heads.d_utility * h;

  Vector d_h = from_future.d_h;
  d_h.noalias() += params.class_weights.transpose() * heads.d_logits;
  d_h += d_location_pre * params.location_weights;
  d_h += heads.d_utility * params.utility_weights;

  const LstmInputGrads lstm_grads = lstm_backward(cache.lstm, params.lstm_weights, d_h,
                                                  from_future.d_c, grads.lstm_weights,
                                                  grads.lstm_bias);

  const Vector d_context = lstm_grads.d_input.segment(d.feature_dim, d.memory_dim);
  const AttentionGrads att = attend_backward(
      cache.attention, params.query_proj, Vector::Zero(cache.attention.result.weights.size()),
      d_context);
  grads.query_proj += att.d_query_proj;

  StateGrads out;
  out.d_h = lstm_grads.d_input.tail(d.hidden_dim) + att.d_h_prev;
  out.d_c = lstm_grads.d_c_prev;
  return out;
}

std::size_t location_to_index(double location, std::size_t frame_count) {
  if (frame_count == 0) throw std::invalid_argument("location_to_index: no frames");
  const double clamped = std::isnan(location) ? 0.0 : std::clamp(location, 0.0, 1.0);
  const auto index = static_cast<std::size_t>(std::floor(clamped * static_cast<double>(frame_count)));
  return std::min(index, frame_count - 1);
}

}  // namespace adaframe
