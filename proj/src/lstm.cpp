#include "adaframe/lstm.hpp"

namespace adaframe {

LstmCache lstm_forward(const Matrix& weights, const Vector& bias, const Vector& input,
                       const Vector& c_prev) {
  const Eigen::Index hidden = c_prev.size();
  require_shape("lstm: weights", weights, 4 * hidden, input.size());
  require_size("lstm: bias", bias.size(), 4 * hidden);

  const Vector pre = weights * input + bias;
  LstmCache cache;
  cache.input = input;
  cache.c_prev = c_prev;
  cache.input_gate = sigmoid(pre.segment(0, hidden));
  cache.forget_gate = sigmoid(pre.segment(hidden, hidden));
  cache.output_gate = sigmoid(pre.segment(2 * hidden, hidden));
  cache.candidate = pre.segment(3 * hidden, hidden).array().tanh().matrix();
  cache.c = cache.forget_gate.cwiseProduct(c_prev) + cache.input_gate.cwiseProduct(cache.candidate);
  cache.tanh_c = cache.c.array().tanh().matrix();
  cache.h = cache.output_gate.cwiseProduct(cache.tanh_c);
  return cache;
}

LstmInputGrads lstm_backward(const LstmCache& cache, const Matrix& weights, const Vector& d_h,
                             const Vector& d_c, Matrix& d_weights, Vector& d_bias) {
  if (!cache.filled()) throw std::logic_error("lstm_backward: missing forward cache");
  const Eigen::Index hidden = cache.c.size();
  require_size("lstm_backward: d_h", d_h.size(), hidden);
  require_size("lstm_backward: d_c", d_c.size(), hidden);

  const auto o = cache.output_gate.array();
  const auto i = cache.input_gate.array();
  const auto f = cache.forget_gate.array();
  const auto g = cache.candidate.array();
  const auto tc = cache.tanh_c.array();

  const Eigen::ArrayXd dc_total = d_c.array() + d_h.array() * o * (1.0 - tc.square());

  Vector d_pre(4 * hidden);
  d_pre.segment(0, hidden) = (dc_total * g * i * (1.0 - i)).matrix();
  d_pre.segment(hidden, hidden) = (dc_total * cache.c_prev.array() * f * (1.0 - f)).matrix();
  d_pre.segment(2 * hidden, hidden) = (d_h.array() * tc * o * (1.0 - o)).matrix();
  d_pre.segment(3 * hidden, hidden) = (dc_total * i * (1.0 - g.square())).matrix();

  d_weights.noalias() += d_pre * cache.input.transpose();
  d_bias += d_pre;

  LstmInputGrads grads;
  grads.d_input = weights.transpose() * d_pre;
  grads.d_c_prev = (dc_total * f).matrix();
  return grads;
}

}  // namespace adaframe
