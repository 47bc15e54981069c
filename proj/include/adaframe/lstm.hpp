#pragma once

#include "adaframe/numerics.hpp"

namespace adaframe {

// Standard single-layer LSTM cell without peepholes. Weight rows are stacked
// in gate order [input, forget, output, candidate], each block H rows, over
// the full concatenated input (which includes h_{t-1} as its trailing part).

struct LstmCache {
  Vector input;
  Vector c_prev;
  Vector input_gate;
  Vector forget_gate;
  Vector output_gate;
  Vector candidate;
  Vector tanh_c;
  Vector c;
  Vector h;

  bool filled() const { return input.size() > 0; }
};

LstmCache lstm_forward(const Matrix& weights, const Vector& bias, const Vector& input,
                       const Vector& c_prev);

struct LstmInputGrads {
  Vector d_input;
  Vector d_c_prev;
};

/// Accumulates into d_weights / d_bias.
LstmInputGrads lstm_backward(const LstmCache& cache, const Matrix& weights, const Vector& d_h,
                             const Vector& d_c, Matrix& d_weights, Vector& d_bias);

}  // namespace adaframe
