#pragma once

#include "adaframe/numerics.hpp"

namespace adaframe {

/// Bank of T_d downsampled feature vectors (one per row). Read-only once built;
/// positional encoding is added at query time, never stored.
class GlobalMemory {
 public:
  GlobalMemory() = default;
  explicit GlobalMemory(Matrix entries);

  Eigen::Index slots() const { return entries_.rows(); }
  Eigen::Index dim() const { return entries_.cols(); }
  bool empty() const { return entries_.rows() == 0; }
  const Matrix& entries() const { return entries_; }

  /// Entries with the sinusoidal position of each slot added.
  Matrix encoded() const;

  friend bool operator==(const GlobalMemory&, const GlobalMemory&) = default;

 private:
  Matrix entries_;
};

/// Sinusoidal position code: PE(pos, 2i) = sin(pos / 10000^{2i/D}),
/// PE(pos, 2i+1) = cos(pos / 10000^{2i/D}). D must be even.
Vector positional_encoding(Eigen::Index position, Eigen::Index dim);

/// v + PE(position). Requires 0 <= position < total.
Vector positional_encode(const Vector& v, Eigen::Index position, Eigen::Index total);

/// Which vectors the attention weights average over. The scores always use the
/// encoded entries.
enum class ContextValues { encoded, raw };

struct AttentionResult {
  Vector weights;  // beta_t, length T_d
  Vector context;  // u_t, length D_mem
};

struct AttentionCache {
  Vector h_prev;
  Vector query;
  Matrix keys;
  Matrix values;
  AttentionResult result;

  bool filled() const { return keys.rows() > 0; }
};

struct AttentionGrads {
  Vector d_h_prev;
  Matrix d_query_proj;
};

/// Soft attention of the projected hidden state over the memory:
/// z_j = (W_h h)^T PE(m_j), beta = softmax(z), u = sum_j beta_j value_j.
AttentionResult attend(const GlobalMemory& memory, const Vector& h_prev, const Matrix& query_proj,
                       ContextValues values = ContextValues::encoded,
                       AttentionCache* cache = nullptr);

AttentionGrads attend_backward(const AttentionCache& cache, const Matrix& query_proj,
                               const Vector& d_weights, const Vector& d_context);

}  // namespace adaframe
