#include "adaframe/memory.hpp"

namespace adaframe {

GlobalMemory::GlobalMemory(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() > 0 && entries_.cols() % 2 != 0) {
    throw std::invalid_argument("GlobalMemory: entry dimension must be even");
  }
}

Matrix GlobalMemory::encoded() const {
  Matrix out = entries_;
  for (Eigen::Index j = 0; j < out.rows(); ++j) {
    out.row(j) += positional_encoding(j, out.cols()).transpose();
  }
  return out;
}

Vector positional_encoding(Eigen::Index position, Eigen::Index dim) {
  if (dim % 2 != 0) throw std::invalid_argument("positional_encoding: odd dimension");
  Vector pe(dim);
  for (Eigen::Index i = 0; i < dim / 2; ++i) {
    const double angle =
        static_cast<double>(position) / std::pow(10000.0, static_cast<double>(2 * i) / dim);
    pe(2 * i) = std::sin(angle);
    pe(2 * i + 1) = std::cos(angle);
  }
  return pe;
}

Vector positional_encode(const Vector& v, Eigen::Index position, Eigen::Index total) {
  if (position < 0 || position >= total) {
    throw std::invalid_argument("positional_encode: position out of range");
  }
  return v + positional_encoding(position, v.size());
}

AttentionResult attend(const GlobalMemory& memory, const Vector& h_prev, const Matrix& query_proj,
                       ContextValues values, AttentionCache* cache) {
  if (memory.empty()) throw std::invalid_argument("attend: empty memory");
  require_shape("attend: query projection", query_proj, memory.dim(), h_prev.size());

  Matrix keys = memory.encoded();
  Vector query = query_proj * h_prev;
  AttentionResult result;
  result.weights = softmax(keys * query);
  const Matrix& value_rows = values == ContextValues::encoded ? keys : memory.entries();
  result.context = value_rows.transpose() * result.weights;

  if (cache != nullptr) {
    cache->h_prev = h_prev;
    cache->query = std::move(query);
    cache->values = value_rows;
    cache->keys = std::move(keys);
    cache->result = result;
  }
  return result;
}

AttentionGrads attend_backward(const AttentionCache& cache, const Matrix& query_proj,
                               const Vector& d_weights, const Vector& d_context) {
  if (!cache.filled()) throw std::logic_error("attend_backward: missing forward cache");
  const Vector& beta = cache.result.weights;
  require_size("attend_backward: d_weights", d_weights.size(), beta.size());
  require_size("attend_backward: d_context", d_context.size(), cache.values.cols());
  require_shape("attend_backward: query projection", query_proj, cache.keys.cols(),
                cache.h_prev.size());

  const Vector d_beta = d_weights + cache.values * d_context;
  const Vector d_scores = (beta.array() * (d_beta.array() - beta.dot(d_beta))).matrix();
  const Vector d_query = cache.keys.transpose() * d_scores;

  AttentionGrads grads;
  grads.d_query_proj = d_query * cache.h_prev.transpose();
  grads.d_h_prev = query_proj.transpose() * d_query;
  return grads;
}

}  // namespace adaframe
