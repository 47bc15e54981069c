#pragma once

#include <span>
#include <vector>

#include "adaframe/data.hpp"
#include "adaframe/lstm.hpp"

namespace adaframe {

enum class SamplingMode { random, uniform };

/// Uniform: floor((i + 0.5) T / n). Random: n distinct frames, in temporal order.
std::vector<std::size_t> sample_frames(std::size_t frame_count, std::size_t n, SamplingMode mode, Rng& rng);

struct BaselineConfig {
  std::size_t epochs = 30;
  double learning_rate = 0.05;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  std::size_t batch_size = 32;
  std::size_t hidden_dim = 32;  // plain LSTM only
  double init_scale = 0.1;
  std::uint64_t seed = 0;
};

/// Linear softmax classifier applied to single frames.
struct FrameClassifier {
  Matrix weights;  // C x D_full
  Vector bias;     // C

  Vector scores(const Vector& frame) const;
};

/// Trained on single-frame cross-entropy over the frames each video would
/// sample at this budget.
FrameClassifier train_frame_classifier(std::span<const FeatureSequence> data, std::uint32_t num_classes,
                                       std::size_t n_frames, SamplingMode mode, const BaselineConfig& config);

/// Mean of per-frame scores over the sampled frames; top-1 accuracy.
double evaluate_avgpool(const FrameClassifier& classifier, std::span<const FeatureSequence> data,
                        std::size_t n_frames, SamplingMode mode, std::uint64_t seed);

/// LSTM without memory or frame selection; predicts from the last hidden state.
struct PlainLstmClassifier {
  Matrix lstm_weights;  // 4H x (D_full + H)
  Vector lstm_bias;
  Matrix class_weights;  // C x H
  Vector class_bias;

  Eigen::Index hidden_dim() const { return class_weights.cols(); }
  Vector scores(const FeatureSequence& seq, std::span<const std::size_t> frames) const;
};

PlainLstmClassifier train_plain_lstm(std::span<const FeatureSequence> data, std::uint32_t num_classes,
                                     std::size_t n_frames, SamplingMode mode, const BaselineConfig& config);

double evaluate_plain_lstm(const PlainLstmClassifier& model, std::span<const FeatureSequence> data,
                           std::size_t n_frames, SamplingMode mode, std::uint64_t seed);

enum class BaselineMethod { avgpool, lstm };

/// Trains a fresh comparator for this budget on `train_set`, evaluates on `eval_set`.
double run_baseline(BaselineMethod method, std::span<const FeatureSequence> train_set,
                    std::span<const FeatureSequence> eval_set, std::uint32_t num_classes,
                    std::size_t n_frames, SamplingMode mode, const BaselineConfig& config);

}  // namespace adaframe
