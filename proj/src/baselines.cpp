#include "adaframe/baselines.hpp"

#include <algorithm>
#include <numeric>

#include "adaframe/learning.hpp"

namespace adaframe {

std::vector<std::size_t> sample_frames(std::size_t frame_count, std::size_t n, SamplingMode mode, Rng& rng) {
  if (n == 0 || n > frame_count) throw std::invalid_argument("sample_frames: need 1 <= n <= T");
  std::vector<std::size_t> idx;
  if (mode == SamplingMode::uniform) {
    idx.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      idx.push_back(static_cast<std::size_t>((static_cast<double>(i) + 0.5) *
                                             static_cast<double>(frame_count) / static_cast<double>(n)));
    }
    return idx;
  }
  std::vector<std::size_t> all(frame_count);
  std::iota(all.begin(), all.end(), 0);
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < n; ++i) std::swap(all[i], all[i + rng.index(frame_count - i)]);
  idx.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n));
  std::sort(idx.begin(), idx.end());
  return idx;
}

namespace {

Vector one_hot_residual(Vector scores, std::size_t label) {
  scores(static_cast<Eigen::Index>(label)) -= 1.0;
  return scores;
}

std::span<double> as_span(auto& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<const double> as_cspan(const auto& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }

std::vector<std::size_t> shuffled(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng.engine());
  return order;
}

void require_budget(std::span<const FeatureSequence> data, std::size_t n_frames) {
  for (const auto& seq : data) {
    if (n_frames == 0 || n_frames > seq.frame_count()) {
      throw std::invalid_argument("baseline: frame budget exceeds sequence length");
    }
  }
}

std::size_t argmax(const Vector& v) {
  Eigen::Index best = 0;
  v.maxCoeff(&best);
  return static_cast<std::size_t>(best);
}

}  // namespace

Vector FrameClassifier::scores(const Vector& frame) const { return softmax(weights * frame + bias); }

FrameClassifier train_frame_classifier(std::span<const FeatureSequence> data, std::uint32_t num_classes,
                                       std::size_t n_frames, SamplingMode mode, const BaselineConfig& config) {
  if (data.empty()) throw std::invalid_argument("train_frame_classifier: empty dataset");
  require_budget(data, n_frames);
  const Eigen::Index dim = data.front().features.cols();
  Rng rng = Rng(config.seed).split(0xA7);
  FrameClassifier model{Matrix::Zero(num_classes, dim), Vector::Zero(num_classes)};
  Matrix vw = Matrix::Zero(num_classes, dim);
  Vector vb = Vector::Zero(num_classes);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto order = shuffled(data.size(), rng);
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      Matrix gw = Matrix::Zero(num_classes, dim);
      Vector gb = Vector::Zero(num_classes);
      std::size_t count = 0;
      for (std::size_t k = begin; k < end; ++k) {
        const FeatureSequence& seq = data[order[k]];
        for (std::size_t f : sample_frames(seq.frame_count(), n_frames, mode, rng)) {
          const Vector x = seq.frame(f);
          const Vector d = one_hot_residual(model.scores(x), seq.label);
          gw.noalias() += d * x.transpose();
          gb += d;
          ++count;
        }
      }
      gw /= static_cast<double>(count);
      gb /= static_cast<double>(count);
      momentum_update(as_span(model.weights), as_span(vw), as_cspan(gw), config.learning_rate,
                      config.momentum, config.weight_decay);
      momentum_update(as_span(model.bias), as_span(vb), as_cspan(gb), config.learning_rate,
                      config.momentum, 0.0);
    }
  }
  return model;
}

double evaluate_avgpool(const FrameClassifier& classifier, std::span<const FeatureSequence> data,
                        std::size_t n_frames, SamplingMode mode, std::uint64_t seed) {
  if (data.empty()) return 0.0;
  require_budget(data, n_frames);
  Rng rng = Rng(seed).split(0xE1);
  std::size_t correct = 0;
  for (const auto& seq : data) {
    Vector pooled = Vector::Zero(classifier.bias.size());
    const auto frames = sample_frames(seq.frame_count(), n_frames, mode, rng);
    for (std::size_t f : frames) pooled += classifier.scores(seq.frame(f));
    pooled /= static_cast<double>(frames.size());
    if (argmax(pooled) == seq.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

Vector PlainLstmClassifier::scores(const FeatureSequence& seq, std::span<const std::size_t> frames) const {
  const Eigen::Index hidden = hidden_dim();
  Vector h = Vector::Zero(hidden);
  Vector c = Vector::Zero(hidden);
  Vector input(lstm_weights.cols());
  for (std::size_t f : frames) {
    input << seq.frame(f), h;
    LstmCache cache = lstm_forward(lstm_weights, lstm_bias, input, c);
    h = std::move(cache.h);
    c = std::move(cache.c);
  }
  return softmax(class_weights * h + class_bias);
}

PlainLstmClassifier train_plain_lstm(std::span<const FeatureSequence> data, std::uint32_t num_classes,
                                     std::size_t n_frames, SamplingMode mode, const BaselineConfig& config) {
  if (data.empty()) throw std::invalid_argument("train_plain_lstm: empty dataset");
  require_budget(data, n_frames);
  const Eigen::Index dim = data.front().features.cols();
  const auto hidden = static_cast<Eigen::Index>(config.hidden_dim);
  Rng init = Rng(config.seed).split(0xB1);
  Rng rng = Rng(config.seed).split(0xB2);

  PlainLstmClassifier model;
  model.lstm_weights.resize(4 * hidden, dim + hidden);
  for (Eigen::Index i = 0; i < model.lstm_weights.size(); ++i) {
    model.lstm_weights.data()[i] = init.uniform(-config.init_scale, config.init_scale);
  }
  model.lstm_bias = Vector::Zero(4 * hidden);
  model.lstm_bias.segment(hidden, hidden).setOnes();
  model.class_weights.resize(num_classes, hidden);
  for (Eigen::Index i = 0; i < model.class_weights.size(); ++i) {
    model.class_weights.data()[i] = init.uniform(-config.init_scale, config.init_scale);
  }
  model.class_bias = Vector::Zero(num_classes);

  Matrix v_lw = Matrix::Zero(model.lstm_weights.rows(), model.lstm_weights.cols());
  Vector v_lb = Vector::Zero(model.lstm_bias.size());
  Matrix v_cw = Matrix::Zero(model.class_weights.rows(), model.class_weights.cols());
  Vector v_cb = Vector::Zero(num_classes);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto order = shuffled(data.size(), rng);
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      Matrix g_lw = Matrix::Zero(v_lw.rows(), v_lw.cols());
      Vector g_lb = Vector::Zero(v_lb.size());
      Matrix g_cw = Matrix::Zero(v_cw.rows(), v_cw.cols());
      Vector g_cb = Vector::Zero(num_classes);
      for (std::size_t k = begin; k < end; ++k) {
        const FeatureSequence& seq = data[order[k]];
        const auto frames = sample_frames(seq.frame_count(), n_frames, mode, rng);
        std::vector<LstmCache> caches;
        Vector h = Vector::Zero(hidden);
        Vector c = Vector::Zero(hidden);
        Vector input(dim + hidden);
        for (std::size_t f : frames) {
          input << seq.frame(f), h;
          caches.push_back(lstm_forward(model.lstm_weights, model.lstm_bias, input, c));
          h = caches.back().h;
          c = caches.back().c;
        }
        const Vector d_logits =
            one_hot_residual(softmax(model.class_weights * h + model.class_bias), seq.label);
        g_cw.noalias() += d_logits * h.transpose();
        g_cb += d_logits;
        Vector d_h = model.class_weights.transpose() * d_logits;
        Vector d_c = Vector::Zero(hidden);
        for (std::size_t t = caches.size(); t-- > 0;) {
          const LstmInputGrads g = lstm_backward(caches[t], model.lstm_weights, d_h, d_c, g_lw, g_lb);
          d_h = g.d_input.tail(hidden);
          d_c = g.d_c_prev;
        }
      }
      const double scale = 1.0 / static_cast<double>(end - begin);
      g_lw *= scale;
      g_lb *= scale;
      g_cw *= scale;
      g_cb *= scale;
      const double norm = std::sqrt(g_lw.squaredNorm() + g_lb.squaredNorm() + g_cw.squaredNorm() +
                                    g_cb.squaredNorm());
      if (norm > 5.0) {
        const double s = 5.0 / norm;
        g_lw *= s;
        g_lb *= s;
        g_cw *= s;
        g_cb *= s;
      }
      const double lr = config.learning_rate;
      momentum_update(as_span(model.lstm_weights), as_span(v_lw), as_cspan(g_lw), lr, config.momentum,
                      config.weight_decay);
      momentum_update(as_span(model.lstm_bias), as_span(v_lb), as_cspan(g_lb), lr, config.momentum, 0.0);
      momentum_update(as_span(model.class_weights), as_span(v_cw), as_cspan(g_cw), lr, config.momentum,
                      config.weight_decay);
      momentum_update(as_span(model.class_bias), as_span(v_cb), as_cspan(g_cb), lr, config.momentum, 0.0);
    }
  }
  return model;
}

double evaluate_plain_lstm(const PlainLstmClassifier& model, std::span<const FeatureSequence> data,
                           std::size_t n_frames, SamplingMode mode, std::uint64_t seed) {
  if (data.empty()) return 0.0;
  require_budget(data, n_frames);
  Rng rng = Rng(seed).split(0xE2);
  std::size_t correct = 0;
  for (const auto& seq : data) {
    const auto frames = sample_frames(seq.frame_count(), n_frames, mode, rng);
    if (argmax(model.scores(seq, frames)) == seq.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double run_baseline(BaselineMethod method, std::span<const FeatureSequence> train_set,
                    std::span<const FeatureSequence> eval_set, std::uint32_t num_classes,
                    std::size_t n_frames, SamplingMode mode, const BaselineConfig& config) {
  if (method == BaselineMethod::avgpool) {
    const FrameClassifier clf = train_frame_classifier(train_set, num_classes, n_frames, mode, config);
    return evaluate_avgpool(clf, eval_set, n_frames, mode, config.seed);
  }
  const PlainLstmClassifier model = train_plain_lstm(train_set, num_classes, n_frames, mode, config);
  return evaluate_plain_lstm(model, eval_set, n_frames, mode, config.seed);
}

}  // namespace adaframe
