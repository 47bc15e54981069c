#include "adaframe/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace adaframe {

Split split_dataset(std::size_t n, std::uint64_t seed, double train_fraction) {
  Split split;
  split.seed = seed;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = Rng(seed).split(0x5B);
  std::shuffle(order.begin(), order.end(), rng.engine());
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return split;
}

std::vector<FeatureSequence> select(const Dataset& dataset, std::span<const std::size_t> indices) {
  std::vector<FeatureSequence> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(dataset.sequences.at(i));
  return out;
}

namespace {

template <typename RunOne>
Evaluation evaluate(std::span<const FeatureSequence> data, const std::string& method,
                    const std::string& setting, const CostModel& cost, RunOne&& run_one) {
  Evaluation eval;
  eval.row.method = method;
  eval.row.setting = setting;
  std::size_t correct = 0;
  std::size_t frames = 0;
  std::size_t visits = 0;
  std::size_t hits = 0;
  for (const auto& seq : data) {
    InferenceResult r = run_one(seq);
    r.cost_gflops = cost_of(r, cost, CostMethod::adaframe);
    frames += r.frames_used;
    if (r.prediction == seq.label) ++correct;
    if (seq.window) {
      for (std::size_t f : r.visited) {
        ++visits;
        if (seq.window->contains(f)) ++hits;
      }
    }
    eval.results.push_back(std::move(r));
  }
  const double n = std::max<double>(1.0, static_cast<double>(data.size()));
  eval.row.mean_frames = static_cast<double>(frames) / n;
  eval.row.accuracy = static_cast<double>(correct) / n;
  eval.row.mean_gflops = 0.0;
  for (const auto& r : eval.results) eval.row.mean_gflops += r.cost_gflops;
  eval.row.mean_gflops /= n;
  eval.window_hit_fraction =
      visits > 0 ? static_cast<double>(hits) / static_cast<double>(visits) : std::nan("");
  return eval;
}

}  // namespace

Evaluation evaluate_adaptive(const AgentParameters& params, std::span<const FeatureSequence> data,
                             const StopConfig& stop, const CostModel& cost) {
  return evaluate(data, "adaframe", format_setting(stop.mu), cost,
                  [&](const FeatureSequence& seq) { return run_adaptive(params, seq, stop); });
}

Evaluation evaluate_entropy_stop(const AgentParameters& params, std::span<const FeatureSequence> data,
                                 double threshold, std::size_t horizon, const CostModel& cost) {
  return evaluate(data, "adaframe-entropy", format_setting(threshold), cost, [&](const FeatureSequence& seq) {
    return run_entropy_stop(params, seq, threshold, horizon);
  });
}

SweepReport sweep(const AgentParameters& params, std::size_t horizon, std::span<const FeatureSequence> data,
                  std::span<const double> mu_grid, std::size_t patience, PatienceMode mode) {
  if (mu_grid.empty()) throw std::invalid_argument("sweep: empty mu grid");
  SweepReport report;
  for (double mu : mu_grid) {
    StopConfig stop = StopConfig::with_default_patience(mu, horizon);
    if (patience > 0) stop.patience = patience;
    stop.mode = mode;
    report.rows.push_back(evaluate_adaptive(params, data, stop).row);
  }
  return report;
}

void check_compatible(const AgentParameters& params, const Dataset& dataset) {
  if (dataset.sequences.empty()) return;
  if (dataset.feature_dim() != params.dims.feature_dim || dataset.memory_dim() != params.dims.memory_dim ||
      static_cast<Eigen::Index>(dataset.num_classes) != params.dims.num_classes) {
    throw std::invalid_argument("checkpoint dimensions do not match the dataset");
  }
  for (const auto& seq : dataset.sequences) {
    if (seq.memory.empty()) throw std::invalid_argument("dataset video without a memory bank");
  }
}

std::string format_setting(double value) {
  if (std::isinf(value)) return "inf";
  std::ostringstream out;
  out << value;
  return out.str();
}

std::string report_csv(const SweepReport& report) {
  std::ostringstream out;
  out.precision(12);
  for (const auto& line : report.metadata) out << "# " << line << '\n';
  out << "method,setting,mean_frames,accuracy,mean_gflops\n";
  for (const auto& r : report.rows) {
    out << r.method << ',' << r.setting << ',' << r.mean_frames << ',' << r.accuracy << ','
        << r.mean_gflops << '\n';
  }
  return out.str();
}

std::string inference_log_csv(std::span<const FeatureSequence> data, std::span<const InferenceResult> results) {
  if (data.size() != results.size()) throw std::invalid_argument("inference_log_csv: size mismatch");
  std::ostringstream out;
  out.precision(12);
  out << "video_id,stop_step,frames_used,visited,predicted,correct,cost_gflops\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& r = results[i];
    out << data[i].id << ',' << r.stop_step << ',' << r.frames_used << ',';
    for (std::size_t k = 0; k < r.visited.size(); ++k) out << (k ? ";" : "") << r.visited[k];
    out << ',' << r.prediction << ',' << (r.prediction == data[i].label ? 1 : 0) << ',' << r.cost_gflops
        << '\n';
  }
  return out.str();
}

}  // namespace adaframe
