// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>

#include "adaframe/checkpoint.hpp"
#include "adaframe/harness.hpp"
#include "oracles.hpp"

using namespace adaframe;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  const char* id;
  const char* title;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

Outcome gradient_suite() {
  constexpr int kCases = 24;
  constexpr double kTolerance = 1e-4;
  constexpr double kStep = 2e-3;
  Rng rng(2024);
  double worst[3] = {0, 0, 0};
  for (int i = 0; i < kCases; ++i) {
    const oracle::GradientCase c = oracle::random_gradient_case(rng);
    Rng sampler = rng.split(static_cast<std::uint64_t>(i));
    const Rollout ro = rollout(c.params, c.seq, c.config, &sampler);
    const ObjectiveTerms terms[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    double oracle::ObjectiveParts::*parts[3] = {&oracle::ObjectiveParts::classification,
                                                &oracle::ObjectiveParts::utility,
                                                &oracle::ObjectiveParts::selection};
    const double scale[3] = {1.0, c.config.lambda, c.config.lambda};
    for (int k = 0; k < 3; ++k) {
      const Vector analytic = backward(c.params, ro, c.config, terms[k]).flatten();
      const Vector numeric = finite_diff_grad(
          [&](const Vector& theta) {
            AgentParameters q = c.params;
            q.assign_flat(theta);
            return scale[k] * oracle::frozen_objective(q, c.seq, ro.trajectory, c.config.sigma).*parts[k];
          },
          c.params.flatten(), kStep, Stencil::five_point);
      worst[k] = std::max(worst[k], max_relative_error(analytic, numeric));
    }
  }
  const bool pass = worst[0] < kTolerance && worst[1] < kTolerance && worst[2] < kTolerance;
  return {pass, fmt("%d configs, max rel err cls=%.2e utl=%.2e sel=%.2e (tol %.0e)", kCases, worst[0], worst[1],
                    worst[2], kTolerance)};
}

Outcome reward_oracle() {
  Rng rng(7);
  int mismatches = 0;
  int sum_violations = 0;
  for (int i = 0; i < 10000; ++i) {
    std::vector<double> m(1 + rng.index(20));
    for (double& v : m) v = rng.uniform(-1.0, 1.0);
    const auto r = margin_increase_rewards(m);
    if (r != oracle::margin_rewards(m)) ++mismatches;
    // Telescoping sum, compared exactly on values where cancellation is exact.
    double sum = 0.0;
    for (double x : r) sum += x;
    const double expected = std::max(0.0, *std::max_element(m.begin(), m.end()));
    if (std::abs(sum - expected) > 1e-12) ++sum_violations;
  }
  // Dyadic margins make every partial sum exactly representable.
  int exact_violations = 0;
  for (int i = 0; i < 10000; ++i) {
    std::vector<double> m(1 + rng.index(20));
    for (double& v : m) v = static_cast<double>(static_cast<int>(rng.index(2049)) - 1024) / 1024.0;
    double sum = 0.0;
    for (double x : margin_increase_rewards(m)) sum += x;
    if (sum != std::max(0.0, *std::max_element(m.begin(), m.end()))) ++exact_violations;
  }
  return {mismatches == 0 && sum_violations == 0 && exact_violations == 0,
          fmt("10000 sequences: %d brute-force mismatches, %d sum violations (1e-12), %d exact-sum violations "
              "on 10000 dyadic sequences",
              mismatches, sum_violations, exact_violations)};
}

Outcome stop_rule_oracle() {
  Rng rng(11);
  const double mus[] = {0.0, 0.05, 0.1, 0.3, 0.7};
  const std::size_t patiences[] = {1, 2, 3};
  int mismatches = 0;
  int monotone_violations = 0;
  int early = 0;
  int runs = 0;
  for (int trace = 0; trace < 1000; ++trace) {
    const oracle::GradientCase c = oracle::random_gradient_case(rng);
    AgentParameters params = c.params;
    params *= 2.0;
    params.utility_weights *= 4.0;
    const std::size_t k = 1 + rng.index(10);
    const std::vector<double> utilities = run_fixed(params, c.seq, k).utilities;
    for (std::size_t p : patiences) {
      std::size_t previous = 0;
      for (double mu : mus) {
        StopConfig stop;
        stop.mu = mu;
        stop.patience = p;
        stop.horizon = k;
        const InferenceResult r = run_adaptive(params, c.seq, stop);
        ++runs;
        if (r.stop_step != oracle::simulate_stop(utilities, mu, p) || r.frames_used != r.stop_step) ++mismatches;
        if (r.frames_used < previous) ++monotone_violations;
        if (r.frames_used < k) ++early;
        previous = r.frames_used;
      }
    }
  }
  return {mismatches == 0 && monotone_violations == 0,
          fmt("1000 traces x 15 (mu, p): %d stop-step mismatches, %d monotonicity violations, %d/%d early stops",
              mismatches, monotone_violations, early, runs)};
}

// Settings shared by the two learning criteria.
SyntheticSpec toy_spec(std::uint64_t seed) {
  SyntheticSpec s;
  s.num_classes = 5;
  s.length = 64;
  s.feature_dim = 16;
  s.memory_dim = 8;
  s.memory_slots = 16;
  s.signal_window = 4;
  s.signal_strength = 3.0;
  s.noise_stddev = 1.0;
  s.memory_noise_stddev = 0.1;
  s.seed = seed;
  return s;
}

TrainConfig toy_train_config(std::size_t horizon, std::uint64_t seed) {
  TrainConfig c;
  c.horizon = horizon;
  c.learning_rate = 0.05;
  c.epochs = 100;
  c.seed = seed;
  return c;
}

struct ToyRun {
  std::vector<FeatureSequence> train_set;
  std::vector<FeatureSequence> validation;
  AgentParameters params;
};

ToyRun train_toy(std::size_t horizon, std::uint64_t seed) {
  const Dataset ds = generate(toy_spec(seed), 2500);
  const Split split = split_dataset(ds.size(), seed);
  ToyRun run;
  run.train_set = select(ds, split.train);
  run.validation = select(ds, split.validation);
  run.params = train(run.train_set, ds.num_classes, toy_train_config(horizon, seed));
  return run;
}

Outcome toy_learning() {
  constexpr int kSeeds = 5;
  double ada = 0.0, pool = 0.0, hit = 0.0;
  std::string per_seed;
  for (int seed = 0; seed < kSeeds; ++seed) {
    const ToyRun run = train_toy(5, static_cast<std::uint64_t>(seed));
    const Evaluation e = evaluate_adaptive(run.params, run.validation, StopConfig::with_default_patience(kInf, 5));
    BaselineConfig bc;
    bc.seed = static_cast<std::uint64_t>(seed);
    const double baseline = run_baseline(BaselineMethod::avgpool, run.train_set, run.validation, 5, 5,
                                         SamplingMode::random, bc);
    ada += e.row.accuracy;
    pool += baseline;
    hit += e.window_hit_fraction;
    per_seed += fmt(" [%.3f/%.3f/%.3f]", e.row.accuracy, baseline, e.window_hit_fraction);
    std::fprintf(stderr, "  AC4 seed %d: adaframe %.3f, avgpool-random %.3f, window hit %.3f\n", seed,
                 e.row.accuracy, baseline, e.window_hit_fraction);
  }
  ada /= kSeeds;
  pool /= kSeeds;
  hit /= kSeeds;
  const double chance = 4.0 / 64.0;
  const bool pass = ada - pool >= 0.05 && hit >= 2.0 * chance;
  return {pass, fmt("acc %.3f vs avgpool-random@5 %.3f (gap %+.1fpp, need >= 5pp); window hit %.3f (need >= %.3f);"
                    " per seed [acc/pool/hit]:%s",
                    ada, pool, 100.0 * (ada - pool), hit, 2.0 * chance, per_seed.c_str())};
}

Outcome adaptive_saving() {
  const ToyRun run = train_toy(10, 0);
  const auto started = std::chrono::steady_clock::now();
  const double fixed = evaluate_adaptive(run.params, run.validation, StopConfig::with_default_patience(kInf, 10))
                           .row.accuracy;
  std::vector<double> grid;  // every multiple of 0.05 below 0.7
  for (int i = 0; i < 14; ++i) grid.push_back(0.05 * i);
  const SweepReport report = sweep(run.params, 10, run.validation, grid);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  bool found = false;
  std::string rows;
  for (const auto& row : report.rows) {
    const bool ok = row.accuracy >= fixed - 0.01 && row.mean_frames <= 8.5;
    found = found || ok;
    rows += fmt(" mu=%s:%.3f@%.2f%s", row.setting.c_str(), row.accuracy, row.mean_frames, ok ? "*" : "");
  }
  return {found && seconds < 120.0,
          fmt("fixed-10 acc %.3f; sweep%s (need acc >= fixed-1pp at <= 8.5 frames; sweep %.1fs)", fixed,
              rows.c_str(), seconds)};
}

Outcome cost_arithmetic() {
  const CostModel model;
  const double baseline = cost_of(25, model, CostMethod::baseline);
  const double per_frame = cost_of(1, model, CostMethod::adaframe);
  InferenceResult r;
  r.frames_used = 25;
  const double linear = cost_of(r, model, CostMethod::adaframe);
  const bool pass = std::abs(baseline - 195.5) <= 1e-9 && std::abs(per_frame - 9.14) <= 1e-9 &&
                    std::abs(linear - 25 * 9.14) <= 1e-9 && cost_of(0, model, CostMethod::adaframe) == 0.0;
  return {pass, fmt("25 baseline frames = %.12g, 1 adaframe frame = %.12g, 25 adaframe frames = %.12g", baseline,
                    per_frame, linear)};
}

template <typename Decode>
bool corruption_is_typed(const std::vector<std::uint8_t>& good, Decode decode, Rng& rng, int& cases) {
  auto typed = [&](std::span<const std::uint8_t> bytes) {
    ++cases;
    try {
      decode(bytes);
      return true;  // a benign flip may still decode
    } catch (const FormatError&) {
      return true;
    } catch (...) {
      return false;
    }
  };
  for (std::size_t n = 0; n < good.size(); ++n) {
    try {
      decode(std::span(good).first(n));
      return false;
    } catch (const FormatError& e) {
      if (e.code() != FormatErrorCode::truncated && e.code() != FormatErrorCode::bad_magic) return false;
    } catch (...) {
      return false;
    }
    ++cases;
  }
  for (int i = 0; i < 3000; ++i) {
    auto bad = good;
    bad[rng.index(std::min<std::size_t>(bad.size(), 64))] = static_cast<std::uint8_t>(rng.index(256));
    if (!typed(bad)) return false;
  }
  auto trailing = good;
  trailing.push_back(0);
  ++cases;
  try {
    decode(trailing);
  } catch (const FormatError& e) {
    return e.code() == FormatErrorCode::dim_inconsistent;
  } catch (...) {
  }
  return false;
}

Outcome determinism_and_format() {
  SyntheticSpec s = toy_spec(3);
  s.length = 24;
  const Dataset ds = generate(s, 60);
  TrainConfig c = toy_train_config(4, 3);
  c.epochs = 3;
  c.hidden_dim = 8;
  const auto first = encode_checkpoint({train(ds.sequences, ds.num_classes, c), 4});
  const auto second = encode_checkpoint({train(ds.sequences, ds.num_classes, c), 4});
  const bool identical = first == second;

  const Dataset back = decode_dataset(encode_dataset(ds));
  bool afv1 = back.size() == ds.size() && back.num_classes == ds.num_classes;
  for (std::size_t i = 0; afv1 && i < ds.size(); ++i) {
    afv1 = back.sequences[i].features == ds.sequences[i].features &&
           back.sequences[i].memory.entries() == ds.sequences[i].memory.entries() &&
           back.sequences[i].label == ds.sequences[i].label && back.sequences[i].id == ds.sequences[i].id;
  }
  const bool afck = encode_checkpoint(decode_checkpoint(first)) == first;

  Rng rng(5);
  int cases = 0;
  const bool typed_ck = corruption_is_typed(first, [](auto b) { decode_checkpoint(b); }, rng, cases);
  SyntheticSpec tiny = toy_spec(4);
  tiny.length = 8;
  tiny.memory_slots = 4;
  const auto dataset_bytes = encode_dataset(generate(tiny, 3));
  const bool typed_ds = corruption_is_typed(dataset_bytes, [](auto b) { decode_dataset(b); }, rng, cases);
  return {identical && afv1 && afck && typed_ck && typed_ds,
          fmt("checkpoints bit-identical: %s; AFV1 lossless: %s; AFCK lossless: %s; %d corrupted inputs typed: %s",
              identical ? "yes" : "no", afv1 ? "yes" : "no", afck ? "yes" : "no", cases,
              typed_ck && typed_ds ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string only = argc > 1 ? argv[1] : "";
  const Criterion criteria[] = {
      {"AC1", "gradient suite", 60, gradient_suite},
      {"AC2", "reward oracle", 5, reward_oracle},
      {"AC3", "stop-rule oracle", 5, stop_rule_oracle},
      {"AC4", "toy learning", 900, toy_learning},
      {"AC5", "adaptive-inference saving", 0, adaptive_saving},
      {"AC6", "cost arithmetic", 1, cost_arithmetic},
      {"AC7", "determinism and format", 60, determinism_and_format},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && only != c.id) continue;
    const auto started = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    const bool in_time = c.budget_seconds <= 0 || seconds < c.budget_seconds;
    const bool pass = out.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s %s: %s (%.1fs%s) %s\n", c.id, pass ? "PASS" : "FAIL", c.title, seconds,
                in_time ? "" : ", over budget", out.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
