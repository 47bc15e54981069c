#include "adaframe/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "adaframe/checkpoint.hpp"
#include "adaframe/harness.hpp"

namespace adaframe {

namespace {

struct RunConfig {
  std::string config_path;
  std::uint64_t seed = 0;

  SyntheticSpec synthetic;
  std::size_t n_videos = 2500;

  TrainConfig train;
  std::string reward = "margin";
  std::string first_reward = "floor";
  std::string start = "first";

  std::string data_path;
  std::string checkpoint_path = "adaframe.afck";
  std::string output_path;
  std::string metrics_path;
  std::string log_path;

  double mu = std::numeric_limits<double>::infinity();
  std::vector<double> mu_grid = {0.0, 0.05, 0.1, 0.3, 0.5, 0.7};
  std::vector<double> entropy_grid;
  std::size_t patience = 0;
  bool consecutive = false;

  BaselineConfig baseline;
  std::string baseline_method = "avgpool";
  std::string sampling = "random";
  std::vector<std::size_t> frame_budgets = {5};
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_atomic(path, text);
  }
}

RewardKind parse_reward(const std::string& s) {
  if (s == "margin") return RewardKind::margin_increase;
  if (s == "prediction") return RewardKind::prediction;
  if (s == "transition") return RewardKind::prediction_transition;
  throw UsageError("unknown reward: " + s);
}

StartFrame parse_start(const std::string& s) {
  if (s == "first") return StartFrame::first;
  if (s == "middle") return StartFrame::middle;
  throw UsageError("unknown start frame: " + s);
}

std::vector<std::string> split_metadata(const Split& split, const std::string& data_path) {
  std::ostringstream line;
  line << "data=" << data_path << " split_seed=" << split.seed << " train=" << split.train.size()
       << " validation=" << split.validation.size();
  return {line.str()};
}

int cmd_gen_data(RunConfig& cfg) {
  cfg.synthetic.seed = cfg.seed;
  write_dataset(cfg.output_path, generate(cfg.synthetic, cfg.n_videos));
  return 0;
}

int cmd_train(RunConfig& cfg) {
  const Dataset dataset = read_dataset(cfg.data_path);
  cfg.train.seed = cfg.seed;
  cfg.train.reward = parse_reward(cfg.reward);
  cfg.train.start = parse_start(cfg.start);
  if (cfg.first_reward == "floor") {
    cfg.train.first_step_reward = FirstStepReward::zero_floor;
  } else if (cfg.first_reward == "none") {
    cfg.train.first_step_reward = FirstStepReward::none;
  } else {
    throw UsageError("unknown first-step reward: " + cfg.first_reward);
  }
  const Split split = split_dataset(dataset.size(), cfg.seed);
  const auto train_set = select(dataset, split.train);

  std::ostringstream metrics;
  metrics << metrics_csv_header() << '\n';
  const AgentParameters params = train(train_set, dataset.num_classes, cfg.train, [&](const EpochMetrics& m) {
    metrics << metrics_csv_row(m) << '\n';
    std::cerr << "epoch " << m.epoch << " loss_cls " << m.loss_cls << " acc " << m.train_accuracy << '\n';
  });
  write_checkpoint(cfg.checkpoint_path, {params, static_cast<std::uint32_t>(cfg.train.horizon)});
  const std::string metrics_path =
      cfg.metrics_path.empty() ? cfg.checkpoint_path + ".metrics.csv" : cfg.metrics_path;
  write_text_atomic(metrics_path, metrics.str());
  return 0;
}

struct Loaded {
  Dataset dataset;
  Checkpoint checkpoint;
  Split split;
  std::vector<FeatureSequence> validation;
};

Loaded load_for_eval(const RunConfig& cfg) {
  Loaded l;
  l.dataset = read_dataset(cfg.data_path);
  l.checkpoint = read_checkpoint(cfg.checkpoint_path);
  check_compatible(l.checkpoint.params, l.dataset);
  l.split = split_dataset(l.dataset.size(), cfg.seed);
  l.validation = select(l.dataset, l.split.validation);
  return l;
}

int cmd_eval(RunConfig& cfg) {
  const Loaded l = load_for_eval(cfg);
  StopConfig stop = StopConfig::with_default_patience(cfg.mu, l.checkpoint.horizon);
  if (cfg.patience > 0) stop.patience = cfg.patience;
  stop.mode = cfg.consecutive ? PatienceMode::consecutive : PatienceMode::cumulative;
  const Evaluation eval = evaluate_adaptive(l.checkpoint.params, l.validation, stop);
  SweepReport report{split_metadata(l.split, cfg.data_path), {eval.row}};
  write_output(cfg.output_path, report_csv(report));
  if (!cfg.log_path.empty()) write_text_atomic(cfg.log_path, inference_log_csv(l.validation, eval.results));
  return 0;
}

int cmd_sweep(RunConfig& cfg) {
  const Loaded l = load_for_eval(cfg);
  SweepReport report =
      sweep(l.checkpoint.params, l.checkpoint.horizon, l.validation, cfg.mu_grid, cfg.patience,
            cfg.consecutive ? PatienceMode::consecutive : PatienceMode::cumulative);
  report.metadata = split_metadata(l.split, cfg.data_path);
  for (double threshold : cfg.entropy_grid) {
    report.rows.push_back(
        evaluate_entropy_stop(l.checkpoint.params, l.validation, threshold, l.checkpoint.horizon).row);
  }
  write_output(cfg.output_path, report_csv(report));
  return 0;
}

int cmd_baseline(RunConfig& cfg) {
  const Dataset dataset = read_dataset(cfg.data_path);
  const Split split = split_dataset(dataset.size(), cfg.seed);
  const auto train_set = select(dataset, split.train);
  const auto validation = select(dataset, split.validation);

  BaselineMethod method;
  if (cfg.baseline_method == "avgpool") {
    method = BaselineMethod::avgpool;
  } else if (cfg.baseline_method == "lstm") {
    method = BaselineMethod::lstm;
  } else {
    throw UsageError("unknown baseline method: " + cfg.baseline_method);
  }
  SamplingMode mode;
  if (cfg.sampling == "random") {
    mode = SamplingMode::random;
  } else if (cfg.sampling == "uniform") {
    mode = SamplingMode::uniform;
  } else {
    throw UsageError("unknown sampling mode: " + cfg.sampling);
  }
  cfg.baseline.seed = cfg.seed;

  SweepReport report;
  report.metadata = split_metadata(split, cfg.data_path);
  const CostModel cost;
  for (std::size_t n : cfg.frame_budgets) {
    SweepRow row;
    row.method = cfg.baseline_method + "-" + cfg.sampling;
    row.setting = std::to_string(n);
    row.mean_frames = static_cast<double>(n);
    row.accuracy = run_baseline(method, train_set, validation, dataset.num_classes, n, mode, cfg.baseline);
    row.mean_gflops = cost_of(n, cost, CostMethod::baseline);
    report.rows.push_back(row);
  }
  write_output(cfg.output_path, report_csv(report));
  return 0;
}

/// Turns `key = value` lines into `--key value` arguments placed ahead of the
/// real command line, so explicit flags win.
std::vector<std::string> config_arguments(const std::string& path, CLI::App& sub, CLI::App& app) {
  std::vector<std::string> args;
  for (const auto& item : CLI::ConfigINI().from_file(path)) {
    const std::string key = item.fullname();
    if (key == "config") continue;
    if (sub.get_option_no_throw("--" + key) == nullptr) {
      bool known = false;
      for (const CLI::App* other : app.get_subcommands({})) {
        known = known || other->get_option_no_throw("--" + key) != nullptr;
      }
      if (!known) throw CLI::ConversionError("unknown config key: " + key);
      continue;
    }
    const CLI::Option* opt = sub.get_option("--" + key);
    if (opt->get_type_size() == 0) {
      if (item.inputs.empty() || CLI::detail::to_flag_value(item.inputs.front()) > 0) args.push_back("--" + key);
      continue;
    }
    std::string joined;
    for (std::size_t i = 0; i < item.inputs.size(); ++i) joined += (i ? "," : "") + item.inputs[i];
    args.push_back("--" + key + "=" + joined);
  }
  return args;
}

}  // namespace

int cli_main(int argc, char** argv) {
  RunConfig cfg;
  if (const char* env = std::getenv("ADAFRAME_SEED")) {
    try {
      cfg.seed = std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "ADAFRAME_SEED is not an integer\n";
      return 1;
    }
  }

  CLI::App app{"Adaptive frame selection agent: data generation, training and evaluation"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", cfg.config_path, "key = value file; flags override it");
    sub->add_option("--seed", cfg.seed, "seed for all randomness (default: $ADAFRAME_SEED or 0)");
  };

  auto* gen = app.add_subcommand("gen-data", "generate a synthetic AFV1 dataset");
  common(gen);
  gen->add_option("--out", cfg.output_path, "output dataset path")->required();
  gen->add_option("--n-videos", cfg.n_videos);
  gen->add_option("--classes", cfg.synthetic.num_classes);
  gen->add_option("--length", cfg.synthetic.length);
  gen->add_option("--feature-dim", cfg.synthetic.feature_dim);
  gen->add_option("--memory-dim", cfg.synthetic.memory_dim);
  gen->add_option("--memory-slots", cfg.synthetic.memory_slots);
  gen->add_option("--window", cfg.synthetic.signal_window);
  gen->add_option("--signal-strength", cfg.synthetic.signal_strength);
  gen->add_option("--noise", cfg.synthetic.noise_stddev);
  gen->add_option("--memory-noise", cfg.synthetic.memory_noise_stddev);
  gen->add_option("--projection-scale", cfg.synthetic.projection_scale);

  auto* tr = app.add_subcommand("train", "train the agent on the training split");
  common(tr);
  tr->add_option("--data", cfg.data_path)->required();
  tr->add_option("--out", cfg.checkpoint_path, "checkpoint path");
  tr->add_option("--metrics", cfg.metrics_path, "per-epoch CSV (default: <out>.metrics.csv)");
  tr->add_option("--k", cfg.train.horizon, "training horizon K");
  tr->add_option("--epochs", cfg.train.epochs);
  tr->add_option("--lr", cfg.train.learning_rate);
  tr->add_option("--batch-size", cfg.train.batch_size);
  tr->add_option("--hidden", cfg.train.hidden_dim);
  tr->add_option("--gamma", cfg.train.gamma);
  tr->add_option("--sigma", cfg.train.sigma);
  tr->add_option("--lambda", cfg.train.lambda);
  tr->add_option("--momentum", cfg.train.momentum);
  tr->add_option("--weight-decay", cfg.train.weight_decay);
  tr->add_option("--lr-decay-every", cfg.train.lr_decay_every);
  tr->add_option("--grad-clip", cfg.train.grad_clip);
  tr->add_option("--init-scale", cfg.train.init_scale);
  tr->add_option("--reward", cfg.reward, "margin | prediction | transition");
  tr->add_option("--first-reward", cfg.first_reward, "floor | none");
  tr->add_option("--start", cfg.start, "first | middle");

  auto add_eval_options = [&](CLI::App* sub) {
    common(sub);
    sub->add_option("--data", cfg.data_path)->required();
    sub->add_option("--checkpoint", cfg.checkpoint_path);
    sub->add_option("--out", cfg.output_path, "report CSV (default: stdout)");
    sub->add_option("--patience", cfg.patience, "0 selects the default rule");
    sub->add_flag("--consecutive", cfg.consecutive, "count only consecutive violations");
  };
  auto* ev = app.add_subcommand("eval", "adaptive inference on the validation split");
  add_eval_options(ev);
  ev->add_option("--mu", cfg.mu, "utility-drop threshold (inf = fixed K)");
  ev->add_option("--log", cfg.log_path, "per-video inference CSV");

  auto* sw = app.add_subcommand("sweep", "accuracy and cost over a grid of thresholds");
  add_eval_options(sw);
  sw->add_option("--mu", cfg.mu_grid, "comma-separated thresholds")->delimiter(',');
  sw->add_option("--entropy", cfg.entropy_grid, "entropy-stop thresholds")->delimiter(',');

  auto* bl = app.add_subcommand("baseline", "AvgPooling / LSTM comparators");
  common(bl);
  bl->add_option("--data", cfg.data_path)->required();
  bl->add_option("--method", cfg.baseline_method, "avgpool | lstm");
  bl->add_option("--mode", cfg.sampling, "random | uniform");
  bl->add_option("--frames", cfg.frame_budgets, "comma-separated frame budgets")->delimiter(',');
  bl->add_option("--epochs", cfg.baseline.epochs);
  bl->add_option("--lr", cfg.baseline.learning_rate);
  bl->add_option("--batch-size", cfg.baseline.batch_size);
  bl->add_option("--hidden", cfg.baseline.hidden_dim);
  bl->add_option("--out", cfg.output_path, "report CSV (default: stdout)");

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    // Locate the subcommand and config file up front so the file can be
    // expanded into arguments that precede the user's flags.
    CLI::App* selected = nullptr;
    std::size_t sub_pos = 0;
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (selected == nullptr) {
        if (CLI::App* s = app.get_subcommand_no_throw(args[i])) {
          selected = s;
          sub_pos = i;
        }
      }
      if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
      if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (selected != nullptr && !config_path.empty()) {
      if (!std::filesystem::exists(config_path)) {
        throw CLI::FileError::Missing(config_path);
      }
      const auto extra = config_arguments(config_path, *selected, app);
      args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub_pos) + 1, extra.begin(), extra.end());
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    return 1;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(cfg);
    if (tr->parsed()) return cmd_train(cfg);
    if (ev->parsed()) return cmd_eval(cfg);
    if (sw->parsed()) return cmd_sweep(cfg);
    if (bl->parsed()) return cmd_baseline(cfg);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace adaframe
