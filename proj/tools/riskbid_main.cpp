// riskbid: risk-aware real-time-bidding workflows over preprocessed auction
// logs. Subcommands cover the full loop: synthesize a benchmark, build the
// value table, train the self-supervised tendency, evaluate strategies, and
// export tendency grids.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "riskbid/ctr.hpp"
#include "riskbid/data.hpp"
#include "riskbid/dp.hpp"
#include "riskbid/market.hpp"
#include "riskbid/mlp.hpp"
#include "riskbid/risk.hpp"
#include "riskbid/sim.hpp"
#include "riskbid/ssrl.hpp"

namespace {

using nlohmann::json;

// Budget coefficients accept plain decimals or fractions like 1/32.
double parse_c0(const std::string& text) {
  const std::size_t slash = text.find('/');
  if (slash == std::string::npos) {
    return std::stod(text);
  }
  const double num = std::stod(text.substr(0, slash));
  const double den = std::stod(text.substr(slash + 1));
  if (den == 0.0) {
    throw CLI::ValidationError("--c0", "zero denominator in " + text);
  }
  return num / den;
}

std::vector<double> parse_c0_list(const std::vector<std::string>& texts) {
  std::vector<double> out;
  for (const std::string& t : texts) {
    out.push_back(parse_c0(t));
  }
  return out;
}

riskbid::MarketModel fit_market_from(const riskbid::LogDataset& ds,
                                     std::optional<int> delta_max) {
  std::vector<int> prices;
  const Eigen::Index n = ds.train_count() > 0 ? ds.train_count() : ds.size();
  prices.reserve(n);
  int max_price = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    prices.push_back(ds.market_price[i]);
    max_price = std::max(max_price, ds.market_price[i]);
  }
  return riskbid::fit_market(prices, delta_max.value_or(max_price));
}

struct SynthArgs {
  std::string out_dir = ".";
  riskbid::SyntheticConfig cfg;
};

int run_synth(const SynthArgs& args) {
  namespace fs = std::filesystem;
  fs::create_directories(args.out_dir);
  const riskbid::LogDataset ds = riskbid::generate_synthetic(args.cfg);

  const std::string train_path = (fs::path(args.out_dir) / "train.csv").string();
  const std::string test_path = (fs::path(args.out_dir) / "test.csv").string();
  riskbid::write_log(ds, train_path, 0, ds.split);
  riskbid::write_log(ds, test_path, ds.split, ds.size());

  json manifest;
  manifest["seed"] = args.cfg.seed;
  manifest["n_train"] = args.cfg.n_train;
  manifest["n_test"] = args.cfg.n_test;
  manifest["n_features"] = args.cfg.n_features;
  manifest["delta_max"] = args.cfg.market.delta_max;
  manifest["cpm_train"] = ds.cpm_train();
  manifest["train_click_rate"] =
      ds.click.head(ds.split).cast<double>().mean();
  manifest["train_file"] = "train.csv";
  manifest["test_file"] = "test.csv";
  std::ofstream mf((fs::path(args.out_dir) / "manifest.json").string());
  mf << manifest.dump(2) << '\n';

  std::cout << "wrote " << train_path << " (" << ds.split << " records), "
            << test_path << " (" << ds.test_count() << " records)\n"
            << "cpm_train=" << ds.cpm_train() << '\n';
  return 0;
}

struct BuildDpArgs {
  std::string dataset;
  std::string out = "table.bin";
  std::string market_out;
  int horizon = 1000;
  std::string c0 = "1/2";
  std::optional<int> delta_max;
};

int run_build_dp(const BuildDpArgs& args) {
  const riskbid::LogDataset ds = riskbid::read_log(args.dataset);
  const riskbid::MarketModel market = fit_market_from(ds, args.delta_max);
  if (market.clamped > 0) {
    std::cerr << "warning: clamped " << market.clamped
              << " prices above delta_max\n";
  }
  const double r_avg = ds.r_mean.mean();
  const double cpm = ds.cpm_train();
  const std::int64_t budget =
      riskbid::allocate_budget(cpm, args.horizon, parse_c0(args.c0));
  const riskbid::ValueTable table = riskbid::build_table(
      market, r_avg, args.horizon, static_cast<int>(budget));
  riskbid::save_table(table, args.out);
  if (!args.market_out.empty()) {
    riskbid::write_market_csv(market, args.market_out);
  }
  std::cout << "built table T=" << args.horizon << " B=" << budget
            << " r_avg=" << r_avg << " -> " << args.out << '\n';
  return 0;
}

// --dataset accepts a directory produced by `synth` (train.csv + test.csv)
// or a single log file; explicit --train/--test win when both are given.
void resolve_dataset(const std::string& dataset, std::string& train,
                     std::string& test) {
  if (dataset.empty()) {
    return;
  }
  namespace fs = std::filesystem;
  if (fs::is_directory(dataset)) {
    if (train.empty()) train = (fs::path(dataset) / "train.csv").string();
    if (test.empty()) test = (fs::path(dataset) / "test.csv").string();
  } else if (train.empty()) {
    train = dataset;
  }
}

struct RunArgs {
  std::string dataset;
  std::string train;
  std::string test;
  std::string table_path;
  std::string model_path;
  std::string out = "report.csv";
  std::vector<std::string> strategies{"all"};
  std::vector<std::string> c0{"1/32", "1/16", "1/8", "1/4", "1/2"};
  int horizon = 1000;
  std::optional<double> alpha;
  std::optional<int> u_hat;
  double beta0 = -0.1;
  double r0_coef = 0.2;
  std::optional<double> lin_b0;
  std::optional<int> delta_max;
};

int run_run(const RunArgs& args_in) {
  RunArgs args = args_in;
  resolve_dataset(args.dataset, args.train, args.test);
  if (args.train.empty() || args.test.empty()) {
    throw std::runtime_error("run: need --dataset DIR or --train and --test");
  }
  const riskbid::LogDataset train = riskbid::read_log(args.train);
  const riskbid::LogDataset test = riskbid::read_log(args.test);
  const riskbid::LogDataset ds = riskbid::concat_datasets(train, test);

  std::vector<riskbid::StrategyKind> kinds;
  for (const std::string& name : args.strategies) {
    if (name == "all") {
      kinds = {riskbid::StrategyKind::Lin,    riskbid::StrategyKind::Rlb,
               riskbid::StrategyKind::EkRlb,  riskbid::StrategyKind::CrtRlb,
               riskbid::StrategyKind::CuRlb,  riskbid::StrategyKind::SsRlb};
      break;
    }
    kinds.push_back(riskbid::parse_strategy(name));
  }
  const bool wants_ssrlb =
      std::find(kinds.begin(), kinds.end(), riskbid::StrategyKind::SsRlb) !=
      kinds.end();
  if (wants_ssrlb && args.model_path.empty()) {
    // "all" quietly skips ssrlb when no model is supplied; an explicit
    // request without a model is an error handled by evaluate_suite.
    if (args.strategies.size() == 1 && args.strategies[0] == "all") {
      kinds.pop_back();
    }
  }

  const riskbid::MarketModel market = fit_market_from(ds, args.delta_max);
  const std::vector<double> c0s = parse_c0_list(args.c0);
  const double cpm = ds.cpm_train();

  std::int64_t budget_max = 0;
  for (double c0 : c0s) {
    budget_max =
        std::max(budget_max, riskbid::allocate_budget(cpm, args.horizon, c0));
  }

  riskbid::ValueTable table;
  if (!args.table_path.empty()) {
    table = riskbid::load_table(args.table_path);
    if (table.horizon != args.horizon || table.budget < budget_max) {
      throw std::runtime_error(
          "run: table grid does not cover the requested horizon/budget");
    }
  } else {
    table = riskbid::build_table(market,
                                 ds.r_mean.head(ds.train_count()).mean(),
                                 args.horizon, static_cast<int>(budget_max));
  }

  std::optional<riskbid::RiskNet> net;
  if (!args.model_path.empty()) {
    net = riskbid::RiskNet::load(args.model_path);
  }

  riskbid::SuiteContext ctx;
  ctx.market = &market;
  ctx.table = &table;
  ctx.horizon = args.horizon;
  ctx.cpm_train = cpm;
  ctx.lin_b0 = args.lin_b0;
  ctx.beta0 = args.beta0;
  ctx.r0_coef = args.r0_coef;
  ctx.net = net ? &*net : nullptr;
  if (args.alpha && args.u_hat) {
    ctx.expert = riskbid::ExpertParams{*args.alpha, *args.u_hat};
  } else if (args.alpha) {
    // Alpha pinned, u_hat from the tuner's median visited richness.
    riskbid::ExpertParams tuned = riskbid::tune_expert(
        ds, market, table, args.horizon,
        riskbid::allocate_budget(cpm, args.horizon, c0s.back()));
    ctx.expert = riskbid::ExpertParams{*args.alpha, tuned.u_hat};
  } else if (args.u_hat) {
    ctx.expert = riskbid::ExpertParams{0.1, *args.u_hat};
  }

  const std::vector<riskbid::SuiteRow> rows =
      riskbid::evaluate_suite(ds, kinds, c0s, ctx);
  riskbid::write_report_csv(rows, args.out);
  std::cout << riskbid::format_summary(rows) << "report -> " << args.out
            << '\n';
  return 0;
}

struct TrainSsArgs {
  std::string dataset;
  std::string train;
  std::string test;
  std::string table_path;
  std::string out = "risknet.bin";
  std::string curve = "curve.csv";
  int horizon = 1000;
  std::string c0 = "1/2";
  riskbid::SsrlConfig cfg;
  bool rebuild_table = false;
  std::optional<int> delta_max;
};

int run_train_ss(const TrainSsArgs& args_in) {
  TrainSsArgs args = args_in;
  resolve_dataset(args.dataset, args.train, args.test);
  if (args.train.empty()) {
    throw std::runtime_error("train-ss: need --dataset or --train");
  }
  riskbid::LogDataset ds = riskbid::read_log(args.train);
  if (!args.test.empty()) {
    const riskbid::LogDataset test = riskbid::read_log(args.test);
    ds = riskbid::concat_datasets(ds, test);
  }
  const riskbid::MarketModel market = fit_market_from(ds, args.delta_max);
  const double cpm = ds.cpm_train();
  const std::int64_t budget =
      riskbid::allocate_budget(cpm, args.horizon, parse_c0(args.c0));

  riskbid::ValueTable table;
  if (!args.table_path.empty()) {
    table = riskbid::load_table(args.table_path);
    if (table.horizon != args.horizon || table.budget < budget) {
      throw std::runtime_error(
          "train-ss: table grid does not cover the requested horizon/budget");
    }
  } else {
    table = riskbid::build_table(market,
                                 ds.r_mean.head(ds.train_count()).mean(),
                                 args.horizon, static_cast<int>(budget));
  }

  riskbid::SsrlConfig cfg = args.cfg;
  if (args.rebuild_table && cfg.table_rebuild_period == 0) {
    cfg.table_rebuild_period = 50;
  }
  const riskbid::SsrlResult result =
      riskbid::train_ssrlb(ds, market, table, budget, cfg);
  result.net.save(args.out);

  std::ofstream curve(args.curve, std::ios::binary);
  curve << "episode,buffer_min,greedy_eval\n";
  curve.precision(12);
  for (const riskbid::TrainCurveRow& row : result.curve) {
    curve << row.episode << ',' << row.buffer_min << ',' << row.greedy_eval
          << '\n';
  }
  std::cout << "trained " << cfg.episodes << " episodes -> " << args.out
            << " (curve " << args.curve << ")\n";
  return 0;
}

struct BetaGridArgs {
  std::string kind = "expert";
  std::string dataset;
  std::string train;
  std::string model_path;
  std::string out = "beta_grid.csv";
  int horizon = 1000;
  std::string c0 = "1/2";
  double alpha = 0.1;
  int u_hat = 1;
  int t_stride = 1;
  int b_stride = 1;
  std::optional<int> delta_max;
};

int run_beta_grid(const BetaGridArgs& args_in) {
  BetaGridArgs args = args_in;
  std::string unused_test;
  resolve_dataset(args.dataset, args.train, unused_test);
  std::ofstream out(args.out, std::ios::binary);
  if (!out) {
    throw std::runtime_error("beta-grid: cannot open " + args.out);
  }
  if (args.kind == "expert") {
    if (args.train.empty()) {
      throw std::runtime_error("beta-grid: expert kind needs --dataset/--train");
    }
    const riskbid::LogDataset ds = riskbid::read_log(args.train);
    const riskbid::MarketModel market = fit_market_from(ds, args.delta_max);
    const std::int64_t budget = riskbid::allocate_budget(
        ds.cpm_train(), args.horizon, parse_c0(args.c0));
    const riskbid::RiskTendency tendency =
        riskbid::RiskTendency::expert(market, args.alpha, args.u_hat);
    riskbid::write_beta_grid_csv(tendency, args.horizon,
                                 static_cast<int>(budget), out, args.t_stride,
                                 args.b_stride);
  } else if (args.kind == "learned") {
    const riskbid::RiskNet net = riskbid::RiskNet::load(args.model_path);
    const riskbid::RiskTendency tendency = riskbid::RiskTendency::learned(net);
    riskbid::write_beta_grid_csv(tendency, net.horizon(), net.budget(), out,
                                 args.t_stride, args.b_stride);
  } else {
    throw CLI::ValidationError("--kind", "expected expert or learned");
  }
  std::cout << "beta grid -> " << args.out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"risk-aware real-time bidding toolkit"};
  app.require_subcommand(1);

  SynthArgs synth;
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "generate a synthetic benchmark dataset");
  synth_cmd->add_option("--out", synth.out_dir, "output directory")
      ->required();
  synth_cmd->add_option("--n-features", synth.cfg.n_features);
  synth_cmd->add_option("--n-train", synth.cfg.n_train);
  synth_cmd->add_option("--n-test", synth.cfg.n_test);
  synth_cmd->add_option("--weight-scale", synth.cfg.true_weight_scale);
  synth_cmd->add_option("--bias-weight", synth.cfg.bias_weight);
  synth_cmd->add_option("--segment-weight", synth.cfg.segment_weight);
  synth_cmd->add_option("--rare-min", synth.cfg.rare_features_min);
  synth_cmd->add_option("--rare-max", synth.cfg.rare_features_max);
  synth_cmd->add_option("--zipf", synth.cfg.zipf_exponent);
  synth_cmd->add_option("--prior-variance", synth.cfg.prior_variance);
  synth_cmd->add_option("--delta-max", synth.cfg.market.delta_max);
  synth_cmd->add_option("--seed", synth.cfg.seed);

  BuildDpArgs build_dp;
  CLI::App* build_cmd =
      app.add_subcommand("build-dp", "fit the market and build a value table");
  build_cmd->add_option("--dataset", build_dp.dataset, "training log CSV")
      ->required();
  build_cmd->add_option("--out", build_dp.out);
  build_cmd->add_option("--market-out", build_dp.market_out,
                        "also dump the fitted market CSV");
  build_cmd->add_option("--T", build_dp.horizon);
  build_cmd->add_option("--c0", build_dp.c0);
  build_cmd->add_option("--delta-max", build_dp.delta_max);

  RunArgs run;
  CLI::App* run_cmd =
      app.add_subcommand("run", "evaluate bidding strategies on a test log");
  run_cmd->add_option("--dataset", run.dataset,
                      "synth output directory (train.csv + test.csv)");
  run_cmd->add_option("--train", run.train, "training log CSV");
  run_cmd->add_option("--test", run.test, "test log CSV");
  run_cmd->add_option("--table", run.table_path, "value table file");
  run_cmd->add_option("--model", run.model_path, "trained tendency net");
  run_cmd->add_option("--out", run.out);
  run_cmd->add_option("--strategy", run.strategies,
                      "strategies to run (or `all`)");
  run_cmd->add_option("--c0", run.c0, "budget coefficients");
  run_cmd->add_option("--T", run.horizon);
  run_cmd
      ->add_option("--alpha", [&run](const CLI::results_t& r) {
        run.alpha = std::stod(r[0]);
        return true;
      })
      ->type_name("FLOAT");
  run_cmd
      ->add_option("--u-hat", [&run](const CLI::results_t& r) {
        run.u_hat = std::stoi(r[0]);
        return true;
      })
      ->type_name("INT");
  run_cmd->add_option("--beta0", run.beta0);
  run_cmd->add_option("--r0-coef", run.r0_coef);
  run_cmd
      ->add_option("--lin-b0", [&run](const CLI::results_t& r) {
        run.lin_b0 = std::stod(r[0]);
        return true;
      })
      ->type_name("FLOAT");
  run_cmd->add_option("--delta-max", run.delta_max);

  TrainSsArgs train_ss;
  CLI::App* train_cmd = app.add_subcommand(
      "train-ss", "self-supervised risk tendency training");
  train_cmd->add_option("--dataset", train_ss.dataset,
                        "synth output directory");
  train_cmd->add_option("--train", train_ss.train, "training log CSV");
  train_cmd->add_option("--test", train_ss.test,
                        "held-out log CSV for the greedy curve");
  train_cmd->add_option("--table", train_ss.table_path);
  train_cmd->add_option("--out", train_ss.out);
  train_cmd->add_option("--curve", train_ss.curve);
  train_cmd->add_option("--T", train_ss.horizon);
  train_cmd->add_option("--c0", train_ss.c0);
  train_cmd->add_option("--episodes", train_ss.cfg.episodes);
  train_cmd->add_option("--sigma", train_ss.cfg.sigma_start);
  train_cmd->add_option("--sigma-end", train_ss.cfg.sigma_end);
  train_cmd->add_option("--buffer-size", train_ss.cfg.buffer_capacity);
  train_cmd->add_option("--batch-size", train_ss.cfg.batch_size);
  train_cmd->add_option("--lr", train_ss.cfg.learning_rate);
  train_cmd->add_option("--update-period", train_ss.cfg.buffer_update_period);
  train_cmd->add_option("--steps-per-update", train_ss.cfg.steps_per_update);
  train_cmd->add_option("--seed", train_ss.cfg.seed);
  train_cmd->add_flag("--rebuild-table", train_ss.rebuild_table,
                      "periodically rebuild the value table from the "
                      "tendency-adjusted average value");
  train_cmd->add_option("--rebuild-period", train_ss.cfg.table_rebuild_period);
  train_cmd->add_option("--delta-max", train_ss.delta_max);

  BetaGridArgs beta_grid;
  CLI::App* grid_cmd =
      app.add_subcommand("beta-grid", "export a risk tendency grid as CSV");
  grid_cmd->add_option("--kind", beta_grid.kind, "expert | learned");
  grid_cmd->add_option("--dataset", beta_grid.dataset,
                       "synth output directory (expert kind)");
  grid_cmd->add_option("--train", beta_grid.train,
                       "training log CSV (expert kind)");
  grid_cmd->add_option("--model", beta_grid.model_path,
                       "net file (learned kind)");
  grid_cmd->add_option("--out", beta_grid.out);
  grid_cmd->add_option("--T", beta_grid.horizon);
  grid_cmd->add_option("--c0", beta_grid.c0);
  grid_cmd->add_option("--alpha", beta_grid.alpha);
  grid_cmd->add_option("--u-hat", beta_grid.u_hat);
  grid_cmd->add_option("--t-stride", beta_grid.t_stride);
  grid_cmd->add_option("--b-stride", beta_grid.b_stride);
  grid_cmd->add_option("--delta-max", beta_grid.delta_max);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage error
  }

  try {
    if (synth_cmd->parsed()) return run_synth(synth);
    if (build_cmd->parsed()) return run_build_dp(build_dp);
    if (run_cmd->parsed()) return run_run(run);
    if (train_cmd->parsed()) return run_train_ss(train_ss);
    if (grid_cmd->parsed()) return run_beta_grid(beta_grid);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
