#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "riskbid/data.hpp"
#include "riskbid/dp.hpp"
#include "riskbid/market.hpp"
#include "riskbid/mlp.hpp"
#include "riskbid/replay.hpp"

namespace riskbid {

// Explored risk tendency: the net's output plus Gaussian noise of standard
// deviation sigma. Deterministic given the engine state (or seed).
double explore(const RiskNet& net, int t, std::int64_t b, double sigma,
               std::mt19937_64& rng);
double explore(const RiskNet& net, int t, std::int64_t b, double sigma,
               std::uint64_t rng_seed);

// One Adam step on the mean squared residual between the net and the
// explored tendencies in the batch; returns the pre-step loss. Throws on an
// empty batch.
double train_step(RiskNet& net, std::span<const Experience> batch,
                  double learning_rate);

enum class RewardMode { PredictedValue, Clicks };

struct SsrlConfig {
  int episodes = 2000;
  double sigma_start = 0.1;  // linear decay across episodes
  double sigma_end = 0.01;
  std::size_t buffer_capacity = 100000;  // counted in experiences
  int batch_size = 32;
  double learning_rate = 1e-3;
  int buffer_update_period = 5;  // train every this many episodes
  int steps_per_update = 10;
  // 0 keeps the value table fixed; otherwise the table is rebuilt every
  // this many episodes from the tendency-adjusted average value.
  int table_rebuild_period = 0;
  RewardMode reward = RewardMode::PredictedValue;
  std::uint64_t seed = 1;
  int curve_eval_period = 100;   // greedy held-out evaluation cadence
  int curve_eval_episodes = 5;
};

struct TrainCurveRow {
  int episode = 0;
  double buffer_min = 0.0;
  double greedy_eval = 0.0;  // latest held-out greedy reward
};

struct SsrlResult {
  RiskNet net;
  std::vector<TrainCurveRow> curve;
};

// Self-supervised risk tendency training: per episode, bid the training
// stream with explored tendencies, record (t, b, beta_hat) states, admit the
// episode into the reward-ranked buffer, and periodically fit the net to
// uniform batches. Training episodes cycle over the training range; greedy
// evaluations use the held-out range when one exists. `table` is mutated
// only when table_rebuild_period > 0.
SsrlResult train_ssrlb(const LogDataset& ds, const MarketModel& market,
                       ValueTable& table, std::int64_t budget,
                       const SsrlConfig& config);

}  // namespace riskbid
