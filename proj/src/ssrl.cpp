#include "riskbid/ssrl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "riskbid/risk.hpp"
#include "riskbid/sim.hpp"

namespace riskbid {

double explore(const RiskNet& net, int t, std::int64_t b, double sigma,
               std::mt19937_64& rng) {
  if (!(sigma >= 0.0)) {
    throw std::invalid_argument("explore: sigma must be >= 0");
  }
  const double base = net(t, b);
  if (sigma == 0.0) {
    return base;
  }
  std::normal_distribution<double> noise(0.0, sigma);
  return base + noise(rng);
}

double explore(const RiskNet& net, int t, std::int64_t b, double sigma,
               std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  return explore(net, t, b, sigma, rng);
}

double train_step(RiskNet& net, std::span<const Experience> batch,
                  double learning_rate) {
  if (batch.empty()) {
    throw std::invalid_argument("train_step: empty batch");
  }
  Eigen::Matrix2Xd states(2, static_cast<Eigen::Index>(batch.size()));
  Eigen::VectorXd targets(static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    states(0, static_cast<Eigen::Index>(i)) = static_cast<double>(batch[i].t);
    states(1, static_cast<Eigen::Index>(i)) = static_cast<double>(batch[i].b);
    targets[static_cast<Eigen::Index>(i)] = batch[i].beta_hat;
  }
  Eigen::VectorXd grad;
  const double loss = net.loss_and_gradient(states, targets, grad);
  net.adam_step(grad, learning_rate);
  return loss;
}

namespace {

struct ExploredEpisode {
  std::vector<StateBeta> states;
  double reward = 0.0;
};

ExploredEpisode run_explored_episode(const LogDataset& ds, Eigen::Index start,
                                     int horizon, const RiskNet& net,
                                     const ValueTable& table,
                                     std::int64_t budget, double sigma,
                                     RewardMode mode, std::mt19937_64& rng) {
  ExploredEpisode ep;
  ep.states.reserve(horizon);
  std::int64_t b = budget;
  for (int i = 0; i < horizon; ++i) {
    const int t = horizon - i;
    const AuctionRecord rec = ds.record(start + i);
    const double beta_hat = explore(net, t, b, sigma, rng);
    ep.states.push_back(StateBeta{t, b, beta_hat});

    const double theta = rec.r_mean + beta_hat * rec.r_std;
    const std::int64_t price = bid_price(table, theta, t, b).price;
    if (auction_won(price, rec.market_price)) {
      b -= rec.market_price;
      ep.reward += mode == RewardMode::PredictedValue
                       ? rec.r_mean
                       : static_cast<double>(rec.click);
    }
  }
  return ep;
}

double greedy_eval(const LogDataset& ds, Eigen::Index begin, int episodes,
                   int horizon, const RiskNet& net, const ValueTable& table,
                   std::int64_t budget, RewardMode mode) {
  Strategy s;
  s.kind = StrategyKind::SsRlb;
  s.tendency = RiskTendency::learned(net);
  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    const EpisodeResult r =
        run_episode(ds, begin + static_cast<Eigen::Index>(e) * horizon,
                    horizon, s, table, budget);
    total += mode == RewardMode::PredictedValue
                 ? r.cumulative_value
                 : static_cast<double>(r.clicks);
  }
  return total / static_cast<double>(episodes);
}

}  // namespace

SsrlResult train_ssrlb(const LogDataset& ds, const MarketModel& market,
                       ValueTable& table, std::int64_t budget,
                       const SsrlConfig& config) {
  const int horizon = table.horizon;
  if (config.episodes < 0 || config.batch_size < 1 ||
      config.buffer_update_period < 1 || config.steps_per_update < 1 ||
      !(config.learning_rate > 0.0) || !(config.sigma_start >= 0.0) ||
      !(config.sigma_end >= 0.0)) {
    throw std::invalid_argument("train_ssrlb: bad config");
  }
  if (budget < 1 || budget > table.budget) {
    throw std::invalid_argument("train_ssrlb: budget outside table grid");
  }
  const Eigen::Index usable = (ds.train_count() / horizon) * horizon;
  if (usable < horizon) {
    throw std::invalid_argument(
        "train_ssrlb: training range holds no complete episode");
  }

  // Held-out episodes for the greedy curve; fall back to the training
  // stream when the dataset has no evaluation range.
  const Eigen::Index heldout_episodes =
      std::min<Eigen::Index>(config.curve_eval_episodes,
                             ds.test_count() / horizon);
  const Eigen::Index eval_begin = heldout_episodes > 0 ? ds.split : 0;
  const Eigen::Index eval_count =
      heldout_episodes > 0 ? heldout_episodes
                           : std::min<Eigen::Index>(config.curve_eval_episodes,
                                                    usable / horizon);

  SsrlResult result{RiskNet(horizon, static_cast<int>(budget), config.seed),
                    {}};
  ExperienceBuffer buffer(config.buffer_capacity);
  std::mt19937_64 rng(config.seed ^ 0xda3e39cb94b95bdbull);

  double last_eval = greedy_eval(ds, eval_begin, static_cast<int>(eval_count),
                                 horizon, result.net, table, budget,
                                 config.reward);
  result.curve.reserve(config.episodes);

  for (int episode = 1; episode <= config.episodes; ++episode) {
    const double frac =
        config.episodes > 1
            ? static_cast<double>(episode - 1) /
                  static_cast<double>(config.episodes - 1)
            : 0.0;
    const double sigma =
        config.sigma_start + (config.sigma_end - config.sigma_start) * frac;

    const Eigen::Index start =
        (static_cast<Eigen::Index>(episode - 1) * horizon) % usable;
    const ExploredEpisode ep =
        run_explored_episode(ds, start, horizon, result.net, table, budget,
                             sigma, config.reward, rng);
    buffer.insert_episode(ep.states, ep.reward);

    if (episode % config.buffer_update_period == 0 && !buffer.empty()) {
      for (int s = 0; s < config.steps_per_update; ++s) {
        const std::vector<Experience> batch =
            buffer.sample(static_cast<std::size_t>(config.batch_size), rng);
        train_step(result.net, batch, config.learning_rate);
      }
    }

    if (config.table_rebuild_period > 0 &&
        episode % config.table_rebuild_period == 0) {
      // Tendency-adjusted average value over a coarse state lattice.
      double beta_sum = 0.0;
      int beta_n = 0;
      for (int ti = 1; ti <= 16; ++ti) {
        for (int bi = 0; bi <= 16; ++bi) {
          const int t = std::max(1, ti * horizon / 16);
          const std::int64_t b = bi * budget / 16;
          beta_sum += result.net(t, b);
          ++beta_n;
        }
      }
      const double beta_avg = beta_sum / beta_n;
      const double r_avg = std::clamp(
          ds.r_mean.head(ds.train_count()).mean() +
              beta_avg * ds.r_std.head(ds.train_count()).mean(),
          0.0, 1.0);
      table = build_table(market, r_avg, table.horizon, table.budget);
    }

    const bool eval_now = episode % config.curve_eval_period == 0 ||
                          episode == config.episodes;
    if (eval_now) {
      last_eval = greedy_eval(ds, eval_begin, static_cast<int>(eval_count),
                              horizon, result.net, table, budget,
                              config.reward);
    }
    result.curve.push_back(TrainCurveRow{
        episode, buffer.min_reward().value_or(0.0), last_eval});
  }
  return result;
}

}  // namespace riskbid
