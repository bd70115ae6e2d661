#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riskbid/data.hpp"
#include "riskbid/dp.hpp"
#include "riskbid/market.hpp"
#include "riskbid/mlp.hpp"
#include "riskbid/risk.hpp"

namespace riskbid {

enum class StrategyKind { Lin, Rlb, EkRlb, SsRlb, CrtRlb, CuRlb };

std::string strategy_name(StrategyKind kind);
StrategyKind parse_strategy(const std::string& name);

// Per-episode bidding behaviour. Lin prices directly at b0 * r_mean; the
// other strategies route an adjusted value through the dp bid rule, with
// CuRlb substituting the constant uncertainty r0 for the per-request r_std.
struct Strategy {
  StrategyKind kind = StrategyKind::Rlb;
  double b0 = 0.0;                               // Lin
  RiskTendency tendency = RiskTendency::zero();  // EkRlb/SsRlb/CrtRlb/CuRlb
  double r0 = 0.0;                               // CuRlb
};

struct EpisodeResult {
  long long clicks = 0;
  long long wins = 0;
  long long spend = 0;
  double cumulative_value = 0.0;  // sum of r_mean over won auctions
  double consumption_ratio = 0.0;
};

// Second-price win rule: a tie with the market price wins and pays it.
inline bool auction_won(std::int64_t bid, int market_price) {
  return bid >= market_price;
}

// Episode budget from the training cost level: B = cpm * 1e-3 * T * c0,
// rounded, floored at 1. Throws on nonpositive inputs.
std::int64_t allocate_budget(double cpm_train, int horizon, double c0);

// Runs `horizon` consecutive auctions starting at row `start` against one
// shared budget. Deterministic. Throws when fewer than `horizon` records
// remain or the table grid cannot cover (horizon, budget).
EpisodeResult run_episode(const LogDataset& ds, Eigen::Index start,
                          int horizon, const Strategy& strategy,
                          const ValueTable& table, std::int64_t budget);

// Log-spaced b0 grid centered where the average bid matches the average
// market price.
std::vector<double> default_lin_grid(const LogDataset& ds);

// Grid search maximizing total training clicks under the episode budget;
// ties resolve to the smallest b0. Throws when the training range holds no
// complete episode.
double tune_lin(const LogDataset& ds, int horizon, std::int64_t budget,
                std::span<const double> candidates = {});

struct ExpertParams {
  double alpha = 0.1;
  int u_hat = 1;
};

// Tunes (alpha, u_hat) for the expert tendency on the training range:
// u_hat candidates are quantiles of the budget-richness values visited by
// the tendency-free policy, alpha sweeps the fixed grid.
ExpertParams tune_expert(const LogDataset& ds, const MarketModel& market,
                         const ValueTable& table, int horizon,
                         std::int64_t budget);

struct SuiteRow {
  StrategyKind kind = StrategyKind::Rlb;
  double c0 = 0.0;
  long long clicks = 0;
  long long wins = 0;
  long long spend = 0;
  double consumption_ratio = 0.0;
  double cumulative_value = 0.0;
};

// Shared inputs for a comparison run. Expert parameters and the Lin b0 are
// tuned from the training range when not pinned. `net` is required only
// when the self-supervised strategy is requested.
struct SuiteContext {
  const MarketModel* market = nullptr;
  const ValueTable* table = nullptr;
  int horizon = 1000;
  double cpm_train = 0.0;
  std::optional<double> lin_b0;
  std::optional<ExpertParams> expert;
  double beta0 = -0.1;
  double r0_coef = 0.2;
  const RiskNet* net = nullptr;
};

// Runs every requested strategy over every complete evaluation episode for
// every budget coefficient. Row order: c0-major, then strategy order as
// given.
std::vector<SuiteRow> evaluate_suite(const LogDataset& ds,
                                     std::span<const StrategyKind> kinds,
                                     std::span<const double> c0s,
                                     const SuiteContext& ctx);

// CSV schema: strategy,c0,clicks,wins,spend,consumption_ratio,cumulative_value
void write_report_csv(std::span<const SuiteRow> rows, std::ostream& out);
void write_report_csv(std::span<const SuiteRow> rows, const std::string& path);

// Text table per c0 with click deltas against Lin when Lin is present.
std::string format_summary(std::span<const SuiteRow> rows);

}  // namespace riskbid
