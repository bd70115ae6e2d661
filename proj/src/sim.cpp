#include "riskbid/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace riskbid {

std::string strategy_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::Lin:
      return "lin";
    case StrategyKind::Rlb:
      return "rlb";
    case StrategyKind::EkRlb:
      return "ekrlb";
    case StrategyKind::SsRlb:
      return "ssrlb";
    case StrategyKind::CrtRlb:
      return "crtrlb";
    case StrategyKind::CuRlb:
      return "curlb";
  }
  return "rlb";
}

StrategyKind parse_strategy(const std::string& name) {
  if (name == "lin") return StrategyKind::Lin;
  if (name == "rlb") return StrategyKind::Rlb;
  if (name == "ekrlb") return StrategyKind::EkRlb;
  if (name == "ssrlb") return StrategyKind::SsRlb;
  if (name == "crtrlb") return StrategyKind::CrtRlb;
  if (name == "curlb") return StrategyKind::CuRlb;
  throw std::invalid_argument("unknown strategy: " + name);
}

std::int64_t allocate_budget(double cpm_train, int horizon, double c0) {
  if (!(cpm_train > 0.0) || horizon < 1 || !(c0 > 0.0)) {
    throw std::invalid_argument("allocate_budget: nonpositive input");
  }
  const double raw = cpm_train * 1e-3 * static_cast<double>(horizon) * c0;
  return std::max<std::int64_t>(1, std::llround(raw));
}

EpisodeResult run_episode(const LogDataset& ds, Eigen::Index start,
                          int horizon, const Strategy& strategy,
                          const ValueTable& table, std::int64_t budget) {
  if (start < 0 || start + horizon > ds.size()) {
    throw std::invalid_argument("run_episode: record stream shorter than T");
  }
  // Lin never consults the value table; only dp-routed strategies need the
  // grid to cover the episode.
  if (strategy.kind != StrategyKind::Lin &&
      (horizon > table.horizon || budget > table.budget)) {
    throw std::invalid_argument("run_episode: table grid too small");
  }

  EpisodeResult result;
  std::int64_t b = budget;
  for (int i = 0; i < horizon; ++i) {
    const int t = horizon - i;
    const AuctionRecord rec = ds.record(start + i);

    std::int64_t price = 0;
    if (strategy.kind == StrategyKind::Lin) {
      price = std::llround(strategy.b0 * rec.r_mean);
      price = std::clamp<std::int64_t>(price, 0, b);
    } else {
      const double uncertainty =
          strategy.kind == StrategyKind::CuRlb ? strategy.r0 : rec.r_std;
      const double theta =
          rec.r_mean + strategy.tendency(t, b) * uncertainty;
      price = bid_price(table, theta, t, b).price;
    }

    if (auction_won(price, rec.market_price)) {
      b -= rec.market_price;
      result.spend += rec.market_price;
      result.wins += 1;
      result.clicks += rec.click;
      result.cumulative_value += rec.r_mean;
    }
  }
  result.consumption_ratio =
      budget > 0 ? static_cast<double>(result.spend) /
                       static_cast<double>(budget)
                 : 0.0;
  return result;
}

std::vector<double> default_lin_grid(const LogDataset& ds) {
  const Eigen::Index n = ds.train_count() > 0 ? ds.train_count() : ds.size();
  if (n == 0) {
    throw std::invalid_argument("default_lin_grid: empty dataset");
  }
  const double avg_price =
      ds.market_price.head(n).cast<double>().mean();
  const double avg_value = ds.r_mean.head(n).mean();
  const double center =
      avg_value > 0.0 ? std::max(1.0, avg_price) / avg_value : 1.0;
  std::vector<double> grid;
  grid.reserve(17);
  for (int k = -8; k <= 8; ++k) {
    grid.push_back(center * std::pow(2.0, k));
  }
  return grid;
}

double tune_lin(const LogDataset& ds, int horizon, std::int64_t budget,
                std::span<const double> candidates) {
  const Eigen::Index train = ds.train_count();
  const Eigen::Index episodes = train / horizon;
  if (episodes < 1) {
    throw std::invalid_argument("tune_lin: empty training set");
  }
  std::vector<double> fallback;
  if (candidates.empty()) {
    fallback = default_lin_grid(ds);
    candidates = fallback;
  }

  const ValueTable stub{};  // Lin ignores the value table

  double best_b0 = candidates[0];
  long long best_clicks = -1;
  for (double b0 : candidates) {
    Strategy s;
    s.kind = StrategyKind::Lin;
    s.b0 = b0;
    long long clicks = 0;
    for (Eigen::Index e = 0; e < episodes; ++e) {
      clicks += run_episode(ds, e * horizon, horizon, s, stub, budget).clicks;
    }
    if (clicks > best_clicks ||
        (clicks == best_clicks && b0 < best_b0)) {
      best_clicks = clicks;
      best_b0 = b0;
    }
  }
  return best_b0;
}

ExpertParams tune_expert(const LogDataset& ds, const MarketModel& market,
                         const ValueTable& table, int horizon,
                         std::int64_t budget) {
  const Eigen::Index episodes = ds.train_count() / horizon;
  if (episodes < 1) {
    throw std::invalid_argument("tune_expert: empty training set");
  }

  // Budget-richness values visited by the tendency-free policy.
  std::vector<int> visited;
  visited.reserve(static_cast<std::size_t>(episodes) * horizon);
  {
    Strategy rlb;
    rlb.kind = StrategyKind::Rlb;
    for (Eigen::Index e = 0; e < episodes; ++e) {
      std::int64_t b = budget;
      const Eigen::Index start = e * horizon;
      for (int i = 0; i < horizon; ++i) {
        const int t = horizon - i;
        visited.push_back(budget_richness(market, t, b));
        const AuctionRecord rec = ds.record(start + i);
        const std::int64_t price = bid_price(table, rec.r_mean, t, b).price;
        if (auction_won(price, rec.market_price)) {
          b -= rec.market_price;
        }
      }
    }
  }
  std::sort(visited.begin(), visited.end());
  const auto quantile = [&](double q) {
    const std::size_t idx = static_cast<std::size_t>(
        q * static_cast<double>(visited.size() - 1));
    return std::max(1, visited[idx]);
  };
  std::vector<int> u_hats;
  for (double q : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    const int u = quantile(q);
    if (std::find(u_hats.begin(), u_hats.end(), u) == u_hats.end()) {
      u_hats.push_back(u);
    }
  }

  static constexpr double kAlphas[] = {0.001, 0.01, 0.1, 0.2, 0.3, 0.4, 0.5};
  ExpertParams best;
  long long best_clicks = -1;
  for (int u_hat : u_hats) {
    for (double alpha : kAlphas) {
      Strategy s;
      s.kind = StrategyKind::EkRlb;
      s.tendency = RiskTendency::expert(market, alpha, u_hat);
      long long clicks = 0;
      for (Eigen::Index e = 0; e < episodes; ++e) {
        clicks +=
            run_episode(ds, e * horizon, horizon, s, table, budget).clicks;
      }
      if (clicks > best_clicks) {
        best_clicks = clicks;
        best = ExpertParams{alpha, u_hat};
      }
    }
  }
  return best;
}

std::vector<SuiteRow> evaluate_suite(const LogDataset& ds,
                                     std::span<const StrategyKind> kinds,
                                     std::span<const double> c0s,
                                     const SuiteContext& ctx) {
  if (ctx.market == nullptr || ctx.table == nullptr) {
    throw std::invalid_argument("evaluate_suite: missing market or table");
  }
  const int horizon = ctx.horizon;
  const Eigen::Index eval_begin = ds.split;
  const Eigen::Index episodes = ds.test_count() / horizon;
  if (episodes < 1) {
    throw std::invalid_argument(
        "evaluate_suite: no complete evaluation episode");
  }

  const bool wants_ssrlb =
      std::find(kinds.begin(), kinds.end(), StrategyKind::SsRlb) !=
      kinds.end();
  if (wants_ssrlb && ctx.net == nullptr) {
    throw std::invalid_argument("evaluate_suite: ssrlb requested without net");
  }

  const double avg_train_std =
      ds.train_count() > 0 ? ds.r_std.head(ds.train_count()).mean()
                           : ds.r_std.mean();

  std::vector<SuiteRow> rows;
  rows.reserve(kinds.size() * c0s.size());
  for (double c0 : c0s) {
    const std::int64_t budget = allocate_budget(ctx.cpm_train, horizon, c0);
    if (budget > ctx.table->budget) {
      throw std::invalid_argument(
          "evaluate_suite: table budget axis too small for c0=" +
          std::to_string(c0));
    }

    std::optional<double> lin_b0 = ctx.lin_b0;
    std::optional<ExpertParams> expert = ctx.expert;
    for (StrategyKind kind : kinds) {
      Strategy s;
      s.kind = kind;
      switch (kind) {
        case StrategyKind::Lin:
          if (!lin_b0) {
            lin_b0 = tune_lin(ds, horizon, budget);
          }
          s.b0 = *lin_b0;
          break;
        case StrategyKind::Rlb:
          break;
        case StrategyKind::EkRlb:
        case StrategyKind::CuRlb:
          if (!expert) {
            expert = tune_expert(ds, *ctx.market, *ctx.table, horizon, budget);
          }
          s.tendency =
              RiskTendency::expert(*ctx.market, expert->alpha, expert->u_hat);
          if (kind == StrategyKind::CuRlb) {
            s.r0 = ctx.r0_coef * avg_train_std;
          }
          break;
        case StrategyKind::SsRlb:
          s.tendency = RiskTendency::learned(*ctx.net);
          break;
        case StrategyKind::CrtRlb:
          s.tendency = ctx.beta0 == 0.0 ? RiskTendency::zero()
                                        : RiskTendency::constant(ctx.beta0);
          break;
      }

      SuiteRow row;
      row.kind = kind;
      row.c0 = c0;
      for (Eigen::Index e = 0; e < episodes; ++e) {
        const EpisodeResult r = run_episode(ds, eval_begin + e * horizon,
                                            horizon, s, *ctx.table, budget);
        row.clicks += r.clicks;
        row.wins += r.wins;
        row.spend += r.spend;
        row.cumulative_value += r.cumulative_value;
      }
      row.consumption_ratio =
          static_cast<double>(row.spend) /
          (static_cast<double>(episodes) * static_cast<double>(budget));
      rows.push_back(row);
    }
  }
  return rows;
}

void write_report_csv(std::span<const SuiteRow> rows, std::ostream& out) {
  out << "strategy,c0,clicks,wins,spend,consumption_ratio,cumulative_value\n";
  out.precision(12);
  for (const SuiteRow& row : rows) {
    out << strategy_name(row.kind) << ',' << row.c0 << ',' << row.clicks
        << ',' << row.wins << ',' << row.spend << ','
        << row.consumption_ratio << ',' << row.cumulative_value << '\n';
  }
}

void write_report_csv(std::span<const SuiteRow> rows,
                      const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("write_report_csv: cannot open " + path);
  }
  write_report_csv(rows, out);
}

std::string format_summary(std::span<const SuiteRow> rows) {
  std::map<double, long long> lin_clicks;
  for (const SuiteRow& row : rows) {
    if (row.kind == StrategyKind::Lin) {
      lin_clicks[row.c0] = row.clicks;
    }
  }
  std::ostringstream out;
  out.precision(4);
  out << "strategy   c0        clicks   wins     consumption  vs_lin\n";
  for (const SuiteRow& row : rows) {
    out << strategy_name(row.kind);
    out << std::string(11 - strategy_name(row.kind).size(), ' ');
    std::ostringstream c0s;
    c0s.precision(4);
    c0s << row.c0;
    out << c0s.str() << std::string(std::max<std::size_t>(
                            1, 10 - c0s.str().size()), ' ');
    std::string clicks = std::to_string(row.clicks);
    out << clicks << std::string(std::max<std::size_t>(1, 9 - clicks.size()),
                                 ' ');
    std::string wins = std::to_string(row.wins);
    out << wins << std::string(std::max<std::size_t>(1, 9 - wins.size()), ' ');
    std::ostringstream cons;
    cons.precision(4);
    cons << 100.0 * row.consumption_ratio << '%';
    out << cons.str()
        << std::string(std::max<std::size_t>(1, 13 - cons.str().size()), ' ');
    const auto it = lin_clicks.find(row.c0);
    if (it != lin_clicks.end() && row.kind != StrategyKind::Lin) {
      const long long delta = row.clicks - it->second;
      out << (delta >= 0 ? "+" : "") << delta;
    } else {
      out << "-";
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace riskbid
