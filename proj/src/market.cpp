#include "riskbid/market.hpp"

#include <fstream>
#include <ostream>
#include <stdexcept>

namespace riskbid {

MarketModel fit_market(std::span<const int> prices, int delta_max,
                       double smoothing) {
  if (prices.empty()) {
    throw std::invalid_argument("fit_market: empty price sample");
  }
  if (delta_max < 0) {
    throw std::invalid_argument("fit_market: delta_max must be >= 0");
  }
  if (smoothing < 0.0) {
    throw std::invalid_argument("fit_market: smoothing must be >= 0");
  }

  Eigen::VectorXd counts = Eigen::VectorXd::Zero(delta_max + 1);
  std::int64_t clamped = 0;
  for (int p : prices) {
    if (p < 0) {
      throw std::invalid_argument("fit_market: negative market price");
    }
    if (p > delta_max) {
      ++clamped;
      p = delta_max;
    }
    counts[p] += 1.0;
  }

  const double n = static_cast<double>(prices.size());
  const double denom = n + smoothing * static_cast<double>(delta_max + 1);

  MarketModel model;
  model.delta_max = delta_max;
  model.clamped = clamped;
  model.probs = (counts.array() + smoothing) / denom;

  model.cum_win.resize(delta_max + 1);
  model.cum_cost.resize(delta_max + 1);
  double win = 0.0;
  double cost = 0.0;
  for (int d = 0; d <= delta_max; ++d) {
    win += model.probs[d];
    cost += static_cast<double>(d) * model.probs[d];
    model.cum_win[d] = win;
    model.cum_cost[d] = cost;
  }
  return model;
}

int budget_richness(const MarketModel& model, int t, std::int64_t b) {
  if (t < 1) {
    throw std::invalid_argument("budget_richness: no remaining auctions");
  }
  if (b < 0) {
    throw std::invalid_argument("budget_richness: negative budget");
  }

  const double allowance = static_cast<double>(b) / static_cast<double>(t);
  if (model.cum_cost[model.delta_max] < allowance) {
    return model.delta_max;  // saturated: budget outruns total expected cost
  }
  // cum_cost is nondecreasing; find the smallest U with cum_cost[U] >= b/t.
  int lo = 0;
  int hi = model.delta_max;
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (model.cum_cost[mid] >= allowance) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

void write_market_csv(const MarketModel& model, std::ostream& out) {
  out << "delta,prob\n";
  for (int d = 0; d <= model.delta_max; ++d) {
    out << d << ',' << model.probs[d] << '\n';
  }
}

void write_market_csv(const MarketModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_market_csv: cannot open " + path);
  }
  write_market_csv(model, out);
}

}  // namespace riskbid
