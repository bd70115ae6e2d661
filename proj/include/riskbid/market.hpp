#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

namespace riskbid {

// Discrete market price distribution m(delta) over the integer price grid
// [0, delta_max], with prefix tables used by the bidding recursion:
//   cum_win(a)  = sum_{delta<=a} m(delta)      (probability of winning at bid a)
//   cum_cost(a) = sum_{delta<=a} delta*m(delta) (expected payment at bid a)
//
// Immutable after fitting; safe to share across threads read-only.
struct MarketModel {
  Eigen::VectorXd probs;     // size delta_max+1, sums to 1
  Eigen::VectorXd cum_win;   // nondecreasing, ends at 1
  Eigen::VectorXd cum_cost;  // nondecreasing
  int delta_max = 0;
  std::int64_t clamped = 0;  // prices above delta_max folded into the top bin

  double expected_price() const { return cum_cost[delta_max]; }
};

// Histogram estimator with optional Laplace smoothing:
//   probs[d] = (count(d) + smoothing) / (N + smoothing*(delta_max+1))
// Prices above delta_max are clamped into the top bin and counted in
// `clamped`. Throws std::invalid_argument on empty input, a negative price,
// negative smoothing, or delta_max < 0.
MarketModel fit_market(std::span<const int> prices, int delta_max,
                       double smoothing = 0.0);

// Budget richness U(t,b): the smallest integer bid price whose expected cost
// reaches the even per-auction allowance b/t, i.e. the price at which a
// budget of b would be depleted over the remaining t auctions. Saturates at
// delta_max when b/t exceeds the total expected cost. Throws on t < 1 or
// b < 0. Depends on (t,b) only through the ratio b/t.
int budget_richness(const MarketModel& model, int t, std::int64_t b);

// CSV inspection dump: header `delta,prob`, one row per price.
void write_market_csv(const MarketModel& model, std::ostream& out);
void write_market_csv(const MarketModel& model, const std::string& path);

}  // namespace riskbid
