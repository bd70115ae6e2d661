#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "riskbid/market.hpp"

namespace riskbid {

// Expected cumulative value V(t,b) for t remaining auctions and remaining
// budget b, built by the model-based recursion with the average impression
// value r_avg standing in for per-request values. values(t,b) is laid out
// with t as the row index, so values.row(t-1) is the layer the bid rule
// reads. Immutable once built.
struct ValueTable {
  Eigen::MatrixXd values;  // (T+1) x (B+1)
  double r_avg = 0.0;
  int horizon = 0;         // T
  int budget = 0;          // B

  double at(int t, std::int64_t b) const { return values(t, b); }
};

// Builds the table layer by layer:
//   V(t,b) = V(t-1,b) + sum_{delta=0}^{a*} m(delta) * g(delta),
//   g(delta) = r_avg + V(t-1,b-delta) - V(t-1,b),
// where a* is the largest bid <= min(b, delta_max) with g(a*) >= 0 (g is
// nonincreasing, so a* is found by bisection and the sum is a single dot
// product against the reversed value segment). Throws on r_avg outside
// [0,1] or negative extents.
ValueTable build_table(const MarketModel& market, double r_avg, int horizon,
                       int budget);

// One bid decision. `threshold` carries the interior threshold price A when
// the full-budget bid is not justified (g(b) < 0); it is empty when the
// rule returns b itself.
struct BidDecision {
  int price = 0;
  std::optional<int> threshold;
};

// Optimal bid price for adjusted impression value theta at state (t,b):
// bid b when g(b) >= 0, otherwise the largest price A with g(A) >= 0, and 0
// when even g(0) < 0 (theta itself negative). theta may be any real; risk
// adjustment can push it below zero. Throws when (t,b) is off the grid.
BidDecision bid_price(const ValueTable& table, double theta, int t,
                      std::int64_t b);

// Flat binary serialization: magic, T, B, r_avg, then row-major doubles.
void save_table(const ValueTable& table, const std::string& path);
ValueTable load_table(const std::string& path);

// CSV export for small grids: header `t,b,value`.
void write_table_csv(const ValueTable& table, std::ostream& out);

}  // namespace riskbid
