#pragma once

#include <cstdint>
#include <iosfwd>

#include "riskbid/market.hpp"
#include "riskbid/mlp.hpp"

namespace riskbid {

// Adjusted impression value theta = r_mean + beta * r_std. Deliberately not
// clamped: a conservative tendency can push theta below zero, which the bid
// rule resolves by sitting out. Throws on r_mean outside [0,1] or r_std < 0.
double adjust_value(double r_mean, double r_std, double beta);

// Expert risk tendency beta(t,b) = tanh(alpha * (U(t,b) - u_hat) / u_hat)
// with U the budget richness of `market`. alpha >= 0 (alpha = 0 degenerates
// to the tendency-free strategy), u_hat >= 1.
double expert_risk_tendency(const MarketModel& market, double alpha, int u_hat,
                            int t, std::int64_t b);

// One-sided tail bound P(X > mu + lambda*sigma) <= 1/(1+lambda^2) (and the
// mirrored bound for lambda < 0). Throws on lambda = 0.
double cantelli_bound(double lambda);

enum class TendencyKind { Zero, Constant, Expert, Learned };

// State-dependent risk tendency beta(t,b) in one of four instantiations.
// Expert and learned kinds hold non-owning references; the market model or
// net must outlive the tendency. All kinds are pure and cheap to copy.
class RiskTendency {
 public:
  static RiskTendency zero();
  static RiskTendency constant(double beta0);  // beta0 in (-1,1)
  static RiskTendency expert(const MarketModel& market, double alpha,
                             int u_hat);
  static RiskTendency learned(const RiskNet& net);

  TendencyKind kind() const { return kind_; }
  double operator()(int t, std::int64_t b) const;

 private:
  RiskTendency() = default;

  TendencyKind kind_ = TendencyKind::Zero;
  double beta0_ = 0.0;
  double alpha_ = 0.0;
  int u_hat_ = 1;
  const MarketModel* market_ = nullptr;
  const RiskNet* net_ = nullptr;
};

// CSV export `t,b,beta` over t in [1,T], b in [0,B] with optional strides.
void write_beta_grid_csv(const RiskTendency& tendency, int horizon, int budget,
                         std::ostream& out, int t_stride = 1,
                         int b_stride = 1);

}  // namespace riskbid
