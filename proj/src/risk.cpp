#include "riskbid/risk.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace riskbid {

double adjust_value(double r_mean, double r_std, double beta) {
  if (!(r_mean >= 0.0 && r_mean <= 1.0)) {
    throw std::invalid_argument("adjust_value: r_mean must lie in [0,1]");
  }
  if (!(r_std >= 0.0)) {
    throw std::invalid_argument("adjust_value: r_std must be >= 0");
  }
  return r_mean + beta * r_std;
}

double expert_risk_tendency(const MarketModel& market, double alpha, int u_hat,
                            int t, std::int64_t b) {
  if (!(alpha >= 0.0)) {
    throw std::invalid_argument("expert_risk_tendency: alpha must be >= 0");
  }
  if (u_hat < 1) {
    throw std::invalid_argument("expert_risk_tendency: u_hat must be >= 1");
  }
  const int richness = budget_richness(market, t, b);
  return std::tanh(alpha * static_cast<double>(richness - u_hat) /
                   static_cast<double>(u_hat));
}

double cantelli_bound(double lambda) {
  if (lambda == 0.0) {
    throw std::invalid_argument("cantelli_bound: vacuous at lambda = 0");
  }
  return 1.0 / (1.0 + lambda * lambda);
}

RiskTendency RiskTendency::zero() { return RiskTendency{}; }

RiskTendency RiskTendency::constant(double beta0) {
  if (!(beta0 > -1.0 && beta0 < 1.0)) {
    throw std::invalid_argument("RiskTendency: beta0 must lie in (-1,1)");
  }
  RiskTendency rt;
  rt.kind_ = TendencyKind::Constant;
  rt.beta0_ = beta0;
  return rt;
}

RiskTendency RiskTendency::expert(const MarketModel& market, double alpha,
                                  int u_hat) {
  if (!(alpha >= 0.0)) {
    throw std::invalid_argument("RiskTendency: alpha must be >= 0");
  }
  if (u_hat < 1) {
    throw std::invalid_argument("RiskTendency: u_hat must be >= 1");
  }
  RiskTendency rt;
  rt.kind_ = TendencyKind::Expert;
  rt.alpha_ = alpha;
  rt.u_hat_ = u_hat;
  rt.market_ = &market;
  return rt;
}

RiskTendency RiskTendency::learned(const RiskNet& net) {
  RiskTendency rt;
  rt.kind_ = TendencyKind::Learned;
  rt.net_ = &net;
  return rt;
}

double RiskTendency::operator()(int t, std::int64_t b) const {
  switch (kind_) {
    case TendencyKind::Zero:
      return 0.0;
    case TendencyKind::Constant:
      return beta0_;
    case TendencyKind::Expert:
      return expert_risk_tendency(*market_, alpha_, u_hat_, t, b);
    case TendencyKind::Learned:
      return (*net_)(t, b);
  }
  return 0.0;
}

void write_beta_grid_csv(const RiskTendency& tendency, int horizon, int budget,
                         std::ostream& out, int t_stride, int b_stride) {
  if (t_stride < 1 || b_stride < 1) {
    throw std::invalid_argument("write_beta_grid_csv: strides must be >= 1");
  }
  out << "t,b,beta\n";
  for (int t = 1; t <= horizon; t += t_stride) {
    for (std::int64_t b = 0; b <= budget; b += b_stride) {
      out << t << ',' << b << ',' << tendency(t, b) << '\n';
    }
  }
}

}  // namespace riskbid
