// Acceptance suite: one line per criterion, every tolerance pinned in code.
// Heavier empirical checks run on the default synthetic benchmark with a
// fixed seed; the oracle checks use dyadic instances where the arithmetic
// is exact.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "riskbid/ctr.hpp"
#include "riskbid/data.hpp"
#include "riskbid/dp.hpp"
#include "riskbid/market.hpp"
#include "riskbid/mlp.hpp"
#include "riskbid/replay.hpp"
#include "riskbid/risk.hpp"
#include "riskbid/sim.hpp"
#include "riskbid/ssrl.hpp"

using namespace riskbid;
using clk = std::chrono::steady_clock;

namespace {

int failures = 0;

double elapsed(clk::time_point start) {
  return std::chrono::duration<double>(clk::now() - start).count();
}

void report(const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %-28s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  if (!ok) {
    ++failures;
  }
}

std::string fmt(const char* pattern, ...) {
  char buf[256];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return buf;
}

// ---------------------------------------------------------------------------
// Criterion: build_table equals exhaustive expectimax on >= 200 random small
// instances (T<=4, B<=6, delta_max<=3) within 1e-12, in under 5 seconds.
void dp_oracle_equivalence() {
  const auto start = clk::now();
  std::mt19937_64 rng(20240801);
  std::uniform_int_distribution<int> horizon_dist(1, 4);
  std::uniform_int_distribution<int> budget_dist(1, 6);
  std::uniform_int_distribution<int> delta_dist(1, 3);
  std::uniform_int_distribution<int> ravg16(0, 16);
  double worst = 0.0;
  for (int it = 0; it < 200; ++it) {
    const int horizon = horizon_dist(rng);
    const int budget = budget_dist(rng);
    const MarketModel m =
        oracle::random_dyadic_market(delta_dist(rng), 16, rng());
    const double r_avg = ravg16(rng) / 16.0;
    const ValueTable table = build_table(m, r_avg, horizon, budget);
    const Eigen::MatrixXd expect =
        oracle::exhaustive_value_table(m, r_avg, horizon, budget);
    worst = std::max(worst, (table.values - expect).cwiseAbs().maxCoeff());
  }
  const double secs = elapsed(start);
  report("dp-oracle-equivalence", worst <= 1e-12 && secs < 5.0,
         fmt("200 instances, max|dV|=%.1e, %.2fs", worst, secs));
}

// Criterion: on >= 50 random small instances with constant lambda in
// {-0.5, 0, 0.5, 1}, the dp policy on adjusted values attains the maximum of
// value + lambda * uncertainty over exhaustive policy enumeration (paired
// win/lose recursions) within 1e-12.
void var_policy_optimality() {
  const auto start = clk::now();
  std::mt19937_64 rng(7151);
  std::uniform_int_distribution<int> horizon_dist(1, 3);
  std::uniform_int_distribution<int> budget_dist(1, 4);
  std::uniform_int_distribution<int> delta_dist(1, 2);
  std::uniform_int_distribution<int> mean16(4, 12);
  std::uniform_int_distribution<int> std32(0, 6);
  const double lambdas[] = {-0.5, 0.0, 0.5, 1.0};
  double worst_gap = 0.0;
  const int instances = 52;
  for (int it = 0; it < instances; ++it) {
    const int horizon = horizon_dist(rng);
    const int budget = budget_dist(rng);
    const MarketModel m =
        oracle::random_dyadic_market(delta_dist(rng), 16, rng());
    const double r_mean = mean16(rng) / 16.0;
    const double r_std = std32(rng) / 32.0;
    const double lambda = lambdas[it % 4];
    const double theta = r_mean + lambda * r_std;

    const ValueTable table = build_table(m, theta, horizon, budget);
    oracle::Policy dp_policy(horizon * (budget + 1), 0);
    for (int t = 1; t <= horizon; ++t) {
      for (int b = 0; b <= budget; ++b) {
        dp_policy[(t - 1) * (budget + 1) + b] =
            bid_price(table, theta, t, b).price;
      }
    }
    const oracle::PolicyScore dp_score =
        oracle::eval_policy(m, dp_policy, r_mean, r_std, horizon, budget);
    const double dp_objective =
        dp_score.value + lambda * dp_score.uncertainty;

    double best = -1e300;
    oracle::for_each_policy(horizon, budget, [&](const oracle::Policy& p) {
      const oracle::PolicyScore s =
          oracle::eval_policy(m, p, r_mean, r_std, horizon, budget);
      best = std::max(best, s.value + lambda * s.uncertainty);
    });
    worst_gap = std::max(worst_gap, std::abs(best - dp_objective));
  }
  report("var-policy-optimality", worst_gap <= 1e-12,
         fmt("%d instances, max|gap|=%.1e, %.1fs", instances, worst_gap,
             elapsed(start)));
}

// Criterion: expert tendency satisfies the sign rule exactly at every grid
// cell, discrete monotonicity in b and t at every cell for 5 random markets,
// and exact ratio invariance beta(t,b) = beta(kt,kb) for k in {2,3,10}.
void expert_tendency_rules() {
  std::mt19937_64 rng(55);
  std::uniform_int_distribution<int> price(0, 40);
  bool ok = true;
  for (int mk = 0; mk < 5 && ok; ++mk) {
    std::vector<int> prices(600);
    for (int& p : prices) {
      p = price(rng);
    }
    const MarketModel m = fit_market(prices, 40, 0.0);
    const double alpha = 0.05 + 0.1 * mk;
    const int u_hat = 2 + 4 * mk;
    for (int t = 1; t <= 25 && ok; ++t) {
      for (long long b = 0; b <= 120 && ok; ++b) {
        const double beta = expert_risk_tendency(m, alpha, u_hat, t, b);
        const bool rich = budget_richness(m, t, b) >= u_hat;
        if (rich != (beta >= 0.0)) ok = false;
        if (expert_risk_tendency(m, alpha, u_hat, t, b + 1) < beta) ok = false;
        if (expert_risk_tendency(m, alpha, u_hat, t + 1, b) > beta) ok = false;
        for (int k : {2, 3, 10}) {
          if (expert_risk_tendency(m, alpha, u_hat, k * t, k * b) != beta) {
            ok = false;
          }
        }
      }
    }
  }
  report("expert-tendency-rules", ok,
         "sign, monotonicity, ratio invariance on 5 markets x 25x121 grid");
}

// Criterion: empirical one-sided tails of standardized uniform, exponential
// and Bernoulli(0.3) stay within the Cantelli bound + 3 standard errors at
// n = 1e6 for lambda in {0.5, 1, 2}.
void cantelli_monte_carlo() {
  const int n = 1000000;
  std::mt19937_64 rng(424242);
  bool ok = true;
  std::string detail;
  for (double lambda : {0.5, 1.0, 2.0}) {
    const double bound = cantelli_bound(lambda);
    const double se = std::sqrt(bound * (1.0 - bound) / n);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);
    std::bernoulli_distribution bern(0.3);
    const double sqrt12 = std::sqrt(12.0);
    const double bern_sd = std::sqrt(0.3 * 0.7);
    int over[3] = {0, 0, 0};
    for (int i = 0; i < n; ++i) {
      if ((unif(rng) - 0.5) * sqrt12 > lambda) ++over[0];
      if (expo(rng) - 1.0 > lambda) ++over[1];
      if ((static_cast<double>(bern(rng)) - 0.3) / bern_sd > lambda) ++over[2];
    }
    for (int d = 0; d < 3; ++d) {
      if (static_cast<double>(over[d]) / n > bound + 3.0 * se) ok = false;
    }
  }
  report("cantelli-monte-carlo", ok,
         "3 distributions x lambda {0.5,1,2}, n=1e6, bound + 3se");
}

// Criterion: analytic MLP gradient matches central finite differences with
// max relative error < 1e-4 over 20 random weight settings.
void mlp_gradient_check() {
  std::mt19937_64 rng(99321);
  std::uniform_real_distribution<double> weight(-0.5, 0.5);
  std::uniform_real_distribution<double> target(-0.9, 0.9);
  std::uniform_int_distribution<int> t_dist(1, 30);
  std::uniform_int_distribution<int> b_dist(0, 80);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    RiskNet net(30, 80, rng());
    Eigen::VectorXd params = net.parameters();
    for (Eigen::Index i = 0; i < params.size(); ++i) {
      params[i] = weight(rng);
    }
    net.set_parameters(params);

    Eigen::Matrix2Xd states(2, 6);
    Eigen::VectorXd targets(6);
    for (int i = 0; i < 6; ++i) {
      states(0, i) = t_dist(rng);
      states(1, i) = b_dist(rng);
      targets[i] = target(rng);
    }
    Eigen::VectorXd analytic;
    net.loss_and_gradient(states, targets, analytic);

    const double h = 1e-5;
    Eigen::VectorXd probe = params;
    Eigen::VectorXd unused;
    for (Eigen::Index i = 0; i < params.size(); ++i) {
      probe[i] = params[i] + h;
      net.set_parameters(probe);
      const double up = net.loss_and_gradient(states, targets, unused);
      probe[i] = params[i] - h;
      net.set_parameters(probe);
      const double down = net.loss_and_gradient(states, targets, unused);
      probe[i] = params[i];
      const double numeric = (up - down) / (2.0 * h);
      const double denom =
          std::max(std::abs(analytic[i]) + std::abs(numeric), 1e-6);
      worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
    }
    net.set_parameters(params);
  }
  report("mlp-gradient-check", worst < 1e-4,
         fmt("20 settings, max rel err=%.2e", worst));
}

// Criterion: buffer capacity bound and nondecreasing stored minimum hold
// across 1e4 randomized episode insertions.
void buffer_invariants() {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> reward(0.0, 100.0);
  std::uniform_int_distribution<int> len(1, 12);
  ExperienceBuffer buf(64);
  bool ok = true;
  double last_min = -1.0;
  for (int op = 0; op < 10000; ++op) {
    std::vector<StateBeta> states(len(rng));
    for (std::size_t i = 0; i < states.size(); ++i) {
      states[i] = StateBeta{op, static_cast<std::int64_t>(i), 0.0};
    }
    buf.insert_episode(states, reward(rng));
    if (buf.size() > buf.capacity()) ok = false;
    const double cur = buf.min_reward().value_or(-1.0);
    if (cur < last_min) ok = false;
    last_min = cur;
  }
  report("buffer-invariants", ok, "1e4 randomized ops, capacity 64");
}

// Criterion: moment-method r_mean within 2e-3 of Monte Carlo (1e6 samples)
// for random 1-D posteriors over |mu| <= 4, var <= 4.
void bayesian_moment_accuracy() {
  std::mt19937_64 rng(8675309);
  std::uniform_real_distribution<double> mu_dist(-4.0, 4.0);
  std::uniform_real_distribution<double> var_dist(0.01, 4.0);
  double worst = 0.0;
  for (int it = 0; it < 40; ++it) {
    const double mu = mu_dist(rng);
    const double var = var_dist(rng);
    CtrPosterior posterior = make_ctr_prior(1, var);
    posterior.mean[0] = mu;
    const std::vector<int> x{0};
    const CtrPrediction pred = predict(posterior, x);

    std::normal_distribution<double> z(mu, std::sqrt(var));
    double sum = 0.0;
    for (int i = 0; i < 1000000; ++i) {
      sum += 1.0 / (1.0 + std::exp(-z(rng)));
    }
    worst = std::max(worst, std::abs(pred.r_mean - sum / 1e6));
  }
  report("bayesian-moment-accuracy", worst < 2e-3,
         fmt("40 posteriors, max|dmean|=%.2e vs 1e6-sample MC", worst));
}

// Shared benchmark state for the strategy-level criteria.
struct Benchmark {
  LogDataset ds;
  MarketModel market;
  ValueTable table;
  std::int64_t budget_half = 0;  // B at c0 = 1/2
  int horizon = 1000;
};

Benchmark make_benchmark() {
  Benchmark bench;
  SyntheticConfig cfg;  // the default configuration IS the benchmark
  bench.ds = generate_synthetic(cfg);
  std::vector<int> prices(bench.ds.market_price.data(),
                          bench.ds.market_price.data() +
                              bench.ds.train_count());
  bench.market = fit_market(prices, cfg.market.delta_max, 0.0);
  bench.budget_half =
      allocate_budget(bench.ds.cpm_train(), bench.horizon, 0.5);
  bench.table = build_table(
      bench.market, bench.ds.r_mean.head(bench.ds.train_count()).mean(),
      bench.horizon, static_cast<int>(bench.budget_half));
  return bench;
}

// Criterion: ekRLB with alpha=0 and CRTRLB with beta0=0 reproduce the
// tendency-free strategy click-for-click over 100 synthetic episodes.
void degeneracy_identities(const Benchmark& bench) {
  Strategy rlb;
  rlb.kind = StrategyKind::Rlb;
  Strategy ek0;
  ek0.kind = StrategyKind::EkRlb;
  ek0.tendency = RiskTendency::expert(bench.market, 0.0, 7);
  Strategy crt0;
  crt0.kind = StrategyKind::CrtRlb;
  crt0.tendency = RiskTendency::zero();

  bool ok = true;
  for (int e = 0; e < 100 && ok; ++e) {
    const Eigen::Index start =
        bench.ds.split + static_cast<Eigen::Index>(e) * bench.horizon;
    const EpisodeResult a = run_episode(bench.ds, start, bench.horizon, rlb,
                                        bench.table, bench.budget_half);
    const EpisodeResult b = run_episode(bench.ds, start, bench.horizon, ek0,
                                        bench.table, bench.budget_half);
    const EpisodeResult c = run_episode(bench.ds, start, bench.horizon, crt0,
                                        bench.table, bench.budget_half);
    ok = a.clicks == b.clicks && a.wins == b.wins && a.spend == b.spend &&
         a.clicks == c.clicks && a.wins == c.wins && a.spend == c.spend;
  }
  report("degeneracy-identities", ok,
         "ekRLB(alpha=0) == RLB == CRTRLB(beta0=0) on 100 episodes");
}

// Criterion: on the synthetic benchmark at c0 = 1/2, consumption ratio is
// monotonically nonincreasing as beta0 falls from 0 to -0.5, the -0.5 run
// consumes under 5% of budget, and its clicks are under 5% of the beta0=0
// clicks. Runtime under 2 minutes.
void constant_tendency_trend(const Benchmark& bench) {
  const auto start_time = clk::now();
  const int episodes = 100;
  std::vector<double> consumption;
  std::vector<long long> clicks;
  for (double beta0 : {0.0, -0.1, -0.2, -0.3, -0.4, -0.5}) {
    Strategy s;
    s.kind = StrategyKind::CrtRlb;
    s.tendency = beta0 == 0.0 ? RiskTendency::zero()
                              : RiskTendency::constant(beta0);
    long long click_total = 0;
    long long spend_total = 0;
    for (int e = 0; e < episodes; ++e) {
      const Eigen::Index start =
          bench.ds.split + static_cast<Eigen::Index>(e) * bench.horizon;
      const EpisodeResult r = run_episode(bench.ds, start, bench.horizon, s,
                                          bench.table, bench.budget_half);
      click_total += r.clicks;
      spend_total += r.spend;
    }
    consumption.push_back(static_cast<double>(spend_total) /
                          (static_cast<double>(episodes) *
                           static_cast<double>(bench.budget_half)));
    clicks.push_back(click_total);
  }
  bool monotone = true;
  for (std::size_t i = 1; i < consumption.size(); ++i) {
    if (consumption[i] > consumption[i - 1]) monotone = false;
  }
  const bool collapsed = consumption.back() < 0.05;
  const bool few_clicks =
      static_cast<double>(clicks.back()) < 0.05 * static_cast<double>(clicks[0]);
  const double secs = elapsed(start_time);
  report("constant-tendency-trend",
         monotone && collapsed && few_clicks && secs < 120.0,
         fmt("consumption 0->-0.5: %.1f%% .. %.2f%%, clicks %lld->%lld, %.1fs",
             100.0 * consumption.front(), 100.0 * consumption.back(),
             clicks.front(), clicks.back(), secs));
}

// Criterion: after 2000 training episodes on the benchmark, the greedy
// learned tendency earns at least 98% of the tendency-free baseline reward
// over 200 paired held-out episodes, and the buffer minimum is nondecreasing
// over training. The improvement itself is reported, not gated.
void ssrlb_sanity(const Benchmark& bench, const RiskNet** net_out) {
  const auto start_time = clk::now();
  ValueTable table = bench.table;  // training may not mutate the shared one
  SsrlConfig cfg;
  cfg.seed = 1;
  static SsrlResult result =
      train_ssrlb(bench.ds, bench.market, table, bench.budget_half, cfg);
  *net_out = &result.net;

  bool buffer_monotone = true;
  for (std::size_t i = 1; i < result.curve.size(); ++i) {
    if (result.curve[i].buffer_min < result.curve[i - 1].buffer_min) {
      buffer_monotone = false;
    }
  }

  Strategy greedy;
  greedy.kind = StrategyKind::SsRlb;
  greedy.tendency = RiskTendency::learned(result.net);
  Strategy baseline;
  baseline.kind = StrategyKind::Rlb;
  double greedy_total = 0.0;
  double baseline_total = 0.0;
  for (int e = 0; e < 200; ++e) {
    const Eigen::Index start =
        bench.ds.split + static_cast<Eigen::Index>(e) * bench.horizon;
    greedy_total += run_episode(bench.ds, start, bench.horizon, greedy,
                                bench.table, bench.budget_half)
                        .cumulative_value;
    baseline_total += run_episode(bench.ds, start, bench.horizon, baseline,
                                  bench.table, bench.budget_half)
                          .cumulative_value;
  }
  const double ratio = greedy_total / baseline_total;

  // Reported, not gated: correlation between the learned grid and the
  // expert grid (the sign is data-dependent and not reproducible on the
  // synthetic benchmark, where the tendency-free policy is already near
  // optimal and the learned field stays nearly flat).
  const RiskTendency expert = RiskTendency::expert(
      bench.market, 0.1,
      std::max(1, budget_richness(bench.market, bench.horizon,
                                  bench.budget_half)));
  const RiskTendency learned = RiskTendency::learned(result.net);
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  int n = 0;
  for (int ti = 1; ti <= 40; ++ti) {
    const int t = ti * bench.horizon / 40;
    for (int bi = 0; bi <= 40; ++bi) {
      const std::int64_t b = bi * bench.budget_half / 40;
      const double x = expert(t, b);
      const double y = learned(t, b);
      sx += x; sy += y; sxx += x * x; syy += y * y; sxy += x * y;
      ++n;
    }
  }
  const double cov = sxy / n - (sx / n) * (sy / n);
  const double pearson =
      cov / std::sqrt((sxx / n - sx / n * sx / n) *
                      (syy / n - sy / n * sy / n));

  report("ssrlb-sanity", ratio >= 0.98 && buffer_monotone,
         fmt("greedy/baseline=%.4f over 200 paired episodes, buffer-min %s, "
             "grid corr vs expert %+.2f (reported only), %.1fs",
             ratio, buffer_monotone ? "nondecreasing" : "NOT monotone",
             pearson, elapsed(start_time)));
}

// Criterion: with logs supplied in the ingestion format, the comparison runs
// all 6 strategies across all 5 budget coefficients without error and yields
// the full report. Numeric agreement with any external dataset is explicitly
// not asserted.
void full_suite_completes(const Benchmark& bench, const RiskNet* net) {
  const auto start_time = clk::now();
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "riskbid_acceptance";
  fs::create_directories(dir);
  const std::string train_path = (dir / "train.csv").string();
  const std::string test_path = (dir / "test.csv").string();
  bool ok = false;
  std::string detail;
  try {
    write_log(bench.ds, train_path, 0, bench.ds.split);
    write_log(bench.ds, test_path, bench.ds.split, bench.ds.size());
    const LogDataset train = read_log(train_path);
    const LogDataset test = read_log(test_path);
    const LogDataset ds = concat_datasets(train, test);

    SuiteContext ctx;
    ctx.market = &bench.market;
    ctx.table = &bench.table;
    ctx.horizon = bench.horizon;
    ctx.cpm_train = ds.cpm_train();
    ctx.net = net;
    const StrategyKind kinds[] = {StrategyKind::Lin,    StrategyKind::Rlb,
                                  StrategyKind::EkRlb,  StrategyKind::CrtRlb,
                                  StrategyKind::CuRlb,  StrategyKind::SsRlb};
    const double c0s[] = {1.0 / 32, 1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2};
    const std::vector<SuiteRow> rows = evaluate_suite(ds, kinds, c0s, ctx);
    write_report_csv(rows, (dir / "report.csv").string());
    ok = rows.size() == 30;
    detail = fmt("6 strategies x 5 budgets -> %zu rows, %.1fs", rows.size(),
                 elapsed(start_time));
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  fs::remove_all(dir);
  report("full-suite-completes", ok, detail);
}

}  // namespace

int main() {
  const auto start = clk::now();
  dp_oracle_equivalence();
  var_policy_optimality();
  expert_tendency_rules();
  cantelli_monte_carlo();
  mlp_gradient_check();
  buffer_invariants();
  bayesian_moment_accuracy();

  std::printf("-- generating synthetic benchmark (fixed seed) --\n");
  const Benchmark bench = make_benchmark();
  degeneracy_identities(bench);
  constant_tendency_trend(bench);
  const RiskNet* net = nullptr;
  ssrlb_sanity(bench, &net);
  full_suite_completes(bench, net);

  std::printf("%d criteria failed, total %.1fs\n", failures, elapsed(start));
  return failures == 0 ? 0 : 1;
}
