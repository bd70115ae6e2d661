#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "riskbid/ctr.hpp"

namespace riskbid {

// One preprocessed bid request: the pipeline reduces every request to its
// predicted value, prediction uncertainty, realized market price and click
// outcome before any bidding happens.
struct AuctionRecord {
  double r_mean = 0.0;
  double r_std = 0.0;
  int market_price = 0;
  int click = 0;
};

// Columnar store of auction records in stream order. Rows [0, split) are the
// training range, [split, size) the evaluation range.
struct LogDataset {
  Eigen::VectorXd r_mean;
  Eigen::VectorXd r_std;
  Eigen::VectorXi market_price;
  Eigen::VectorXi click;
  Eigen::Index split = 0;

  Eigen::Index size() const { return r_mean.size(); }
  Eigen::Index train_count() const { return split; }
  Eigen::Index test_count() const { return size() - split; }

  AuctionRecord record(Eigen::Index i) const {
    return AuctionRecord{r_mean[i], r_std[i], market_price[i], click[i]};
  }

  // Cost per mille over the training range. Throws when the range is empty.
  double cpm_train() const;
};

// Stitches a train file and a test file into one dataset with the split at
// the boundary.
LogDataset concat_datasets(const LogDataset& train, const LogDataset& test);

// CSV log schema (ASCII, `\n` endings, no quoting):
//   r_mean,r_std,market_price,click
// Structurally malformed lines are skipped and counted (over 1% malformed is
// an error); a parseable line with out-of-domain values (r_mean outside
// [0,1], negative price, click not in {0,1}) is reported immediately with
// its line number. The returned dataset has split = size.
LogDataset read_log(const std::string& path,
                    std::size_t* malformed_count = nullptr);

// Writes rows [begin, end) (defaults: the whole dataset). Doubles are
// printed in shortest round-trip form, so write_log / read_log is an
// identity on the stored values.
void write_log(const LogDataset& ds, const std::string& path,
               Eigen::Index begin = 0, Eigen::Index end = -1);

struct MarketSpec {
  enum class Family { LogNormal, Uniform, Fixed };
  Family family = Family::LogNormal;
  double p1 = 3.2188758248682006;  // LogNormal: log-scale mean (ln 25)
  double p2 = 0.5;                 // LogNormal: log-scale sigma
  int delta_max = 100;
};

// Synthetic benchmark generator. Every record carries the bias feature 0,
// one of the two frequent segment features {1, 2} (true weights of
// +/- segment_weight, learned almost exactly from the training split), and
// one or two Zipf-drawn tail features that stay prior-dominated. The
// segments spread predicted values across records while the tail features
// keep every record's uncertainty comparable to its value, which is the
// regime the risk-aware strategies are sensitive to.
struct SyntheticConfig {
  int n_features = 40000;
  int n_train = 20000;
  int n_test = 200000;
  double true_weight_scale = 1.0;
  double bias_weight = -6.5;
  double segment_weight = 1.0;  // 0 disables the segment feature
  int rare_features_min = 1;    // Zipf-drawn features per record
  int rare_features_max = 2;
  double zipf_exponent = 0.4;
  double prior_variance = 3.0;
  int ctr_epochs = 1;
  MarketSpec market;
  std::uint64_t seed = 1;
};

// Raw sparse examples drawn from known weights; the reduced-log generator
// builds on this and feature-level tests consume it directly.
struct RawSynthetic {
  std::vector<SparseExample> examples;
  Eigen::VectorXd true_weights;
};
RawSynthetic generate_ctr_examples(const SyntheticConfig& config, int n);

// Full reduced-log benchmark: market prices are drawn independently of
// features, clicks come from the true weights, and (r_mean, r_std) are the
// ctr module's predictions after fitting on the training split.
// Deterministic per seed.
LogDataset generate_synthetic(const SyntheticConfig& config);

}  // namespace riskbid
