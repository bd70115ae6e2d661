#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace riskbid {

// One training example: a click label and the indices of the active binary
// features. Index 0 is conventionally the bias feature and is expected to be
// listed explicitly.
struct SparseExample {
  int label = 0;
  std::vector<int> features;
};

// Diagonal Gaussian posterior over logistic regression weights. Updates only
// shrink the per-feature variance, so variance <= prior_variance always and
// frequently seen features end up with the tightest posteriors.
struct CtrPosterior {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
  double prior_variance = 1.0;

  Eigen::Index n_features() const { return mean.size(); }
};

struct CtrPrediction {
  double r_mean = 0.0;  // in [0,1]
  double r_std = 0.0;   // in [0, 0.5]
};

CtrPosterior make_ctr_prior(Eigen::Index n_features, double prior_variance);

// One online Bayesian update (Laplace-style assumed-density step): the mean
// moves along the log-likelihood gradient scaled by the updated variance,
// and the variance shrinks by the local logistic curvature. Throws on a
// label outside {0,1} or a feature index out of range.
void ctr_update(CtrPosterior& posterior, std::span<const int> features,
                int label);

CtrPosterior train_ctr(std::span<const SparseExample> examples,
                       Eigen::Index n_features, double prior_variance,
                       int epochs = 1);

// Predictive mean and standard deviation of sigmoid(w'x) under the Gaussian
// posterior, computed by Gauss-Hermite quadrature over the 1-D logit
// distribution N(sum mean_i, sum variance_i). Deterministic for a fixed
// posterior. Throws on an empty feature list or an index out of range.
CtrPrediction predict(const CtrPosterior& posterior,
                      std::span<const int> features);

// CSV serialization: header `feature_index,mean,variance`, one row per
// feature. load reconstructs prior_variance as the largest stored variance.
void save_ctr_csv(const CtrPosterior& posterior, const std::string& path);
CtrPosterior load_ctr_csv(const std::string& path);

// libsvm-style reader: one example per line, `label idx:1 idx:1 ...` with
// 0-based indices and binary values. Returns the examples and the implied
// feature count (max index + 1).
struct LibsvmData {
  std::vector<SparseExample> examples;
  Eigen::Index n_features = 0;
};
LibsvmData read_libsvm(const std::string& path);

}  // namespace riskbid
