#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>
#include <string>

namespace riskbid {

// Fully connected 2 -> 64 -> 64 -> 1 network with tanh activations on every
// layer, mapping a resource state (t,b) to a risk tendency in (-1,1).
// Inputs are normalized to (t/T, b/B) internally, so the net carries the
// episode extents it was built for. Adam state lives with the weights;
// a frozen net is safe to evaluate concurrently.
class RiskNet {
 public:
  static constexpr int kHidden = 64;

  RiskNet(int horizon, int budget, std::uint64_t seed);

  int horizon() const { return horizon_; }
  int budget() const { return budget_; }

  // Risk tendency at state (t,b).
  double operator()(int t, std::int64_t b) const;

  // Batch forward over raw (t;b) columns.
  Eigen::VectorXd forward(const Eigen::Matrix2Xd& states) const;

  // Mean squared error against `targets` and its gradient in the flat
  // parameter layout used by parameters()/set_parameters().
  double loss_and_gradient(const Eigen::Matrix2Xd& states,
                           const Eigen::VectorXd& targets,
                           Eigen::VectorXd& grad) const;

  Eigen::Index parameter_count() const;
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& flat);

  // One Adam update along `grad`. Throws std::runtime_error if any weight
  // turns non-finite.
  void adam_step(const Eigen::VectorXd& grad, double learning_rate);

  void save(const std::string& path) const;
  static RiskNet load(const std::string& path);

 private:
  RiskNet() = default;

  Eigen::Matrix2Xd normalize(const Eigen::Matrix2Xd& states) const;

  int horizon_ = 1;
  int budget_ = 1;
  Eigen::MatrixXd w1_, w2_, w3_;
  Eigen::VectorXd b1_, b2_, b3_;

  // Adam accumulators over the flat parameter vector.
  Eigen::VectorXd adam_m_, adam_v_;
  std::int64_t adam_steps_ = 0;
};

}  // namespace riskbid
