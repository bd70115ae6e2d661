#include "riskbid/mlp.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace riskbid {

namespace {

constexpr std::uint32_t kNetMagic = 0x52424E4E;  // "RBNN"
constexpr std::uint32_t kNetVersion = 1;
constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

Eigen::MatrixXd uniform_init(int rows, int cols, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Eigen::MatrixXd m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) {
      m(r, c) = dist(rng);
    }
  }
  return m;
}

void write_matrix(std::ofstream& out, const Eigen::MatrixXd& m) {
  const std::int32_t rows = static_cast<std::int32_t>(m.rows());
  const std::int32_t cols = static_cast<std::int32_t>(m.cols());
  out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
  out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
}

Eigen::MatrixXd read_matrix(std::ifstream& in, const std::string& path) {
  std::int32_t rows = 0;
  std::int32_t cols = 0;
  in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
  in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
  if (!in || rows < 0 || cols < 0) {
    throw std::runtime_error("RiskNet::load: corrupt shape in " + path);
  }
  Eigen::MatrixXd m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * m.size()));
  if (!in) {
    throw std::runtime_error("RiskNet::load: truncated file " + path);
  }
  return m;
}

}  // namespace

RiskNet::RiskNet(int horizon, int budget, std::uint64_t seed)
    : horizon_(horizon), budget_(budget) {
  if (horizon < 1 || budget < 1) {
    throw std::invalid_argument("RiskNet: horizon and budget must be >= 1");
  }
  std::mt19937_64 rng(seed);
  w1_ = uniform_init(kHidden, 2, rng);
  b1_ = uniform_init(kHidden, 1, rng);
  w2_ = uniform_init(kHidden, kHidden, rng);
  b2_ = uniform_init(kHidden, 1, rng);
  // Zero output layer: the untrained net is the beta = 0 policy.
  w3_ = Eigen::MatrixXd::Zero(1, kHidden);
  b3_ = Eigen::VectorXd::Zero(1);

  adam_m_ = Eigen::VectorXd::Zero(parameter_count());
  adam_v_ = Eigen::VectorXd::Zero(parameter_count());
}

Eigen::Matrix2Xd RiskNet::normalize(const Eigen::Matrix2Xd& states) const {
  Eigen::Matrix2Xd x(2, states.cols());
  x.row(0) = states.row(0) / static_cast<double>(horizon_);
  x.row(1) = states.row(1) / static_cast<double>(budget_);
  return x;
}

double RiskNet::operator()(int t, std::int64_t b) const {
  Eigen::Matrix2Xd state(2, 1);
  state(0, 0) = static_cast<double>(t);
  state(1, 0) = static_cast<double>(b);
  return forward(state)[0];
}

Eigen::VectorXd RiskNet::forward(const Eigen::Matrix2Xd& states) const {
  const Eigen::Matrix2Xd x = normalize(states);
  const Eigen::MatrixXd a1 =
      ((w1_ * x).colwise() + b1_).array().tanh().matrix();
  const Eigen::MatrixXd a2 =
      ((w2_ * a1).colwise() + b2_).array().tanh().matrix();
  return ((w3_ * a2).colwise() + b3_).array().tanh().matrix().row(0);
}

double RiskNet::loss_and_gradient(const Eigen::Matrix2Xd& states,
                                  const Eigen::VectorXd& targets,
                                  Eigen::VectorXd& grad) const {
  const Eigen::Index n = states.cols();
  if (n == 0 || targets.size() != n) {
    throw std::invalid_argument("RiskNet: empty or mismatched batch");
  }

  const Eigen::Matrix2Xd x = normalize(states);
  const Eigen::MatrixXd a1 =
      ((w1_ * x).colwise() + b1_).array().tanh().matrix();
  const Eigen::MatrixXd a2 =
      ((w2_ * a1).colwise() + b2_).array().tanh().matrix();
  const Eigen::MatrixXd out =
      ((w3_ * a2).colwise() + b3_).array().tanh().matrix();

  const Eigen::ArrayXd residual = out.row(0).transpose().array() - targets.array();
  const double loss = residual.square().mean();

  // d(mean r^2)/d out, then back through each tanh.
  const Eigen::ArrayXd dout = 2.0 * residual / static_cast<double>(n);
  const Eigen::MatrixXd dz3 =
      (dout * (1.0 - out.row(0).transpose().array().square()))
          .matrix()
          .transpose();
  const Eigen::MatrixXd gw3 = dz3 * a2.transpose();
  const Eigen::VectorXd gb3 = dz3.rowwise().sum();

  const Eigen::MatrixXd dz2 =
      ((w3_.transpose() * dz3).array() * (1.0 - a2.array().square())).matrix();
  const Eigen::MatrixXd gw2 = dz2 * a1.transpose();
  const Eigen::VectorXd gb2 = dz2.rowwise().sum();

  const Eigen::MatrixXd dz1 =
      ((w2_.transpose() * dz2).array() * (1.0 - a1.array().square())).matrix();
  const Eigen::MatrixXd gw1 = dz1 * x.transpose();
  const Eigen::VectorXd gb1 = dz1.rowwise().sum();

  grad.resize(parameter_count());
  Eigen::Index off = 0;
  const auto pack = [&](const Eigen::MatrixXd& m) {
    grad.segment(off, m.size()) =
        Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
    off += m.size();
  };
  pack(gw1);
  pack(gb1);
  pack(gw2);
  pack(gb2);
  pack(gw3);
  pack(gb3);
  return loss;
}

Eigen::Index RiskNet::parameter_count() const {
  return w1_.size() + b1_.size() + w2_.size() + b2_.size() + w3_.size() +
         b3_.size();
}

Eigen::VectorXd RiskNet::parameters() const {
  Eigen::VectorXd flat(parameter_count());
  Eigen::Index off = 0;
  const auto pack = [&](const Eigen::MatrixXd& m) {
    flat.segment(off, m.size()) =
        Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
    off += m.size();
  };
  pack(w1_);
  pack(b1_);
  pack(w2_);
  pack(b2_);
  pack(w3_);
  pack(b3_);
  return flat;
}

void RiskNet::set_parameters(const Eigen::VectorXd& flat) {
  if (flat.size() != parameter_count()) {
    throw std::invalid_argument("RiskNet: wrong parameter vector size");
  }
  Eigen::Index off = 0;
  const auto unpack = [&](Eigen::MatrixXd& m) {
    m = Eigen::Map<const Eigen::MatrixXd>(flat.data() + off, m.rows(),
                                          m.cols());
    off += m.size();
  };
  const auto unpack_vec = [&](Eigen::VectorXd& v) {
    v = flat.segment(off, v.size());
    off += v.size();
  };
  unpack(w1_);
  unpack_vec(b1_);
  unpack(w2_);
  unpack_vec(b2_);
  unpack(w3_);
  unpack_vec(b3_);
}

void RiskNet::adam_step(const Eigen::VectorXd& grad, double learning_rate) {
  if (grad.size() != parameter_count()) {
    throw std::invalid_argument("RiskNet: wrong gradient size");
  }
  ++adam_steps_;
  adam_m_ = kAdamBeta1 * adam_m_ + (1.0 - kAdamBeta1) * grad;
  adam_v_ =
      (kAdamBeta2 * adam_v_.array() + (1.0 - kAdamBeta2) * grad.array().square())
          .matrix();
  const double m_corr = 1.0 - std::pow(kAdamBeta1, adam_steps_);
  const double v_corr = 1.0 - std::pow(kAdamBeta2, adam_steps_);

  Eigen::VectorXd params = parameters();
  params.array() -= learning_rate * (adam_m_.array() / m_corr) /
                    ((adam_v_.array() / v_corr).sqrt() + kAdamEps);
  if (!params.allFinite()) {
    throw std::runtime_error("RiskNet: non-finite weights after update");
  }
  set_parameters(params);
}

void RiskNet::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("RiskNet::save: cannot open " + path);
  }
  const std::int32_t horizon = horizon_;
  const std::int32_t budget = budget_;
  const std::int32_t layers = 3;
  out.write(reinterpret_cast<const char*>(&kNetMagic), sizeof(kNetMagic));
  out.write(reinterpret_cast<const char*>(&kNetVersion), sizeof(kNetVersion));
  out.write(reinterpret_cast<const char*>(&horizon), sizeof(horizon));
  out.write(reinterpret_cast<const char*>(&budget), sizeof(budget));
  out.write(reinterpret_cast<const char*>(&layers), sizeof(layers));
  write_matrix(out, w1_);
  write_matrix(out, b1_);
  write_matrix(out, w2_);
  write_matrix(out, b2_);
  write_matrix(out, w3_);
  write_matrix(out, b3_);
  if (!out) {
    throw std::runtime_error("RiskNet::save: write failed for " + path);
  }
}

RiskNet RiskNet::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("RiskNet::load: cannot open " + path);
  }
  std::uint32_t magic = 0;
  std::uint32_t version = 0;
  std::int32_t horizon = 0;
  std::int32_t budget = 0;
  std::int32_t layers = 0;
  in.read(reinterpret_cast<char*>(&magic), sizeof(magic));
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  in.read(reinterpret_cast<char*>(&horizon), sizeof(horizon));
  in.read(reinterpret_cast<char*>(&budget), sizeof(budget));
  in.read(reinterpret_cast<char*>(&layers), sizeof(layers));
  if (!in || magic != kNetMagic || version != kNetVersion || layers != 3 ||
      horizon < 1 || budget < 1) {
    throw std::runtime_error("RiskNet::load: bad header in " + path);
  }

  RiskNet net;
  net.horizon_ = horizon;
  net.budget_ = budget;
  net.w1_ = read_matrix(in, path);
  net.b1_ = read_matrix(in, path);
  net.w2_ = read_matrix(in, path);
  net.b2_ = read_matrix(in, path);
  net.w3_ = read_matrix(in, path);
  net.b3_ = read_matrix(in, path);
  if (net.w1_.rows() != kHidden || net.w1_.cols() != 2 ||
      net.w2_.rows() != kHidden || net.w2_.cols() != kHidden ||
      net.w3_.rows() != 1 || net.w3_.cols() != kHidden) {
    throw std::runtime_error("RiskNet::load: unexpected layer shapes in " +
                             path);
  }
  net.adam_m_ = Eigen::VectorXd::Zero(net.parameter_count());
  net.adam_v_ = Eigen::VectorXd::Zero(net.parameter_count());
  return net;
}

}  // namespace riskbid
