#include "riskbid/ctr.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace riskbid {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Gauss-Hermite nodes and probabilist-normalized weights (sum to 1) from the
// Golub-Welsch eigendecomposition of the Jacobi matrix.
struct Quadrature {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

Quadrature make_gauss_hermite(int n) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double off = std::sqrt(static_cast<double>(k) / 2.0);
    jacobi(k, k - 1) = off;
    jacobi(k - 1, k) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  Quadrature q;
  q.nodes = es.eigenvalues();
  q.weights = es.eigenvectors().row(0).transpose().array().square();
  return q;
}

const Quadrature& gauss_hermite64() {
  static const Quadrature q = make_gauss_hermite(64);
  return q;
}

void check_features(const CtrPosterior& posterior,
                    std::span<const int> features, const char* who) {
  for (int idx : features) {
    if (idx < 0 || idx >= posterior.n_features()) {
      throw std::invalid_argument(std::string(who) +
                                  ": feature index out of range");
    }
  }
}

}  // namespace

CtrPosterior make_ctr_prior(Eigen::Index n_features, double prior_variance) {
  if (n_features < 1) {
    throw std::invalid_argument("make_ctr_prior: need at least one feature");
  }
  if (!(prior_variance > 0.0)) {
    throw std::invalid_argument("make_ctr_prior: prior_variance must be > 0");
  }
  CtrPosterior p;
  p.mean = Eigen::VectorXd::Zero(n_features);
  p.variance = Eigen::VectorXd::Constant(n_features, prior_variance);
  p.prior_variance = prior_variance;
  return p;
}

void ctr_update(CtrPosterior& posterior, std::span<const int> features,
                int label) {
  if (label != 0 && label != 1) {
    throw std::invalid_argument("ctr_update: label must be 0 or 1");
  }
  check_features(posterior, features, "ctr_update");

  double mu = 0.0;
  double var = 0.0;
  for (int idx : features) {
    mu += posterior.mean[idx];
    var += posterior.variance[idx];
  }
  // One Newton step on the 1-D margin z = w'x, then distribute the margin
  // update back to the coordinates by their share of the total variance
  // (each weight moves and shrinks in proportion to what it contributed).
  const double p = sigmoid(mu);
  const double curvature = p * (1.0 - p);
  const double gain = 1.0 / (1.0 + curvature * var);
  const double mean_step = (static_cast<double>(label) - p) * gain;
  const double shrink = curvature * gain;

  for (int idx : features) {
    const double v = posterior.variance[idx];
    posterior.mean[idx] += v * mean_step;
    posterior.variance[idx] = v * (1.0 - v * shrink);
  }
}

CtrPosterior train_ctr(std::span<const SparseExample> examples,
                       Eigen::Index n_features, double prior_variance,
                       int epochs) {
  if (epochs < 0) {
    throw std::invalid_argument("train_ctr: epochs must be >= 0");
  }
  CtrPosterior posterior = make_ctr_prior(n_features, prior_variance);
  for (int e = 0; e < epochs; ++e) {
    for (const SparseExample& ex : examples) {
      ctr_update(posterior, ex.features, ex.label);
    }
  }
  return posterior;
}

CtrPrediction predict(const CtrPosterior& posterior,
                      std::span<const int> features) {
  if (features.empty()) {
    throw std::invalid_argument("predict: empty feature vector");
  }
  check_features(posterior, features, "predict");

  double mu = 0.0;
  double var = 0.0;
  for (int idx : features) {
    mu += posterior.mean[idx];
    var += posterior.variance[idx];
  }

  CtrPrediction out;
  if (var <= 0.0) {
    out.r_mean = sigmoid(mu);
    out.r_std = 0.0;
    return out;
  }

  const Quadrature& q = gauss_hermite64();
  const double scale = std::sqrt(2.0 * var);
  double m1 = 0.0;
  double m2 = 0.0;
  for (Eigen::Index i = 0; i < q.nodes.size(); ++i) {
    const double s = sigmoid(mu + scale * q.nodes[i]);
    m1 += q.weights[i] * s;
    m2 += q.weights[i] * s * s;
  }
  out.r_mean = std::clamp(m1, 0.0, 1.0);
  out.r_std = std::min(std::sqrt(std::max(0.0, m2 - m1 * m1)), 0.5);
  return out;
}

void save_ctr_csv(const CtrPosterior& posterior, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("save_ctr_csv: cannot open " + path);
  }
  out << "feature_index,mean,variance\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < posterior.n_features(); ++i) {
    out << i << ',' << posterior.mean[i] << ',' << posterior.variance[i]
        << '\n';
  }
}

CtrPosterior load_ctr_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_ctr_csv: cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line) || line != "feature_index,mean,variance") {
    throw std::runtime_error("load_ctr_csv: bad header in " + path);
  }
  std::vector<double> means;
  std::vector<double> variances;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::istringstream row(line);
    std::string field;
    std::getline(row, field, ',');
    const std::size_t idx = std::stoul(field);
    std::getline(row, field, ',');
    const double mean = std::stod(field);
    std::getline(row, field, ',');
    const double variance = std::stod(field);
    if (idx != means.size()) {
      throw std::runtime_error("load_ctr_csv: non-contiguous indices in " +
                               path);
    }
    means.push_back(mean);
    variances.push_back(variance);
  }
  if (means.empty()) {
    throw std::runtime_error("load_ctr_csv: no rows in " + path);
  }
  CtrPosterior posterior;
  posterior.mean =
      Eigen::Map<const Eigen::VectorXd>(means.data(), means.size());
  posterior.variance =
      Eigen::Map<const Eigen::VectorXd>(variances.data(), variances.size());
  posterior.prior_variance = posterior.variance.maxCoeff();
  return posterior;
}

LibsvmData read_libsvm(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("read_libsvm: cannot open " + path);
  }
  LibsvmData data;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    std::istringstream row(line);
    SparseExample ex;
    if (!(row >> ex.label) || (ex.label != 0 && ex.label != 1)) {
      throw std::runtime_error("read_libsvm: bad label at line " +
                               std::to_string(line_no));
    }
    std::string token;
    while (row >> token) {
      const std::size_t colon = token.find(':');
      if (colon == std::string::npos) {
        throw std::runtime_error("read_libsvm: bad feature token at line " +
                                 std::to_string(line_no));
      }
      const int idx = std::stoi(token.substr(0, colon));
      const int value = std::stoi(token.substr(colon + 1));
      if (idx < 0 || value != 1) {
        throw std::runtime_error(
            "read_libsvm: features must be `idx:1` with idx >= 0, line " +
            std::to_string(line_no));
      }
      ex.features.push_back(idx);
      data.n_features = std::max<Eigen::Index>(data.n_features, idx + 1);
    }
    data.examples.push_back(std::move(ex));
  }
  return data;
}

}  // namespace riskbid
