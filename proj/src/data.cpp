#include "riskbid/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

namespace riskbid {

namespace {

bool parse_double(std::string_view field, double& out) {
  const char* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_int(std::string_view field, int& out) {
  const char* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end;
}

void append_double(std::string& buf, double value) {
  char tmp[32];
  const auto [ptr, ec] = std::to_chars(tmp, tmp + sizeof(tmp), value);
  buf.append(tmp, ptr);
  (void)ec;
}

// Inverse-CDF sampler over ranks {1, ..., n} with weight 1/rank^s.
class ZipfSampler {
 public:
  ZipfSampler(int n, double exponent) : cdf_(n) {
    double total = 0.0;
    for (int k = 1; k <= n; ++k) {
      total += std::pow(static_cast<double>(k), -exponent);
      cdf_[k - 1] = total;
    }
    for (double& c : cdf_) {
      c /= total;
    }
  }

  int operator()(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng);
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<int>(it - cdf_.begin()) + 1;
  }

 private:
  std::vector<double> cdf_;
};

int draw_market_price(const MarketSpec& spec, std::mt19937_64& rng) {
  switch (spec.family) {
    case MarketSpec::Family::LogNormal: {
      std::lognormal_distribution<double> dist(spec.p1, spec.p2);
      const long p = std::lround(dist(rng));
      return static_cast<int>(std::clamp<long>(p, 0, spec.delta_max));
    }
    case MarketSpec::Family::Uniform: {
      std::uniform_int_distribution<int> dist(static_cast<int>(spec.p1),
                                              static_cast<int>(spec.p2));
      return std::clamp(dist(rng), 0, spec.delta_max);
    }
    case MarketSpec::Family::Fixed:
      return std::clamp(static_cast<int>(spec.p1), 0, spec.delta_max);
  }
  return 0;
}

}  // namespace

double LogDataset::cpm_train() const {
  if (split <= 0) {
    throw std::logic_error("LogDataset: no training rows for cpm_train");
  }
  const double total = market_price.head(split).cast<double>().sum();
  return 1000.0 * total / static_cast<double>(split);
}

LogDataset concat_datasets(const LogDataset& train, const LogDataset& test) {
  LogDataset out;
  const Eigen::Index n = train.size() + test.size();
  out.r_mean.resize(n);
  out.r_std.resize(n);
  out.market_price.resize(n);
  out.click.resize(n);
  out.r_mean << train.r_mean, test.r_mean;
  out.r_std << train.r_std, test.r_std;
  out.market_price << train.market_price, test.market_price;
  out.click << train.click, test.click;
  out.split = train.size();
  return out;
}

LogDataset read_log(const std::string& path, std::size_t* malformed_count) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("read_log: cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line) || line != "r_mean,r_std,market_price,click") {
    throw std::runtime_error("read_log: bad or missing header in " + path);
  }

  std::vector<double> r_mean;
  std::vector<double> r_std;
  std::vector<int> price;
  std::vector<int> click;
  std::size_t malformed = 0;
  std::size_t data_lines = 0;
  std::size_t line_no = 1;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    ++data_lines;

    std::string_view rest(line);
    std::string_view fields[4];
    int n_fields = 0;
    while (n_fields < 4) {
      const std::size_t comma = rest.find(',');
      if (comma == std::string_view::npos) {
        fields[n_fields++] = rest;
        rest = {};
        break;
      }
      fields[n_fields++] = rest.substr(0, comma);
      rest = rest.substr(comma + 1);
    }

    double rm = 0.0;
    double rs = 0.0;
    int mp = 0;
    int ck = 0;
    if (n_fields != 4 || !rest.empty() || !parse_double(fields[0], rm) ||
        !parse_double(fields[1], rs) || !parse_int(fields[2], mp) ||
        !parse_int(fields[3], ck)) {
      ++malformed;
      continue;
    }
    if (rm < 0.0 || rm > 1.0) {
      throw std::runtime_error("read_log: r_mean outside [0,1] at line " +
                               std::to_string(line_no) + " of " + path);
    }
    if (rs < 0.0) {
      throw std::runtime_error("read_log: negative r_std at line " +
                               std::to_string(line_no) + " of " + path);
    }
    if (mp < 0) {
      throw std::runtime_error("read_log: negative market price at line " +
                               std::to_string(line_no) + " of " + path);
    }
    if (ck != 0 && ck != 1) {
      throw std::runtime_error("read_log: click outside {0,1} at line " +
                               std::to_string(line_no) + " of " + path);
    }
    r_mean.push_back(rm);
    r_std.push_back(rs);
    price.push_back(mp);
    click.push_back(ck);
  }

  if (data_lines > 0 &&
      static_cast<double>(malformed) > 0.01 * static_cast<double>(data_lines)) {
    throw std::runtime_error("read_log: " + std::to_string(malformed) +
                             " malformed lines (> 1%) in " + path);
  }
  if (malformed_count != nullptr) {
    *malformed_count = malformed;
  }

  LogDataset ds;
  const Eigen::Index n = static_cast<Eigen::Index>(r_mean.size());
  ds.r_mean = Eigen::Map<const Eigen::VectorXd>(r_mean.data(), n);
  ds.r_std = Eigen::Map<const Eigen::VectorXd>(r_std.data(), n);
  ds.market_price = Eigen::Map<const Eigen::VectorXi>(price.data(), n);
  ds.click = Eigen::Map<const Eigen::VectorXi>(click.data(), n);
  ds.split = n;
  return ds;
}

void write_log(const LogDataset& ds, const std::string& path,
               Eigen::Index begin, Eigen::Index end) {
  if (end < 0) {
    end = ds.size();
  }
  if (begin < 0 || begin > end || end > ds.size()) {
    throw std::invalid_argument("write_log: bad row range");
  }
  std::ofstream out(path, std::ios::binary);  // keep `\n` endings everywhere
  if (!out) {
    throw std::runtime_error("write_log: cannot open " + path);
  }
  std::string buf;
  buf.reserve(1 << 16);
  buf = "r_mean,r_std,market_price,click\n";
  for (Eigen::Index i = begin; i < end; ++i) {
    append_double(buf, ds.r_mean[i]);
    buf.push_back(',');
    append_double(buf, ds.r_std[i]);
    buf.push_back(',');
    buf.append(std::to_string(ds.market_price[i]));
    buf.push_back(',');
    buf.append(std::to_string(ds.click[i]));
    buf.push_back('\n');
    if (buf.size() > (1 << 15)) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) {
    throw std::runtime_error("write_log: write failed for " + path);
  }
}

RawSynthetic generate_ctr_examples(const SyntheticConfig& config, int n) {
  const bool segments = config.segment_weight != 0.0;
  const int first_rare = segments ? 3 : 1;
  if (n < 1 || config.rare_features_min < 1 ||
      config.rare_features_min > config.rare_features_max ||
      config.n_features < first_rare + config.rare_features_max) {
    throw std::invalid_argument("generate_ctr_examples: bad counts");
  }
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> weight_dist(0.0, config.true_weight_scale);
  std::bernoulli_distribution coin;
  std::uniform_int_distribution<int> rare_count(config.rare_features_min,
                                                config.rare_features_max);

  RawSynthetic out;
  out.true_weights.resize(config.n_features);
  out.true_weights[0] = config.bias_weight;
  for (int i = 1; i < config.n_features; ++i) {
    out.true_weights[i] = weight_dist(rng);
  }
  if (segments) {
    out.true_weights[1] = config.segment_weight;
    out.true_weights[2] = -config.segment_weight;
  }

  const ZipfSampler zipf(config.n_features - first_rare,
                         config.zipf_exponent);
  out.examples.reserve(n);
  for (int i = 0; i < n; ++i) {
    SparseExample ex;
    ex.features.push_back(0);  // bias
    if (segments) {
      ex.features.push_back(coin(rng) ? 1 : 2);
    }
    const int rares = rare_count(rng);
    while (static_cast<int>(ex.features.size()) <
           static_cast<int>(segments) + 1 + rares) {
      const int f = first_rare + zipf(rng) - 1;
      if (std::find(ex.features.begin(), ex.features.end(), f) ==
          ex.features.end()) {
        ex.features.push_back(f);
      }
    }
    double logit = 0.0;
    for (int f : ex.features) {
      logit += out.true_weights[f];
    }
    ex.label = coin(rng, std::bernoulli_distribution::param_type(
                             1.0 / (1.0 + std::exp(-logit))));
    out.examples.push_back(std::move(ex));
  }
  return out;
}

LogDataset generate_synthetic(const SyntheticConfig& config) {
  if (config.n_train < 1 || config.n_test < 0) {
    throw std::invalid_argument("generate_synthetic: bad record counts");
  }
  const int total = config.n_train + config.n_test;
  RawSynthetic raw = generate_ctr_examples(config, total);

  // Market prices are independent of features; use a separate stream so the
  // market spec does not perturb the feature draw.
  std::mt19937_64 price_rng(config.seed ^ 0x9e3779b97f4a7c15ull);

  const std::span<const SparseExample> train_view(raw.examples.data(),
                                                  config.n_train);
  const CtrPosterior posterior =
      train_ctr(train_view, config.n_features, config.prior_variance,
                config.ctr_epochs);

  LogDataset ds;
  ds.r_mean.resize(total);
  ds.r_std.resize(total);
  ds.market_price.resize(total);
  ds.click.resize(total);
  ds.split = config.n_train;
  for (int i = 0; i < total; ++i) {
    const CtrPrediction pred = predict(posterior, raw.examples[i].features);
    ds.r_mean[i] = pred.r_mean;
    ds.r_std[i] = pred.r_std;
    ds.market_price[i] = draw_market_price(config.market, price_rng);
    ds.click[i] = raw.examples[i].label;
  }
  return ds;
}

}  // namespace riskbid
