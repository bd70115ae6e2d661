#include "riskbid/dp.hpp"

#include <cstring>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace riskbid {

namespace {

constexpr std::uint32_t kTableMagic = 0x52425654;  // "RBVT"
constexpr std::uint32_t kTableVersion = 1;

}  // namespace

ValueTable build_table(const MarketModel& market, double r_avg, int horizon,
                       int budget) {
  if (!(r_avg >= 0.0 && r_avg <= 1.0)) {
    throw std::invalid_argument("build_table: r_avg must lie in [0,1]");
  }
  if (horizon < 0 || budget < 0) {
    throw std::invalid_argument("build_table: negative grid extent");
  }

  ValueTable table;
  table.r_avg = r_avg;
  table.horizon = horizon;
  table.budget = budget;
  table.values = Eigen::MatrixXd::Zero(horizon + 1, budget + 1);

  Eigen::VectorXd prev = Eigen::VectorXd::Zero(budget + 1);
  Eigen::VectorXd cur(budget + 1);

  for (int t = 1; t <= horizon; ++t) {
    for (int b = 0; b <= budget; ++b) {
      const int amax = std::min(b, market.delta_max);
      // g(a) = r_avg + prev[b-a] - prev[b] is nonincreasing in a and
      // g(0) >= 0, so the winning range [0, a*] ends at the largest a
      // with prev[b-a] >= prev[b] - r_avg.
      const double floor_value = prev[b] - r_avg;
      int lo = 0;
      int hi = amax;
      while (lo < hi) {
        const int mid = lo + (hi - lo + 1) / 2;
        if (prev[b - mid] >= floor_value) {
          lo = mid;
        } else {
          hi = mid - 1;
        }
      }
      const int a_star = lo;
      const double win = market.cum_win[a_star];
      const double carried =
          market.probs.head(a_star + 1)
              .dot(prev.segment(b - a_star, a_star + 1).reverse());
      cur[b] = (1.0 - win) * prev[b] + r_avg * win + carried;
    }
    table.values.row(t) = cur.transpose();
    prev.swap(cur);
  }
  return table;
}

BidDecision bid_price(const ValueTable& table, double theta, int t,
                      std::int64_t b) {
  if (t < 1 || t > table.horizon) {
    throw std::invalid_argument("bid_price: t outside [1,T]");
  }
  if (b < 0 || b > table.budget) {
    throw std::invalid_argument("bid_price: b outside [0,B]");
  }

  const int bi = static_cast<int>(b);
  const auto prev = table.values.row(t - 1);
  const auto g = [&](int delta) {
    return theta + prev[bi - delta] - prev[bi];
  };

  if (g(bi) >= 0.0) {
    return BidDecision{bi, std::nullopt};
  }
  if (g(0) < 0.0) {
    // theta < 0: no price has nonnegative marginal value, sit out.
    return BidDecision{0, std::nullopt};
  }
  // g is nonincreasing with g(0) >= 0 > g(b); bisect for the threshold A
  // with g(A) >= 0 and g(A+1) < 0.
  int lo = 0;
  int hi = bi;
  while (lo < hi) {
    const int mid = lo + (hi - lo + 1) / 2;
    if (g(mid) >= 0.0) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return BidDecision{lo, lo};
}

void save_table(const ValueTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("save_table: cannot open " + path);
  }
  const std::int32_t horizon = table.horizon;
  const std::int32_t budget = table.budget;
  out.write(reinterpret_cast<const char*>(&kTableMagic), sizeof(kTableMagic));
  out.write(reinterpret_cast<const char*>(&kTableVersion),
            sizeof(kTableVersion));
  out.write(reinterpret_cast<const char*>(&horizon), sizeof(horizon));
  out.write(reinterpret_cast<const char*>(&budget), sizeof(budget));
  out.write(reinterpret_cast<const char*>(&table.r_avg), sizeof(table.r_avg));
  // Rows are t layers; write them in t order.
  for (int t = 0; t <= table.horizon; ++t) {
    const Eigen::VectorXd row = table.values.row(t);
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(sizeof(double) * row.size()));
  }
  if (!out) {
    throw std::runtime_error("save_table: write failed for " + path);
  }
}

ValueTable load_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("load_table: cannot open " + path);
  }
  std::uint32_t magic = 0;
  std::uint32_t version = 0;
  std::int32_t horizon = 0;
  std::int32_t budget = 0;
  double r_avg = 0.0;
  in.read(reinterpret_cast<char*>(&magic), sizeof(magic));
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  in.read(reinterpret_cast<char*>(&horizon), sizeof(horizon));
  in.read(reinterpret_cast<char*>(&budget), sizeof(budget));
  in.read(reinterpret_cast<char*>(&r_avg), sizeof(r_avg));
  if (!in || magic != kTableMagic || version != kTableVersion) {
    throw std::runtime_error("load_table: bad header in " + path);
  }
  if (horizon < 0 || budget < 0) {
    throw std::runtime_error("load_table: corrupt extents in " + path);
  }

  ValueTable table;
  table.horizon = horizon;
  table.budget = budget;
  table.r_avg = r_avg;
  table.values.resize(horizon + 1, budget + 1);
  Eigen::VectorXd row(budget + 1);
  for (int t = 0; t <= horizon; ++t) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(sizeof(double) * row.size()));
    table.values.row(t) = row.transpose();
  }
  if (!in) {
    throw std::runtime_error("load_table: truncated file " + path);
  }
  return table;
}

void write_table_csv(const ValueTable& table, std::ostream& out) {
  out << "t,b,value\n";
  for (int t = 0; t <= table.horizon; ++t) {
    for (int b = 0; b <= table.budget; ++b) {
      out << t << ',' << b << ',' << table.values(t, b) << '\n';
    }
  }
}

}  // namespace riskbid
