#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace riskbid {

// One explored state from a finished episode, tagged at insert time with
// that episode's cumulative reward.
struct Experience {
  int t = 0;
  std::int64_t b = 0;
  double beta_hat = 0.0;
  double v_episode = 0.0;
};

struct StateBeta {
  int t = 0;
  std::int64_t b = 0;
  double beta_hat = 0.0;
};

// Bounded experience store keyed on episode reward. An episode is admitted
// only when the buffer is empty or its reward beats the current minimum;
// overflow evicts the lowest-reward entries first. The stored minimum is
// therefore nondecreasing over the life of the buffer.
class ExperienceBuffer {
 public:
  explicit ExperienceBuffer(std::size_t capacity);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return size_ == 0; }
  std::optional<double> min_reward() const;

  // Returns true when the episode was admitted.
  bool insert_episode(std::span<const StateBeta> states, double v_episode);

  // Uniform sample with replacement across all stored experiences.
  // Throws std::logic_error on an empty buffer.
  std::vector<Experience> sample(std::size_t n, std::mt19937_64& rng) const;

 private:
  std::size_t capacity_;
  std::size_t size_ = 0;
  std::map<double, std::vector<StateBeta>> buckets_;  // reward -> entries
};

}  // namespace riskbid
