#include "riskbid/replay.hpp"

#include <algorithm>
#include <stdexcept>

namespace riskbid {

ExperienceBuffer::ExperienceBuffer(std::size_t capacity)
    : capacity_(capacity) {
  if (capacity == 0) {
    throw std::invalid_argument("ExperienceBuffer: capacity must be >= 1");
  }
}

std::optional<double> ExperienceBuffer::min_reward() const {
  if (buckets_.empty()) {
    return std::nullopt;
  }
  return buckets_.begin()->first;
}

bool ExperienceBuffer::insert_episode(std::span<const StateBeta> states,
                                      double v_episode) {
  if (states.empty()) {
    return false;
  }
  if (!buckets_.empty() && v_episode <= buckets_.begin()->first) {
    return false;
  }

  auto& bucket = buckets_[v_episode];
  bucket.insert(bucket.end(), states.begin(), states.end());
  size_ += states.size();

  while (size_ > capacity_) {
    auto lowest = buckets_.begin();
    const std::size_t excess = size_ - capacity_;
    if (lowest->second.size() <= excess) {
      size_ -= lowest->second.size();
      buckets_.erase(lowest);
    } else {
      lowest->second.resize(lowest->second.size() - excess);
      size_ -= excess;
    }
  }
  return true;
}

std::vector<Experience> ExperienceBuffer::sample(std::size_t n,
                                                 std::mt19937_64& rng) const {
  if (empty()) {
    throw std::logic_error("ExperienceBuffer: sample from empty buffer");
  }
  // Prefix counts over buckets for O(log B) index lookup.
  std::vector<std::size_t> prefix;
  std::vector<const std::pair<const double, std::vector<StateBeta>>*> slots;
  prefix.reserve(buckets_.size());
  slots.reserve(buckets_.size());
  std::size_t running = 0;
  for (const auto& bucket : buckets_) {
    running += bucket.second.size();
    prefix.push_back(running);
    slots.push_back(&bucket);
  }

  std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
  std::vector<Experience> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t idx = pick(rng);
    const auto it = std::upper_bound(prefix.begin(), prefix.end(), idx);
    const std::size_t slot = static_cast<std::size_t>(it - prefix.begin());
    const std::size_t before = slot == 0 ? 0 : prefix[slot - 1];
    const StateBeta& sb = slots[slot]->second[idx - before];
    out.push_back(Experience{sb.t, sb.b, sb.beta_hat, slots[slot]->first});
  }
  return out;
}

}  // namespace riskbid
