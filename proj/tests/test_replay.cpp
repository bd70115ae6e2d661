#include <doctest.h>

#include <stdexcept>

#include <map>
#include <random>
#include <vector>

#include "riskbid/replay.hpp"

using riskbid::Experience;
using riskbid::ExperienceBuffer;
using riskbid::StateBeta;

namespace {

std::vector<StateBeta> episode(int n, int tag) {
  std::vector<StateBeta> states;
  for (int i = 0; i < n; ++i) {
    states.push_back(StateBeta{tag, i, 0.0});
  }
  return states;
}

}  // namespace

TEST_CASE("first episode is always admitted") {
  ExperienceBuffer buf(10);
  CHECK(buf.insert_episode(episode(3, 1), 0.5));
  CHECK(buf.size() == 3);
  CHECK(buf.min_reward() == 0.5);
}

TEST_CASE("full buffer rejects a lower reward") {
  ExperienceBuffer buf(4);
  CHECK(buf.insert_episode(episode(4, 1), 5.0));
  CHECK_FALSE(buf.insert_episode(episode(2, 2), 4.0));
  CHECK(buf.size() == 4);
  CHECK(buf.min_reward() == 5.0);
}

TEST_CASE("eviction keeps the best episodes") {
  // Capacity of two single-experience episodes; rewards 1, 3, 2 leave {3, 2}.
  ExperienceBuffer buf(2);
  CHECK(buf.insert_episode(episode(1, 1), 1.0));
  CHECK(buf.insert_episode(episode(1, 2), 3.0));
  CHECK(buf.insert_episode(episode(1, 3), 2.0));
  CHECK(buf.size() == 2);
  CHECK(buf.min_reward() == 2.0);

  std::mt19937_64 rng(1);
  bool saw_two = false;
  bool saw_three = false;
  for (const Experience& e : buf.sample(64, rng)) {
    saw_two |= e.v_episode == 2.0;
    saw_three |= e.v_episode == 3.0;
    CHECK(e.v_episode != 1.0);
  }
  CHECK(saw_two);
  CHECK(saw_three);
}

TEST_CASE("sampling from an empty buffer throws") {
  ExperienceBuffer buf(4);
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(buf.sample(1, rng), std::logic_error);
}

TEST_CASE("capacity bound and nondecreasing minimum under random ops") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> reward(0.0, 10.0);
  std::uniform_int_distribution<int> len(1, 7);
  ExperienceBuffer buf(50);
  double last_min = -1.0;
  for (int op = 0; op < 10000; ++op) {
    buf.insert_episode(episode(len(rng), op), reward(rng));
    CHECK(buf.size() <= buf.capacity());
    const double cur_min = buf.min_reward().value();
    CHECK(cur_min >= last_min);
    last_min = cur_min;
  }
}

TEST_CASE("uniform sampling is unbiased across entries") {
  // 100 distinguishable entries via (t,b); 1e5 draws; each frequency within
  // five standard deviations of uniform.
  ExperienceBuffer buf(100);
  std::vector<StateBeta> states;
  for (int i = 0; i < 100; ++i) {
    states.push_back(StateBeta{i, i, 0.0});
  }
  CHECK(buf.insert_episode(states, 1.0));

  std::mt19937_64 rng(123);
  std::map<int, int> freq;
  const int draws = 100000;
  for (const Experience& e : buf.sample(draws, rng)) {
    ++freq[e.t];
  }
  const double expect = draws / 100.0;
  const double sd = std::sqrt(draws * 0.01 * 0.99);
  for (int i = 0; i < 100; ++i) {
    CHECK(std::abs(freq[i] - expect) <= 5.0 * sd);
  }
}
