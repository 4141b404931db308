#include "mpolsr/error.hpp"
#include "mpolsr/redundancy.hpp"
#include "mpolsr/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace mpolsr;

namespace {

std::vector<PathStats> occupancies(std::initializer_list<double> occ, double cap = 10.0)
{
  std::vector<PathStats> out;
  for (double o : occ)
    out.push_back({out.size(), o, cap, std::nullopt});
  return out;
}

std::vector<double> tail_sum(const std::vector<double>& dist)
{
  std::vector<double> tail(dist.size() + 1, 0.0);
  for (std::size_t x = dist.size(); x-- > 0;)
    tail[x] = tail[x + 1] + dist[x];
  return tail;
}

} // namespace

TEST_CASE("allocation examples")
{
  CHECK(allocate_buffer_heuristic(occupancies({0, 0, 0}), 6.0) == std::vector<double>{2.0, 2.0, 2.0});
  CHECK(allocate_buffer_heuristic(occupancies({0, 5}), 3.0) == std::vector<double>{2.0, 1.0});
  CHECK(allocate_buffer_heuristic(occupancies({10, 0}), 4.0) == std::vector<double>{0.0, 4.0});
  CHECK(allocate_buffer_heuristic(occupancies({0, 5}), 3.0, Normalization::Product) == std::vector<double>{6.0, 3.0});

  CHECK_THROWS_AS(allocate_buffer_heuristic(occupancies({10, 10}), 2.0), AllocationError);
  CHECK_THROWS_AS(allocate_buffer_heuristic(occupancies({11}), 2.0), InputError);
  CHECK_THROWS_AS(allocate_buffer_heuristic({}, 2.0), InputError);
  CHECK_THROWS_AS(allocate_buffer_heuristic(occupancies({1}), 0.0), InputError);
}

TEST_CASE("allocation conserves and is monotone")
{
  Rng rng(31);
  for (int trial = 0; trial < 10000; ++trial) {
    const auto m = 1 + rng.index(6);
    const double cap = rng.uniform(1.0, 60.0);
    std::vector<PathStats> stats;
    for (std::size_t i = 0; i < m; ++i)
      stats.push_back({i, rng.uniform(0.0, cap * 0.999), cap, std::nullopt});
    const double k_max = rng.uniform(0.1, 10.0);
    auto k = allocate_buffer_heuristic(stats, k_max);
    CHECK(std::fabs(std::accumulate(k.begin(), k.end(), 0.0) - k_max) <= 1e-9);

    const auto j = rng.index(m);
    auto raised = stats;
    raised[j].max_buffer_occupancy = rng.uniform(stats[j].max_buffer_occupancy, cap);
    bool any_room = false;
    for (const auto& s : raised)
      any_room = any_room || s.max_buffer_occupancy < s.buffer_capacity;
    if (!any_room)
      continue;
    auto k2 = allocate_buffer_heuristic(raised, k_max);
    for (std::size_t i = 0; i < m; ++i) {
      if (i == j)
        CHECK(k2[i] <= k[i] + 1e-12);
      else
        CHECK(k2[i] >= k[i] - 1e-12);
    }
  }
}

TEST_CASE("largest remainder rounding")
{
  std::vector<double> shares{2.0, 1.0};
  CHECK(largest_remainder_round(shares, 3) == std::vector<std::size_t>{2, 1});
  shares = {1.5, 1.5};
  CHECK(largest_remainder_round(shares, 3) == std::vector<std::size_t>{2, 1});
  shares = {0.2, 0.7, 1.1};
  CHECK(largest_remainder_round(shares, 2) == std::vector<std::size_t>{0, 1, 1});

  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> s(1 + rng.index(5));
    for (auto& v : s)
      v = rng.uniform(0.0, 4.0);
    auto total = static_cast<std::size_t>(std::llround(std::accumulate(s.begin(), s.end(), 0.0)));
    auto r = largest_remainder_round(s, total);
    CHECK(std::accumulate(r.begin(), r.end(), std::size_t{0}) == total);
    for (std::size_t i = 0; i < s.size(); ++i)
      CHECK(std::fabs(static_cast<double>(r[i]) - s[i]) < 1.0 + 1e-9);
  }
}

TEST_CASE("reception distribution examples")
{
  std::vector<double> p{1.0, 1.0};
  CHECK(reception_distribution(p) == std::vector<double>{0.0, 0.0, 1.0});
  p = {0.5, 0.5};
  CHECK(reception_distribution(p) == std::vector<double>{0.25, 0.5, 0.25});
  p = {0.3};
  auto one = reception_distribution(p);
  CHECK(one[0] == doctest::Approx(0.7));
  CHECK(one[1] == doctest::Approx(0.3));

  std::vector<double> big(17, 0.5);
  CHECK_THROWS_AS(reception_distribution(big), InputError);
  p = {1.5};
  CHECK_THROWS_AS(reception_distribution(p), InputError);
}

TEST_CASE("reception distribution against dynamic programming")
{
  Rng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> p(1 + rng.index(12));
    for (auto& v : p)
      v = rng.uniform();
    auto dist = reception_distribution(p);
    auto dp = oracle::poisson_binomial(p);
    REQUIRE(dist.size() == dp.size());
    CHECK(std::fabs(std::accumulate(dist.begin(), dist.end(), 0.0) - 1.0) <= 1e-12);
    for (std::size_t x = 0; x < dp.size(); ++x)
      CHECK(dist[x] == doctest::Approx(dp[x]).epsilon(1e-9));
  }
}

// Each bin's Monte-Carlo frequency is compared with the exact mass at 3
// standard errors wherever the normal approximation holds. Over many bins a
// few chance exceedances are expected (0.27% each), so their rate is
// bounded and nothing may stray beyond 5 standard errors. Sparse bins get an
// absolute bound instead.
TEST_CASE("reception distribution against monte carlo")
{
  Rng rng(43);
  const int draws = 20000;
  int bins = 0;
  int beyond_3 = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> p(1 + rng.index(8));
    for (auto& v : p)
      v = rng.uniform();
    auto dist = reception_distribution(p);
    std::vector<int> hits(p.size() + 1, 0);
    for (int i = 0; i < draws; ++i) {
      std::size_t x = 0;
      for (double q : p)
        x += rng.uniform() < q ? 1 : 0;
      ++hits[x];
    }
    for (std::size_t x = 0; x < dist.size(); ++x) {
      const double sigma = std::sqrt(dist[x] * (1.0 - dist[x]) / draws);
      const double dev = std::fabs(hits[x] / static_cast<double>(draws) - dist[x]);
      if (draws * dist[x] * (1.0 - dist[x]) < 10.0) {
        CHECK(dev <= 10.0 / draws);
        continue;
      }
      CHECK(dev <= 5.0 * sigma);
      ++bins;
      beyond_3 += dev > 3.0 * sigma ? 1 : 0;
    }
  }
  CHECK(beyond_3 <= bins / 100);
}

TEST_CASE("expected quality")
{
  std::vector<double> p{0.5, 0.5};
  auto dist = reception_distribution(p);
  CHECK(expected_quality({{1.0}, {0}}, dist) == 1.0);
  CHECK(expected_quality({{1.0}, {2}}, dist) == 0.25);
  CHECK(expected_quality({{0.0, 0.0}, {1, 2}}, dist) == 0.0);
  CHECK(expected_quality({{0.5, 0.5}, {1, 2}}, dist) == doctest::Approx(0.5 * 0.75 + 0.5 * 0.25));

  QualityModel bad{{1.0, 1.0}, {2, 1}};
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = {{1.0}, {1, 2}};
  CHECK_THROWS_AS(bad.validate(), InputError);
}

TEST_CASE("expected quality grows with every delivery probability")
{
  Rng rng(47);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> p(2 + rng.index(6));
    for (auto& v : p)
      v = rng.uniform();
    QualityModel model{{rng.uniform(), rng.uniform()}, {1 + rng.index(2), 2 + rng.index(p.size() - 1)}};
    const double base = expected_quality(model, reception_distribution(p));
    auto i = rng.index(p.size());
    p[i] = rng.uniform(p[i], 1.0);
    CHECK(expected_quality(model, reception_distribution(p)) >= base - 1e-12);
  }
}

TEST_CASE("choosing M and N")
{
  auto threshold = [](std::size_t m, std::size_t) { return QualityModel::threshold(m); };
  std::vector<std::pair<std::size_t, std::size_t>> one{{2, 3}};
  std::vector<double> probs{0.7};
  CHECK(optimize_mn(threshold, probs, one, 2.0) == std::pair<std::size_t, std::size_t>{2, 3});

  std::vector<std::pair<std::size_t, std::size_t>> cands{{2, 4}, {2, 3}, {2, 2}};
  std::vector<double> perfect{1.0};
  CHECK(optimize_mn(threshold, perfect, cands, 2.0) == std::pair<std::size_t, std::size_t>{2, 2});

  std::pair<std::size_t, std::size_t> best{};
  double best_q = -1.0;
  for (auto [m, n] : cands) {
    std::vector<double> p(n, 0.7);
    auto tail = tail_sum(oracle::poisson_binomial(p));
    if (tail[m] > best_q + 1e-12 || (std::fabs(tail[m] - best_q) <= 1e-12 && n < best.second)) {
      best = {m, n};
      best_q = tail[m];
    }
  }
  CHECK(best == std::pair<std::size_t, std::size_t>{2, 4});
  CHECK(optimize_mn(threshold, probs, cands, 2.0) == best);

  CHECK(optimize_mn(threshold, probs, cands, 1.5) == std::pair<std::size_t, std::size_t>{2, 3});
  CHECK_THROWS_AS(optimize_mn(threshold, probs, cands, 0.9), BudgetError);
  std::vector<std::pair<std::size_t, std::size_t>> none;
  CHECK_THROWS_AS(optimize_mn(threshold, probs, none, 2.0), InputError);
}
