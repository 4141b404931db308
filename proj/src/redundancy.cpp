#include "mpolsr/redundancy.hpp"

#include "mpolsr/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace mpolsr {

std::vector<double>
allocate_buffer_heuristic(std::span<const PathStats> stats, double k_max, Normalization norm)
{
  if (stats.empty())
    throw InputError("no paths to allocate redundancy over");
  if (!(k_max > 0.0) || !std::isfinite(k_max))
    throw InputError("k_max must be positive");

  std::vector<double> weight;
  weight.reserve(stats.size());
  for (const auto& s : stats) {
    if (!(s.buffer_capacity > 0.0) || s.max_buffer_occupancy < 0.0 || s.max_buffer_occupancy > s.buffer_capacity)
      throw InputError("path stats need 0 <= occupancy <= capacity and capacity > 0");
    weight.push_back(1.0 - s.max_buffer_occupancy / s.buffer_capacity);
  }

  double denom = 0.0;
  if (norm == Normalization::Sum) {
    denom = std::accumulate(weight.begin(), weight.end(), 0.0);
  } else {
    denom = 1.0;
    for (double w : weight)
      denom *= w;
  }
  if (!(denom > 0.0))
    throw AllocationError("every path is fully congested");

  std::vector<double> k(weight.size());
  std::transform(weight.begin(), weight.end(), k.begin(), [&](double w) { return w / denom * k_max; });
  return k;
}

std::vector<std::size_t>
largest_remainder_round(std::span<const double> shares, std::size_t total)
{
  std::vector<std::size_t> out(shares.size(), 0);
  if (shares.empty())
    return out;
  std::size_t assigned = 0;
  std::vector<std::pair<double, std::size_t>> remainders;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    const double s = std::max(0.0, shares[i]);
    out[i] = static_cast<std::size_t>(std::floor(s));
    assigned += out[i];
    remainders.push_back({s - std::floor(s), i});
  }
  std::stable_sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t j = 0; assigned < total; j = (j + 1) % remainders.size()) {
    ++out[remainders[j].second];
    ++assigned;
  }
  return out;
}

std::vector<double>
reception_distribution(std::span<const double> probs)
{
  const std::size_t n = probs.size();
  if (n > 16)
    throw InputError("reception distribution is limited to 16 descriptions");
  for (double p : probs)
    if (!(p >= 0.0 && p <= 1.0))
      throw InputError("delivery probabilities must lie in [0, 1]");

  std::vector<double> dist(n + 1, 0.0);
  for (std::uint32_t outcome = 0; outcome < (1u << n); ++outcome) {
    double pr = 1.0;
    for (std::size_t i = 0; i < n; ++i)
      pr *= (outcome >> i & 1u) ? probs[i] : 1.0 - probs[i];
    dist[static_cast<std::size_t>(std::popcount(outcome))] += pr;
  }
  return dist;
}

void
QualityModel::validate() const
{
  if (increments.size() != thresholds.size())
    throw InputError("quality model needs one threshold per increment");
  if (!std::is_sorted(thresholds.begin(), thresholds.end()))
    throw InputError("quality thresholds must be non-decreasing");
  for (double dq : increments)
    if (!(dq >= 0.0))
      throw InputError("quality increments must be non-negative");
}

double
expected_quality(const QualityModel& model, std::span<const double> distribution)
{
  model.validate();
  double eq = 0.0;
  for (std::size_t j = 0; j < model.increments.size(); ++j) {
    double tail = 0.0;
    for (std::size_t x = model.thresholds[j]; x < distribution.size(); ++x)
      tail += distribution[x];
    eq += model.increments[j] * tail;
  }
  return eq;
}

std::pair<std::size_t, std::size_t>
optimize_mn(const QualityModelFor& model,
            std::span<const double> per_path_probs,
            std::span<const std::pair<std::size_t, std::size_t>> candidates,
            double overhead_budget)
{
  if (candidates.empty())
    throw InputError("no (M, N) candidates");
  if (per_path_probs.empty())
    throw InputError("no paths");

  std::optional<std::pair<std::size_t, std::size_t>> best;
  double best_q = -1.0;
  for (const auto& [m, n] : candidates) {
    if (m == 0 || n < m)
      throw InputError("candidate needs 0 < M <= N");
    if (static_cast<double>(n) / static_cast<double>(m) > overhead_budget)
      continue;
    std::vector<double> probs(n);
    for (std::size_t i = 0; i < n; ++i)
      probs[i] = per_path_probs[i % per_path_probs.size()];
    const double q = expected_quality(model(m, n), reception_distribution(probs));
    const bool better = !best || q > best_q || (q == best_q && (n < best->second || (n == best->second && m < best->first)));
    if (better) {
      best = {m, n};
      best_q = q;
    }
  }
  if (!best)
    throw BudgetError("no candidate fits the overhead budget");
  return *best;
}

} // namespace mpolsr
