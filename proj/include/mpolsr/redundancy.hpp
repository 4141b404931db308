#ifndef MPOLSR_REDUNDANCY_HPP
#define MPOLSR_REDUNDANCY_HPP

#include "mpolsr/error.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace mpolsr {

struct PathStats
{
  std::size_t path_index = 0;
  /// Longest FIFO occupancy seen along the path, in packets.
  double max_buffer_occupancy = 0.0;
  double buffer_capacity = 1.0;
  std::optional<double> delivery_probability;
};

/// How the per-path weights (1 - maxB/Bmax) are normalized.
enum class Normalization
{
  /// Divide by the weight sum, so the allocations total k_max.
  Sum,
  /// Divide by the weight product, as the formula is typeset. Kept for
  /// comparison; the result does not total k_max in general.
  Product,
};

class AllocationError : public Error
{
public:
  using Error::Error;
};

/// K_i proportional to 1 - maxB_i / Bmax. Throws AllocationError when every
/// path is saturated, InputError on invalid stats.
std::vector<double> allocate_buffer_heuristic(std::span<const PathStats> stats,
                                              double k_max,
                                              Normalization norm = Normalization::Sum);

/// Integer split of real shares preserving their (rounded) total:
/// floor everything, then hand the leftover units to the largest
/// fractional parts, ties to the lower index.
std::vector<std::size_t> largest_remainder_round(std::span<const double> shares, std::size_t total);

/// P(X = x) for x = 0..N received descriptions, each delivered
/// independently with its own probability. Exact enumeration of all 2^N
/// outcomes; throws InputError for N > 16.
std::vector<double> reception_distribution(std::span<const double> delivery_probs);

struct QualityModel
{
  /// Quality gained at each level.
  std::vector<double> increments;
  /// Projections needed to reach each level, non-decreasing.
  std::vector<std::size_t> thresholds;

  void validate() const;
  /// One level worth 1, reached with M descriptions: the all-or-nothing
  /// threshold codec.
  static QualityModel threshold(std::size_t m) { return {{1.0}, {m}}; }
};

/// sum_j DQ_j * P(X >= r_j).
double expected_quality(const QualityModel& model, std::span<const double> distribution);

class BudgetError : public Error
{
public:
  using Error::Error;
};

using QualityModelFor = std::function<QualityModel(std::size_t m, std::size_t n)>;

/// Exhaustive search for the (M, N) maximizing expected quality with
/// N / M <= overhead_budget. Description i travels on path i mod |paths|.
/// Ties go to the smaller N, then the smaller M.
std::pair<std::size_t, std::size_t> optimize_mn(const QualityModelFor& model,
                                                std::span<const double> per_path_probs,
                                                std::span<const std::pair<std::size_t, std::size_t>> candidates,
                                                double overhead_budget);

} // namespace mpolsr

#endif
