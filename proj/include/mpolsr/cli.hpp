#ifndef MPOLSR_CLI_HPP
#define MPOLSR_CLI_HPP

#include "mpolsr/metrics.hpp"
#include "mpolsr/scenario.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mpolsr {

/// Bumped whenever the CSV column set or order changes.
inline constexpr int kCsvSchemaVersion = 1;

std::vector<std::string> csv_columns();
std::string csv_header();
std::string csv_row(const ScenarioConfig& config, const MetricsReport& report);

struct SweepAxis
{
  std::string key;
  std::vector<std::string> values;
};

///
/// \brief A parameter sweep: every combination of axis values, each run
/// once per seed.
///
/// File format, one `key = value` per line:
///
///     base = scenario.txt        # optional, relative to the sweep file
///     seeds = 1, 2, 3            # or a range: 1..5
///     sweep.speed = 2, 4, 6      # one line per swept key
///     output = results.csv       # optional
///     radio_range = 200          # any other key overrides the base
///
struct SweepSpec
{
  ScenarioConfig base;
  std::vector<SweepAxis> axes;
  std::vector<std::uint64_t> seeds;
  std::optional<std::filesystem::path> output;

  /// Combinations in row order: the first axis varies slowest.
  std::vector<std::vector<std::pair<std::string, std::string>>> combinations() const;
};

SweepSpec parse_sweep(std::istream& in, const std::filesystem::path& base_dir = {});
SweepSpec load_sweep(const std::filesystem::path& path);

struct SweepRun
{
  std::size_t combination = 0;
  std::uint64_t seed = 0;
  ScenarioConfig config;
  MetricsReport report;
};

/// Runs every (combination, seed) pair on up to `jobs` threads. Results
/// come back ordered by (combination, seed) whatever the completion order.
/// The first failing run aborts the sweep with an Error naming it.
std::vector<SweepRun> run_sweep(const SweepSpec& spec, std::size_t jobs = 1);

/// Data rows followed by one summary row per combination.
void write_sweep_csv(std::ostream& out, const SweepSpec& spec, const std::vector<SweepRun>& runs);

/// Process entry point. Exit codes: 0 success, 1 usage, 2 validation,
/// 3 runtime.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace mpolsr

#endif
