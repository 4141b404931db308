#include "mpolsr/cli.hpp"

#include "mpolsr/description_file.hpp"
#include "mpolsr/error.hpp"
#include "mpolsr/simulator.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cassert>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <mutex>
#include <sstream>
#include <thread>

namespace mpolsr {

namespace {

const std::vector<std::string> kSummaryColumns = {"runs", "delivery_ratio_stddev", "mean_end_to_end_delay_stddev"};

std::string
trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string>
split_list(const std::string& text)
{
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ','))
    if (auto t = trim(item); !t.empty())
      out.push_back(std::move(t));
  return out;
}

std::uint64_t
parse_seed(const std::string& text)
{
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError("seeds", "expected an unsigned integer, got '" + text + "'");
  return v;
}

std::vector<std::uint64_t>
parse_seeds(const std::string& text)
{
  std::vector<std::uint64_t> seeds;
  for (const auto& item : split_list(text)) {
    if (auto dots = item.find(".."); dots != std::string::npos) {
      const std::uint64_t lo = parse_seed(trim(item.substr(0, dots)));
      const std::uint64_t hi = parse_seed(trim(item.substr(dots + 2)));
      if (hi < lo)
        throw ConfigError("seeds", "empty range '" + item + "'");
      for (std::uint64_t s = lo; s <= hi; ++s)
        seeds.push_back(s);
    } else {
      seeds.push_back(parse_seed(item));
    }
  }
  return seeds;
}

std::string
join_row(const std::vector<std::string>& cells)
{
  std::string row;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i)
      row += ',';
    if (cells[i].find_first_of(",\"\n") == std::string::npos) {
      row += cells[i];
      continue;
    }
    row += '"';
    for (char c : cells[i])
      row += c == '"' ? std::string("\"\"") : std::string(1, c);
    row += '"';
  }
  return row;
}

Bytes
read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw InputError("cannot open '" + path + "'");
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void
write_file(const std::string& path, const Bytes& data)
{
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out)
    throw InputError("cannot write '" + path + "'");
}

ScenarioConfig
load_with_overrides(const std::string& path, const std::vector<std::string>& overrides)
{
  ScenarioConfig config = load_scenario(path);
  for (const auto& o : overrides)
    apply_override(config, o);
  config.validate();
  return config;
}

/// Opens `path` for writing, or hands back `fallback` when it is empty.
class OutputTarget
{
public:
  OutputTarget(const std::string& path, std::ostream& fallback)
    : m_stream(&fallback)
  {
    if (!path.empty()) {
      m_file.open(path);
      if (!m_file)
        throw InputError("cannot write '" + path + "'");
      m_stream = &m_file;
    }
  }
  std::ostream& get() { return *m_stream; }

private:
  std::ofstream m_file;
  std::ostream* m_stream;
};

double
mean_of(const std::vector<double>& v)
{
  double s = 0.0;
  for (double x : v)
    s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double
stddev_of(const std::vector<double>& v)
{
  if (v.size() < 2)
    return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v)
    ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

} // namespace

std::vector<std::string>
csv_columns()
{
  std::vector<std::string> cols = {"row_type", "schema_version"};
  for (const auto& [k, v] : scalar_settings(ScenarioConfig{}))
    cols.push_back(k);
  for (const auto& [k, v] : report_fields(MetricsReport{}))
    cols.push_back(k);
  cols.insert(cols.end(), kSummaryColumns.begin(), kSummaryColumns.end());
  return cols;
}

std::string
csv_header()
{
  return join_row(csv_columns());
}

std::string
csv_row(const ScenarioConfig& config, const MetricsReport& report)
{
  std::vector<std::string> cells = {"run", std::to_string(kCsvSchemaVersion)};
  for (auto& [k, v] : scalar_settings(config))
    cells.push_back(std::move(v));
  for (auto& [k, v] : report_fields(report))
    cells.push_back(std::move(v));
  cells.insert(cells.end(), {"1", "", ""});
  return join_row(cells);
}

std::vector<std::vector<std::pair<std::string, std::string>>>
SweepSpec::combinations() const
{
  std::vector<std::vector<std::pair<std::string, std::string>>> out = {{}};
  for (const auto& axis : axes) {
    std::vector<std::vector<std::pair<std::string, std::string>>> next;
    for (const auto& prefix : out)
      for (const auto& value : axis.values) {
        auto combo = prefix;
        combo.emplace_back(axis.key, value);
        next.push_back(std::move(combo));
      }
    out = std::move(next);
  }
  return out;
}

SweepSpec
parse_sweep(std::istream& in, const std::filesystem::path& base_dir)
{
  SweepSpec spec;
  std::vector<std::pair<std::string, std::string>> overrides;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    if (trim(line).empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "base") {
      spec.base = load_scenario((base_dir / value).string());
    } else if (key == "seeds") {
      spec.seeds = parse_seeds(value);
    } else if (key == "output") {
      spec.output = base_dir / value;
    } else if (key.rfind("sweep.", 0) == 0) {
      SweepAxis axis{key.substr(6), split_list(value)};
      if (axis.values.empty())
        throw ConfigError(key, "value list is empty");
      spec.axes.push_back(std::move(axis));
    } else {
      overrides.emplace_back(key, value);
    }
  }
  for (const auto& [k, v] : overrides)
    apply_setting(spec.base, k, v);
  if (spec.seeds.empty())
    throw ConfigError("seeds", "at least one seed is required");

  // Reject bad axis values before anything runs.
  for (const auto& combo : spec.combinations()) {
    ScenarioConfig c = spec.base;
    for (const auto& [k, v] : combo)
      apply_setting(c, k, v);
    c.validate();
  }
  return spec;
}

SweepSpec
load_sweep(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("", "cannot open sweep file '" + path.string() + "'");
  return parse_sweep(in, path.parent_path());
}

std::vector<SweepRun>
run_sweep(const SweepSpec& spec, std::size_t jobs)
{
  std::vector<SweepRun> runs;
  const auto combos = spec.combinations();
  for (std::size_t c = 0; c < combos.size(); ++c)
    for (std::uint64_t seed : spec.seeds) {
      SweepRun r;
      r.combination = c;
      r.seed = seed;
      r.config = spec.base;
      for (const auto& [k, v] : combos[c])
        apply_setting(r.config, k, v);
      r.config.rng_seed = seed;
      runs.push_back(std::move(r));
    }

  std::atomic<std::size_t> next{0};
  std::mutex failure_lock;
  std::optional<std::pair<std::size_t, std::string>> failure;
  auto worker = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      try {
        runs[i].report = run(runs[i].config);
      } catch (const std::exception& e) {
        std::lock_guard lock(failure_lock);
        if (!failure || i < failure->first)
          failure = {i, e.what()};
      }
    }
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, runs.size()));
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j)
    pool.emplace_back(worker);
  worker();
  for (auto& t : pool)
    t.join();

  if (failure) {
    std::string where;
    for (const auto& [k, v] : combos[runs[failure->first].combination])
      where += k + "=" + v + " ";
    throw Error("sweep run " + where + "seed=" + std::to_string(runs[failure->first].seed) + " failed: " +
                failure->second);
  }
  return runs;
}

void
write_sweep_csv(std::ostream& out, const SweepSpec& spec, const std::vector<SweepRun>& runs)
{
  out << csv_header() << '\n';
  for (const auto& r : runs)
    out << csv_row(r.config, r.report) << '\n';

  const auto combos = spec.combinations();
  const auto columns = csv_columns();
  for (std::size_t c = 0; c < combos.size(); ++c) {
    std::vector<const SweepRun*> group;
    for (const auto& r : runs)
      if (r.combination == c)
        group.push_back(&r);
    if (group.empty())
      continue;

    std::vector<std::string> cells = {"summary", std::to_string(kCsvSchemaVersion)};
    for (auto& [k, v] : scalar_settings(group.front()->config))
      cells.push_back(k == "rng_seed" ? std::string() : std::move(v));

    // Metric columns hold the mean over the seeds that produced a value.
    const auto metric_names = report_fields(MetricsReport{});
    std::vector<std::vector<double>> samples(metric_names.size());
    for (const SweepRun* r : group) {
      const auto fields = report_fields(r->report);
      for (std::size_t m = 0; m < fields.size(); ++m)
        if (!fields[m].second.empty())
          samples[m].push_back(std::stod(fields[m].second));
    }
    std::vector<double> ratios;
    std::vector<double> delays;
    for (std::size_t m = 0; m < metric_names.size(); ++m) {
      cells.push_back(samples[m].empty() ? std::string() : format_number(mean_of(samples[m])));
      if (metric_names[m].first == "delivery_ratio")
        ratios = samples[m];
      if (metric_names[m].first == "mean_end_to_end_delay")
        delays = samples[m];
    }
    cells.push_back(std::to_string(group.size()));
    cells.push_back(format_number(stddev_of(ratios)));
    cells.push_back(delays.empty() ? std::string() : format_number(stddev_of(delays)));
    assert(cells.size() == columns.size());
    out << join_row(cells) << '\n';
  }
}

namespace {

int
cmd_run(const std::string& scenario,
        const std::vector<std::string>& overrides,
        const std::string& output,
        const std::string& trace_path,
        bool header,
        std::ostream& out)
{
  const ScenarioConfig config = load_with_overrides(scenario, overrides);
  std::ofstream trace_file;
  if (!trace_path.empty()) {
    trace_file.open(trace_path);
    if (!trace_file)
      throw InputError("cannot write '" + trace_path + "'");
  }
  const SimulationResult result = simulate(config, trace_path.empty() ? nullptr : &trace_file);
  OutputTarget target(output, out);
  if (header)
    target.get() << csv_header() << '\n';
  target.get() << csv_row(config, result.report) << '\n';
  return 0;
}

int
cmd_trace(const std::string& scenario, const std::vector<std::string>& overrides, const std::string& output, std::ostream& out)
{
  const ScenarioConfig config = load_with_overrides(scenario, overrides);
  OutputTarget target(output, out);
  target.get() << "time\tnode\tkind\tdetail\n";
  simulate(config, &target.get());
  return 0;
}

int
cmd_sweep(const std::string& sweep_file,
          const std::vector<std::string>& overrides,
          std::size_t jobs,
          const std::string& output,
          std::ostream& out)
{
  SweepSpec spec = load_sweep(sweep_file);
  for (const auto& o : overrides)
    apply_override(spec.base, o);
  const auto runs = run_sweep(spec, jobs);
  const std::string path = !output.empty() ? output : spec.output ? spec.output->string() : std::string();
  OutputTarget target(path, out);
  write_sweep_csv(target.get(), spec, runs);
  return 0;
}

int
cmd_encode(const std::string& input, std::size_t m, std::size_t n, std::size_t row_bytes, std::string prefix, std::ostream& out)
{
  const Bytes data = read_file(input);
  if (prefix.empty())
    prefix = input;
  const auto files = encode_bytes(data, m, n, row_bytes);
  for (const auto& f : files) {
    const std::string path = prefix + ".d" + std::to_string(f.description_index);
    write_file(path, serialize(f));
    out << path << '\n';
  }
  return 0;
}

int
cmd_decode(const std::vector<std::string>& inputs, const std::string& output)
{
  std::vector<DescriptionFile> files;
  for (const auto& path : inputs)
    files.push_back(parse_description(read_file(path)));
  write_file(output, decode_descriptions(files));
  return 0;
}

} // namespace

int
cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Multipath OLSR laboratory: simulate, sweep and exercise the Mojette codec", "mpolsr"};
  app.require_subcommand(1);

  std::string scenario;
  std::vector<std::string> overrides;
  std::string output;
  std::string trace_path;
  bool no_header = false;

  auto* run_cmd = app.add_subcommand("run", "Run one scenario and print its CSV row");
  run_cmd->add_option("scenario", scenario, "Scenario file")->required();
  run_cmd->add_option("--set", overrides, "Override a scenario key (key=value), repeatable");
  run_cmd->add_option("--output,-o", output, "Write the CSV here instead of standard output");
  run_cmd->add_option("--trace", trace_path, "Also write the event trace (TSV) to this file");
  run_cmd->add_flag("--no-header", no_header, "Omit the CSV header line");

  std::string sweep_file;
  std::size_t jobs = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep across seeds");
  sweep_cmd->add_option("sweep", sweep_file, "Sweep file")->required();
  sweep_cmd->add_option("--set", overrides, "Override a base scenario key, repeatable");
  sweep_cmd->add_option("--jobs,-j", jobs, "Concurrent runs")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--output,-o", output, "Write the CSV here (overrides the sweep file)");

  std::string input;
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t row_bytes = 1024;
  std::string prefix;
  auto* encode_cmd = app.add_subcommand("encode", "Split a file into N descriptions, any M of which rebuild it");
  encode_cmd->add_option("input", input, "File to encode")->required();
  encode_cmd->add_option("-m,--m", m, "Descriptions needed")->required()->check(CLI::PositiveNumber);
  encode_cmd->add_option("-n,--n", n, "Descriptions produced")->required()->check(CLI::PositiveNumber);
  encode_cmd->add_option("--row-bytes", row_bytes, "Bytes per block row")->check(CLI::PositiveNumber);
  encode_cmd->add_option("--output-prefix,-o", prefix, "Description files are <prefix>.d<index>");

  std::vector<std::string> descriptions;
  auto* decode_cmd = app.add_subcommand("decode", "Rebuild a file from M or more description files");
  decode_cmd->add_option("descriptions", descriptions, "Description files")->required();
  decode_cmd->add_option("--output,-o", output, "Reconstructed file")->required();

  auto* trace_cmd = app.add_subcommand("trace", "Run a scenario and emit its event trace (TSV)");
  trace_cmd->add_option("scenario", scenario, "Scenario file")->required();
  trace_cmd->add_option("--set", overrides, "Override a scenario key (key=value), repeatable");
  trace_cmd->add_option("--output,-o", output, "Write the trace here instead of standard output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (*run_cmd)
      return cmd_run(scenario, overrides, output, trace_path, !no_header, out);
    if (*sweep_cmd)
      return cmd_sweep(sweep_file, overrides, jobs, output, out);
    if (*encode_cmd)
      return cmd_encode(input, m, n, row_bytes, prefix, out);
    if (*decode_cmd)
      return cmd_decode(descriptions, output);
    if (*trace_cmd)
      return cmd_trace(scenario, overrides, output, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}

} // namespace mpolsr
