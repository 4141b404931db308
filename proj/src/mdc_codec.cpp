#include "mpolsr/mdc_codec.hpp"

#include "mpolsr/error.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <string>

namespace mpolsr {

std::uint64_t
DataBlock::mass() const
{
  std::uint64_t total = 0;
  for (const auto& row : rows)
    total = std::accumulate(row.begin(), row.end(), total);
  return total;
}

std::size_t
bin_count(std::size_t width, std::size_t height, Direction d)
{
  return (width - 1) * static_cast<std::size_t>(d.q) + (height - 1) * static_cast<std::size_t>(std::abs(d.p)) + 1;
}

std::size_t
Projection::wire_size() const
{
  constexpr std::size_t header = 24;
  return header + 2 * original_lengths.size() + bins.size() * (is_systematic_row ? 1 : 2);
}

std::vector<Direction>
default_directions(std::size_t count)
{
  std::vector<Direction> out;
  out.reserve(count);
  for (int i = 0; out.size() < count; ++i) {
    // 0, 1, -1, 2, -2, ...
    int p = (i % 2 == 1) ? (i + 1) / 2 : -(i / 2);
    out.push_back({p, 1});
  }
  return out;
}

CodecConfig
CodecConfig::standard(std::size_t m, std::size_t n, bool systematic)
{
  CodecConfig c;
  c.m_needed = m;
  c.n_total = n;
  c.systematic = systematic;
  c.directions = default_directions(systematic ? (n >= m ? n - m : 0) : n);
  c.validate();
  return c;
}

void
CodecConfig::validate() const
{
  if (m_needed == 0)
    throw ConfigError("mdc.m", "M must be positive");
  if (n_total < m_needed)
    throw ConfigError("mdc.n", "N must be at least M");
  const std::size_t expected = systematic ? n_total - m_needed : n_total;
  if (directions.size() != expected)
    throw ConfigError("directions",
                      "expected " + std::to_string(expected) + " directions, got " + std::to_string(directions.size()));
  std::set<int> ps;
  for (const auto& d : directions) {
    if (d.q != 1)
      throw ConfigError("directions", "every direction must have q = 1");
    if (!ps.insert(d.p).second)
      throw ConfigError("directions", "repeated p value " + std::to_string(d.p));
  }
}

namespace {

void
check_block(const DataBlock& block)
{
  if (block.height() == 0 || block.width() == 0)
    throw InputError("data block must have at least one row and one column");
  for (const auto& row : block.rows)
    if (row.size() != block.width())
      throw InputError("data block rows differ in length");
}

/// Offset of bin index 0 for a given geometry.
long long
bin_origin(std::size_t height, Direction d)
{
  return d.p > 0 ? -static_cast<long long>(d.p) * static_cast<long long>(height - 1) : 0;
}

long long
bin_index(long long k, long long l, Direction d, long long origin)
{
  return static_cast<long long>(d.q) * k - static_cast<long long>(d.p) * l - origin;
}

} // namespace

Projection
mojette_project(const DataBlock& block, Direction direction, CodecCounters* counters)
{
  check_block(block);
  if (direction.q < 1)
    throw InputError("projection direction needs q >= 1");

  const std::size_t width = block.width();
  const std::size_t height = block.height();
  const long long origin = bin_origin(height, direction);

  std::vector<std::uint64_t> acc(bin_count(width, height, direction), 0);
  for (std::size_t l = 0; l < height; ++l)
    for (std::size_t k = 0; k < width; ++k)
      acc[bin_index(k, l, direction, origin)] += block.rows[l][k];
  if (counters)
    counters->additions += width * height;

  Projection proj;
  proj.direction = direction;
  proj.bins.assign(acc.begin(), acc.end());
  proj.block_id = block.block_id;
  proj.row_length = static_cast<std::uint32_t>(width);
  proj.original_lengths = block.original_lengths;
  return proj;
}

std::vector<Projection>
encode(const DataBlock& block, const CodecConfig& config, CodecCounters* counters)
{
  config.validate();
  check_block(block);
  if (block.height() != config.m_needed)
    throw InputError("block has " + std::to_string(block.height()) + " rows, codec expects " +
                     std::to_string(config.m_needed));

  std::vector<Projection> out;
  out.reserve(config.n_total);
  if (config.systematic) {
    for (std::size_t l = 0; l < block.height(); ++l) {
      Projection row;
      row.bins.assign(block.rows[l].begin(), block.rows[l].end());
      row.block_id = block.block_id;
      row.description_index = static_cast<std::uint32_t>(l);
      row.is_systematic_row = true;
      row.row_length = static_cast<std::uint32_t>(block.width());
      row.original_lengths = block.original_lengths;
      out.push_back(std::move(row));
    }
  }
  for (const Direction& d : config.directions) {
    Projection proj = mojette_project(block, d, counters);
    proj.description_index = static_cast<std::uint32_t>(out.size());
    out.push_back(std::move(proj));
  }
  return out;
}

DataBlock
decode(std::span<const Projection> received, const CodecConfig& config, CodecCounters* counters)
{
  config.validate();
  const std::size_t height = config.m_needed;

  // One description per index; identical duplicates are tolerated.
  std::map<std::uint32_t, const Projection*> by_index;
  for (const Projection& d : received) {
    auto [it, fresh] = by_index.emplace(d.description_index, &d);
    if (!fresh && !(*it->second == d))
      throw DescriptionMismatch("conflicting copies of description " + std::to_string(d.description_index));
  }
  if (by_index.size() < height)
    throw InsufficientDescriptions("need " + std::to_string(height) + " distinct descriptions, got " +
                                   std::to_string(by_index.size()));

  const Projection& first = *by_index.begin()->second;
  const std::size_t width = first.row_length;
  if (width == 0)
    throw DescriptionMismatch("description declares an empty row length");

  std::vector<std::vector<std::uint8_t>> cells(height, std::vector<std::uint8_t>(width, 0));
  std::vector<bool> row_known(height, false);
  std::vector<const Projection*> projections;

  for (const auto& [index, d] : by_index) {
    if (index >= config.n_total)
      throw DescriptionMismatch("description index " + std::to_string(index) + " out of range");
    if (d->block_id != first.block_id || d->row_length != first.row_length ||
        d->original_lengths != first.original_lengths)
      throw DescriptionMismatch("descriptions belong to different blocks");
    const bool expect_row = config.systematic && index < height;
    if (d->is_systematic_row != expect_row)
      throw DescriptionMismatch("description " + std::to_string(index) + " has the wrong kind");
    if (expect_row) {
      if (d->bins.size() != width)
        throw DescriptionMismatch("systematic row has the wrong length");
      for (std::size_t k = 0; k < width; ++k) {
        if (d->bins[k] > 0xFF)
          throw DescriptionMismatch("systematic row holds a non-byte symbol");
        cells[index][k] = static_cast<std::uint8_t>(d->bins[k]);
      }
      row_known[index] = true;
      continue;
    }
    const std::size_t dir_index = config.systematic ? index - height : index;
    if (d->direction != config.directions[dir_index])
      throw DescriptionMismatch("description " + std::to_string(index) + " has an unexpected direction");
    if (d->bins.size() != bin_count(width, height, d->direction))
      throw DescriptionMismatch("projection has the wrong bin count");
    projections.push_back(d);
  }

  std::vector<std::size_t> unknown_rows;
  for (std::size_t l = 0; l < height; ++l)
    if (!row_known[l])
      unknown_rows.push_back(l);

  DataBlock out;
  out.block_id = first.block_id;
  out.original_lengths = first.original_lengths;

  if (!unknown_rows.empty()) {
    // Katz: one q = 1 projection per missing row suffices.
    projections.resize(std::min(projections.size(), unknown_rows.size()));
    if (projections.size() < unknown_rows.size())
      throw InsufficientDescriptions("not enough projections for the missing rows");

    std::uint64_t ops = 0;
    const std::size_t np = projections.size();
    std::vector<std::vector<long long>> residual(np);
    std::vector<std::vector<int>> crossing(np);
    std::vector<long long> origin(np);
    for (std::size_t j = 0; j < np; ++j) {
      const Projection& pr = *projections[j];
      origin[j] = bin_origin(height, pr.direction);
      residual[j].assign(pr.bins.begin(), pr.bins.end());
      crossing[j].assign(pr.bins.size(), 0);
      for (std::size_t l = 0; l < height; ++l) {
        for (std::size_t k = 0; k < width; ++k) {
          const long long b = bin_index(k, l, pr.direction, origin[j]);
          if (row_known[l]) {
            residual[j][b] -= cells[l][k];
            ++ops;
          } else {
            ++crossing[j][b];
          }
        }
      }
    }

    std::vector<std::vector<bool>> solved(height, std::vector<bool>(width, false));
    std::size_t remaining = unknown_rows.size() * width;
    std::deque<std::pair<std::size_t, long long>> ready;
    for (std::size_t j = 0; j < np; ++j)
      for (std::size_t b = 0; b < crossing[j].size(); ++b)
        if (crossing[j][b] == 1)
          ready.emplace_back(j, static_cast<long long>(b));

    while (!ready.empty() && remaining > 0) {
      auto [j, b] = ready.front();
      ready.pop_front();
      if (crossing[j][b] != 1)
        continue;
      const Direction d = projections[j]->direction;
      // Locate the single unsolved cell on line q k - p l = b + origin.
      std::size_t cell_k = 0;
      std::size_t cell_l = 0;
      bool found = false;
      for (std::size_t l : unknown_rows) {
        const long long num = b + origin[j] + static_cast<long long>(d.p) * static_cast<long long>(l);
        if (num < 0 || num % d.q != 0)
          continue;
        const long long k = num / d.q;
        if (k < static_cast<long long>(width) && !solved[l][k]) {
          cell_k = static_cast<std::size_t>(k);
          cell_l = l;
          found = true;
          break;
        }
      }
      if (!found)
        throw ReconstructionFailure("inconsistent crossing count during inversion");
      const long long value = residual[j][b];
      if (value < 0 || value > 0xFF)
        throw ReconstructionFailure("projection bins are inconsistent with byte symbols");
      cells[cell_l][cell_k] = static_cast<std::uint8_t>(value);
      solved[cell_l][cell_k] = true;
      --remaining;
      for (std::size_t i = 0; i < np; ++i) {
        const long long bi = bin_index(cell_k, cell_l, projections[i]->direction, origin[i]);
        residual[i][bi] -= value;
        ++ops;
        if (--crossing[i][bi] == 1)
          ready.emplace_back(i, bi);
      }
    }
    if (remaining > 0)
      throw ReconstructionFailure("inversion stalled with " + std::to_string(remaining) + " unknown cells");
    for (const auto& r : residual)
      if (std::any_of(r.begin(), r.end(), [](long long v) { return v != 0; }))
        throw ReconstructionFailure("projections disagree after inversion");
    if (counters)
      counters->additions += ops;
  }

  out.rows = std::move(cells);
  return out;
}

std::vector<Bytes>
deblock(const DataBlock& block)
{
  std::vector<Bytes> out;
  for (std::size_t l = 0; l < block.rows.size(); ++l) {
    const std::size_t len = l < block.original_lengths.size() ? block.original_lengths[l] : block.rows[l].size();
    if (len == 0)
      continue;
    out.emplace_back(block.rows[l].begin(), block.rows[l].begin() + std::min(len, block.rows[l].size()));
  }
  return out;
}

GeometricalBuffer::GeometricalBuffer(std::size_t rows_per_block, std::size_t max_row_length)
  : m_height(rows_per_block)
  , m_max_row(max_row_length)
{
  if (rows_per_block == 0 || max_row_length == 0)
    throw ConfigError("mdc.m", "geometrical buffer needs positive rows and row length");
}

std::optional<DataBlock>
GeometricalBuffer::push(std::span<const std::uint8_t> payload)
{
  if (payload.size() > m_max_row)
    throw InputError("payload of " + std::to_string(payload.size()) + " bytes exceeds row length " +
                     std::to_string(m_max_row));
  m_rows.emplace_back(payload.begin(), payload.end());
  if (m_rows.size() < m_height)
    return std::nullopt;
  return seal();
}

std::optional<DataBlock>
GeometricalBuffer::flush()
{
  if (m_rows.empty())
    return std::nullopt;
  return seal();
}

DataBlock
GeometricalBuffer::seal()
{
  std::size_t width = 1;
  for (const auto& r : m_rows)
    width = std::max(width, r.size());

  DataBlock block;
  block.block_id = m_next_id++;
  for (auto& r : m_rows) {
    block.original_lengths.push_back(r.size());
    r.resize(width, 0);
    block.rows.push_back(std::move(r));
  }
  while (block.rows.size() < m_height) {
    block.original_lengths.push_back(0);
    block.rows.emplace_back(width, 0);
  }
  m_rows.clear();
  return block;
}

} // namespace mpolsr
