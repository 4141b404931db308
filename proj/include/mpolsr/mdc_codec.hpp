#ifndef MPOLSR_MDC_CODEC_HPP
#define MPOLSR_MDC_CODEC_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace mpolsr {

using Bytes = std::vector<std::uint8_t>;

///
/// \brief M rows of L byte symbols; the Mojette codec's 2D input.
///
/// Pixel f(k, l) is rows[l][k]: k indexes columns in [0, L), l indexes rows
/// in [0, M).
///
struct DataBlock
{
  std::vector<Bytes> rows;
  std::uint32_t block_id = 0;
  std::vector<std::size_t> original_lengths;

  std::size_t height() const { return rows.size(); }
  std::size_t width() const { return rows.empty() ? 0 : rows.front().size(); }
  std::uint64_t mass() const;

  bool operator==(const DataBlock&) const = default;
};

/// Projection direction (p, q), q >= 1.
struct Direction
{
  int p = 0;
  int q = 1;

  auto operator<=>(const Direction&) const = default;
};

/// Number of bins of a projection of an L-wide, M-high block:
/// (L - 1) q + (M - 1) |p| + 1.
std::size_t bin_count(std::size_t width, std::size_t height, Direction d);

///
/// \brief One description: either a verbatim row (systematic) or the
/// Mojette projection of the whole block along `direction`.
///
/// Also carries the block geometry so a receiver can rebuild padding.
///
struct Projection
{
  Direction direction;
  std::vector<std::uint32_t> bins;
  std::uint32_t block_id = 0;
  std::uint32_t description_index = 0;
  bool is_systematic_row = false;
  std::uint32_t row_length = 0;
  std::vector<std::size_t> original_lengths;

  /// Bytes this description occupies on the wire: a fixed header, the row
  /// lengths and the bins (one byte per systematic symbol, two otherwise).
  std::size_t wire_size() const;

  bool operator==(const Projection&) const = default;
};

struct CodecConfig
{
  std::size_t m_needed = 1;
  std::size_t n_total = 1;
  /// N - M directions in systematic mode, N otherwise.
  std::vector<Direction> directions;
  bool systematic = true;

  /// q = 1 and p = 0, 1, -1, 2, -2, ... in that order.
  static CodecConfig standard(std::size_t m, std::size_t n, bool systematic = true);
  /// Throws ConfigError on inconsistent counts or repeated/invalid
  /// directions.
  void validate() const;
};

/// The standard direction sequence (0,1), (1,1), (-1,1), (2,1), ...
std::vector<Direction> default_directions(std::size_t count);

/// Counts the additions and subtractions performed by the codec.
struct CodecCounters
{
  std::uint64_t additions = 0;
};

/// bins[b - b_min] = sum of f(k, l) over q k - p l = b.
Projection mojette_project(const DataBlock& block, Direction direction, CodecCounters* counters = nullptr);

std::vector<Projection> encode(const DataBlock& block, const CodecConfig& config, CodecCounters* counters = nullptr);

///
/// \brief Rebuilds a block from at least M descriptions of it.
///
/// Verbatim rows are placed first; known cells are subtracted from the
/// projections, then cells are solved from bins whose line crosses exactly
/// one unknown cell until none remain.
///
/// Throws InsufficientDescriptions, DescriptionMismatch (mixed blocks,
/// duplicates or inconsistent geometry) or ReconstructionFailure.
///
DataBlock decode(std::span<const Projection> received, const CodecConfig& config, CodecCounters* counters = nullptr);

/// Rows truncated to their original lengths; empty rows dropped.
std::vector<Bytes> deblock(const DataBlock& block);

///
/// \brief Sending buffer grouping consecutive packets into blocks of M rows.
///
class GeometricalBuffer
{
public:
  GeometricalBuffer(std::size_t rows_per_block, std::size_t max_row_length);

  /// Appends a payload; returns the block once M rows are held. Throws
  /// InputError for payloads longer than the maximum row length.
  std::optional<DataBlock> push(std::span<const std::uint8_t> payload);
  /// Emits the pending rows padded with empty rows, if any are pending.
  std::optional<DataBlock> flush();

  std::size_t pending() const { return m_rows.size(); }
  std::uint32_t next_block_id() const { return m_next_id; }

private:
  DataBlock seal();

  std::size_t m_height;
  std::size_t m_max_row;
  std::vector<Bytes> m_rows;
  std::uint32_t m_next_id = 0;
};

} // namespace mpolsr

#endif
