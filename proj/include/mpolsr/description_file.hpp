#ifndef MPOLSR_DESCRIPTION_FILE_HPP
#define MPOLSR_DESCRIPTION_FILE_HPP

#include "mpolsr/mdc_codec.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace mpolsr {

///
/// \brief One description of a whole file: description `description_index`
/// of every M-row block the file was cut into.
///
/// Serialized layout, all integers little-endian:
///
///     "MJTD"  u16 version  u16 M  u16 N  u16 description_index
///     i32 p   i32 q        u8 systematic_row
///     u32 row_length       u64 total_size  u64 fingerprint  u32 block_count
///     block_count x { u32 block_id  u32 bin_count  bin_count x u32 bin }
///
struct DescriptionFile
{
  static constexpr std::uint16_t kVersion = 1;

  std::uint16_t m_needed = 0;
  std::uint16_t n_total = 0;
  std::uint16_t description_index = 0;
  Direction direction;
  bool systematic_row = false;
  std::uint32_t row_length = 0;
  std::uint64_t total_size = 0;
  /// FNV-1a 64 of the original input.
  std::uint64_t fingerprint = 0;
  std::vector<Projection> blocks;
};

std::uint64_t fnv1a64(std::span<const std::uint8_t> data);

/// Cuts `input` into blocks of M rows of `row_length` bytes (the tail is
/// zero padded) and returns the N systematic descriptions.
std::vector<DescriptionFile> encode_bytes(std::span<const std::uint8_t> input,
                                          std::size_t m,
                                          std::size_t n,
                                          std::size_t row_length);

/// Rebuilds the input from any M distinct descriptions. Throws
/// InsufficientDescriptions or DescriptionMismatch.
Bytes decode_descriptions(std::span<const DescriptionFile> files);

Bytes serialize(const DescriptionFile& file);
/// Throws DescriptionMismatch on malformed or truncated input.
DescriptionFile parse_description(std::span<const std::uint8_t> data);

} // namespace mpolsr

#endif
