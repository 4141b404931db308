#include "mpolsr/description_file.hpp"

#include "mpolsr/error.hpp"

#include <algorithm>
#include <cstring>
#include <set>
#include <string>

namespace mpolsr {

std::uint64_t
fnv1a64(std::span<const std::uint8_t> data)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::vector<std::size_t>
row_lengths(std::uint64_t total_size, std::size_t m, std::size_t row_length, std::size_t block)
{
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < m; ++r) {
    const std::uint64_t start = (static_cast<std::uint64_t>(block) * m + r) * row_length;
    out.push_back(start >= total_size ? 0 : static_cast<std::size_t>(std::min<std::uint64_t>(row_length, total_size - start)));
  }
  return out;
}

std::size_t
block_count(std::uint64_t total_size, std::size_t m, std::size_t row_length)
{
  const std::uint64_t per_block = static_cast<std::uint64_t>(m) * row_length;
  return static_cast<std::size_t>((total_size + per_block - 1) / per_block);
}

class Writer
{
public:
  template <typename T>
  void put(T value)
  {
    for (std::size_t i = 0; i < sizeof(T); ++i)
      m_out.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(value) >> (8 * i)));
  }
  void raw(const char* s, std::size_t n) { m_out.insert(m_out.end(), s, s + n); }
  Bytes take() { return std::move(m_out); }

private:
  Bytes m_out;
};

class Reader
{
public:
  explicit Reader(std::span<const std::uint8_t> data)
    : m_data(data)
  {
  }

  template <typename T>
  T get()
  {
    need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      v |= static_cast<std::uint64_t>(m_data[m_pos + i]) << (8 * i);
    m_pos += sizeof(T);
    return static_cast<T>(v);
  }
  void expect(const char* s, std::size_t n)
  {
    need(n);
    if (std::memcmp(m_data.data() + m_pos, s, n) != 0)
      throw DescriptionMismatch("not a description file (bad magic)");
    m_pos += n;
  }
  bool done() const { return m_pos == m_data.size(); }
  std::size_t left() const { return m_data.size() - m_pos; }

private:
  void need(std::size_t n) const
  {
    if (m_data.size() - m_pos < n)
      throw DescriptionMismatch("description file is truncated");
  }

  std::span<const std::uint8_t> m_data;
  std::size_t m_pos = 0;
};

} // namespace

std::vector<DescriptionFile>
encode_bytes(std::span<const std::uint8_t> input, std::size_t m, std::size_t n, std::size_t row_length)
{
  if (row_length == 0)
    throw InputError("row length must be positive");
  if (n > 0xFFFF)
    throw ConfigError("mdc.n", "N too large for the file format");
  const CodecConfig config = CodecConfig::standard(m, n);
  const std::uint64_t fingerprint = fnv1a64(input);

  std::vector<DescriptionFile> files(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& f = files[i];
    f.m_needed = static_cast<std::uint16_t>(m);
    f.n_total = static_cast<std::uint16_t>(n);
    f.description_index = static_cast<std::uint16_t>(i);
    f.systematic_row = i < m;
    f.direction = i < m ? Direction{0, 1} : config.directions[i - m];
    f.row_length = static_cast<std::uint32_t>(row_length);
    f.total_size = input.size();
    f.fingerprint = fingerprint;
  }

  const std::size_t blocks = block_count(input.size(), m, row_length);
  for (std::size_t b = 0; b < blocks; ++b) {
    DataBlock block;
    block.block_id = static_cast<std::uint32_t>(b);
    block.original_lengths = row_lengths(input.size(), m, row_length, b);
    for (std::size_t r = 0; r < m; ++r) {
      Bytes row(row_length, 0);
      const std::size_t start = (b * m + r) * row_length;
      std::copy_n(input.begin() + static_cast<std::ptrdiff_t>(std::min(start, input.size())),
                  block.original_lengths[r],
                  row.begin());
      block.rows.push_back(std::move(row));
    }
    auto descriptions = encode(block, config);
    for (std::size_t i = 0; i < n; ++i)
      files[i].blocks.push_back(std::move(descriptions[i]));
  }
  return files;
}

Bytes
decode_descriptions(std::span<const DescriptionFile> files)
{
  if (files.empty())
    throw InsufficientDescriptions("no description files given");
  const DescriptionFile& ref = files.front();
  std::set<std::uint16_t> indices;
  for (const auto& f : files) {
    if (f.m_needed != ref.m_needed || f.n_total != ref.n_total || f.row_length != ref.row_length ||
        f.total_size != ref.total_size || f.fingerprint != ref.fingerprint || f.blocks.size() != ref.blocks.size())
      throw DescriptionMismatch("description files come from different inputs or settings");
    indices.insert(f.description_index);
  }
  if (indices.size() < ref.m_needed)
    throw InsufficientDescriptions("need " + std::to_string(ref.m_needed) + " distinct descriptions, got " +
                                   std::to_string(indices.size()));

  const CodecConfig config = CodecConfig::standard(ref.m_needed, ref.n_total);
  Bytes out;
  out.reserve(static_cast<std::size_t>(ref.total_size));
  std::vector<Projection> received;
  for (std::size_t b = 0; b < ref.blocks.size(); ++b) {
    received.clear();
    for (const auto& f : files)
      received.push_back(f.blocks[b]);
    const DataBlock block = decode(received, config);
    for (const auto& row : deblock(block))
      out.insert(out.end(), row.begin(), row.end());
  }
  if (out.size() != ref.total_size || fnv1a64(out) != ref.fingerprint)
    throw ReconstructionFailure("reconstructed data does not match the recorded fingerprint");
  return out;
}

Bytes
serialize(const DescriptionFile& f)
{
  Writer w;
  w.raw("MJTD", 4);
  w.put<std::uint16_t>(DescriptionFile::kVersion);
  w.put<std::uint16_t>(f.m_needed);
  w.put<std::uint16_t>(f.n_total);
  w.put<std::uint16_t>(f.description_index);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(f.direction.p));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(f.direction.q));
  w.put<std::uint8_t>(f.systematic_row ? 1 : 0);
  w.put<std::uint32_t>(f.row_length);
  w.put<std::uint64_t>(f.total_size);
  w.put<std::uint64_t>(f.fingerprint);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(f.blocks.size()));
  for (const auto& p : f.blocks) {
    w.put<std::uint32_t>(p.block_id);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(p.bins.size()));
    for (std::uint32_t bin : p.bins)
      w.put<std::uint32_t>(bin);
  }
  return w.take();
}

DescriptionFile
parse_description(std::span<const std::uint8_t> data)
{
  Reader r(data);
  r.expect("MJTD", 4);
  if (r.get<std::uint16_t>() != DescriptionFile::kVersion)
    throw DescriptionMismatch("unsupported description file version");
  DescriptionFile f;
  f.m_needed = r.get<std::uint16_t>();
  f.n_total = r.get<std::uint16_t>();
  f.description_index = r.get<std::uint16_t>();
  f.direction.p = static_cast<std::int32_t>(r.get<std::uint32_t>());
  f.direction.q = static_cast<std::int32_t>(r.get<std::uint32_t>());
  f.systematic_row = r.get<std::uint8_t>() != 0;
  f.row_length = r.get<std::uint32_t>();
  f.total_size = r.get<std::uint64_t>();
  f.fingerprint = r.get<std::uint64_t>();
  const std::uint32_t count = r.get<std::uint32_t>();
  if (f.m_needed == 0 || f.n_total < f.m_needed || f.description_index >= f.n_total || f.row_length == 0)
    throw DescriptionMismatch("description file header is inconsistent");
  if (count != block_count(f.total_size, f.m_needed, f.row_length))
    throw DescriptionMismatch("description file block count does not match its size");

  for (std::uint32_t b = 0; b < count; ++b) {
    Projection p;
    p.block_id = r.get<std::uint32_t>();
    const std::uint32_t bins = r.get<std::uint32_t>();
    if (bins > r.left() / 4)
      throw DescriptionMismatch("description file is truncated");
    p.bins.resize(bins);
    for (auto& bin : p.bins)
      bin = r.get<std::uint32_t>();
    p.direction = f.direction;
    p.description_index = f.description_index;
    p.is_systematic_row = f.systematic_row;
    p.row_length = f.row_length;
    p.original_lengths = row_lengths(f.total_size, f.m_needed, f.row_length, b);
    f.blocks.push_back(std::move(p));
  }
  if (!r.done())
    throw DescriptionMismatch("trailing bytes after description data");
  return f;
}

} // namespace mpolsr
