#ifndef MPOLSR_RNG_HPP
#define MPOLSR_RNG_HPP

#include <cstddef>
#include <cstdint>
#include <random>

namespace mpolsr {

/// One step of the splitmix64 generator; advances `state`.
inline std::uint64_t
splitmix64(std::uint64_t& state)
{
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

///
/// \brief Seeded random stream with platform-independent draws.
///
/// The standard distributions are implementation-defined, so uniform
/// values are derived from the raw 64-bit engine output directly.
///
class Rng
{
public:
  explicit Rng(std::uint64_t seed)
    : m_engine(seed)
  {
  }

  /// Independent stream `stream` of the run seeded with `seed`.
  static Rng derive(std::uint64_t seed, std::uint64_t stream)
  {
    std::uint64_t s = seed ^ (stream * 0xd1b54a32d192ed03ULL);
    splitmix64(s);
    return Rng(splitmix64(s));
  }

  std::uint64_t next() { return m_engine(); }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(m_engine() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform in [0, n); n must be positive.
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

private:
  std::mt19937_64 m_engine;
};

} // namespace mpolsr

#endif
