#ifndef PDRIFT_RNG_HPP
#define PDRIFT_RNG_HPP

#include <cstdint>
#include <random>

namespace pdrift {

/// splitmix64 step; used to derive statistically independent stream seeds
/// from a (base seed, T index, replicate) tuple.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Per-replicate RNG stream.  Streams derived from distinct (a, b) pairs
/// under the same base seed do not overlap in practice.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : gen_(mix(seed, 0, 0)) {}
    RngStream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) : gen_(mix(seed, a, b)) {}

    double normal() { return normal_(gen_); }
    double uniform() { return uniform_(gen_); }
    std::uint64_t next_u64() { return gen_(); }

  private:
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
        std::uint64_t s = seed;
        std::uint64_t h = splitmix64(s);
        s ^= a * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL;
        h ^= splitmix64(s);
        s ^= b * 0xda942042e4dd58b5ULL + 0x9e3779b97f4a7c15ULL;
        h ^= splitmix64(s);
        return h;
    }

    std::mt19937_64 gen_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace pdrift

#endif
