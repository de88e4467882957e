#ifndef LIFTLAB_RNG_HPP
#define LIFTLAB_RNG_HPP

#include <cstdint>
#include <random>

namespace liftlab {

// splitmix64: mixes (seed, stream) into independent mt19937_64 seeds so chains
// are reproducible regardless of scheduling order.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 chain_rng(std::uint64_t seed, std::uint64_t chain_index) {
    std::uint64_t s = splitmix64(seed ^ splitmix64(chain_index + 0x517cc1b727220a95ULL));
    return std::mt19937_64(s);
}

class GaussianStream {
  public:
    explicit GaussianStream(std::mt19937_64& gen) : gen_(gen) {}
    double operator()() { return normal_(gen_); }

  private:
    std::mt19937_64& gen_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace liftlab

#endif
