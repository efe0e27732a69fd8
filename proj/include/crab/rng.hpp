#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace crab {

// Deterministic random stream. The generator is a SplitMix64-seeded
// xoshiro256** so that sequences are identical across platforms and standard
// libraries; std:: distributions are avoided for the same reason.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    // Derives an independent stream from a master seed and a stream name
    // (init, dropout, shuffle, data-gen, ...). Changing one stream's
    // consumption never perturbs the others.
    static Rng substream(std::uint64_t master_seed, std::string_view name);

    std::uint64_t next_u64();

    // Uniform in [0, 1).
    double uniform();
    // Uniform in [lo, hi).
    double uniform(double lo, double hi);
    // Standard normal via Box-Muller (pairs cached).
    double normal();
    // Uniform integer in [0, n).
    std::uint64_t uniform_int(std::uint64_t n);
    // True with probability p.
    bool bernoulli(double p);

    // Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_int(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::uint64_t state_[4];
    bool have_cached_normal_ = false;
    double cached_normal_ = 0.0;
};

}  // namespace crab
