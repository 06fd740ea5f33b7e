#pragma once

#include <cstdint>
#include <random>

namespace symflow {

// Deterministic RNG wrapper. std::uniform_real_distribution is
// implementation-defined, so all conversions are done by hand here; a fixed
// seed gives byte-identical sample streams on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t bits() { return gen_(); }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        // rejection sampling keeps the stream portable and unbiased
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % n;
    }

    // substream derived from (seed, index); used for per-sample independence
    static Rng substream(std::uint64_t seed, std::uint64_t index) {
        return Rng(seed * 0x9e3779b97f4a7c15ULL + index * 0xbf58476d1ce4e5b9ULL + 0x94d049bb133111ebULL);
    }

  private:
    std::mt19937_64 gen_;
};

} // namespace symflow
