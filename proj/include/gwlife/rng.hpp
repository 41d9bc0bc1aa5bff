#pragma once

#include <cstdint>
#include <limits>

namespace gwlife {

/// Counter-based random stream keyed by (master seed, replicate, generation,
/// age). Every key yields an independent SplitMix64 sequence, so a cohort's
/// draws do not depend on the order in which cohorts or replicates are run.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t master_seed, std::uint64_t replicate, std::uint64_t generation,
               std::uint64_t age)
        : state_(key(master_seed, replicate, generation, age)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        state_ += kGolden;
        return mix(state_);
    }

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

    static constexpr std::uint64_t key(std::uint64_t seed, std::uint64_t rep, std::uint64_t gen,
                                       std::uint64_t age) {
        std::uint64_t h = mix(seed + kGolden);
        h = mix(h ^ (rep + 0x632be59bd9b4e019ULL));
        h = mix(h ^ (gen + 0x8cb92ba72f3d8dd7ULL));
        h = mix(h ^ (age + 0xd6e8feb86659fd93ULL));
        return h;
    }

    std::uint64_t state_;
};

} // namespace gwlife
