#pragma once

#include <cstdint>

namespace artgen {

// Counter-based generator: the stream is a pure function of (seed, stream, counter),
// so replaying a seed is portable across platforms and thread schedules.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {}

    std::uint64_t next_u64() { return mix(seed_, stream_, counter_++); }

    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    std::uint64_t uniform_int(std::uint64_t n) { return n ? next_u64() % n : 0; }

    // Independent substream; does not advance this generator.
    CounterRng fork(std::uint64_t substream) const {
        return CounterRng(seed_, mix(stream_, substream, 0x5EEDu));
    }

    static std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
        std::uint64_t z = a + 0x9E3779B97F4A7C15ull * (b + 1) + 0xBF58476D1CE4E5B9ull * (c + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

}  // namespace artgen
