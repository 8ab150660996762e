#pragma once

#include <cmath>
#include <cstdint>

namespace dlab {

// Counter-based generator: output i is a SplitMix64 finalizer applied to
// seed + i * golden gamma. Streams are derived with fork().
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type(0); }

    result_type operator()() { return at(counter_++); }
    result_type at(std::uint64_t i) const { return mix(key_ + (i + 1) * 0x9e3779b97f4a7c15ULL); }

    // [0,1)
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    double normal()
    {
        double u1 = uniform();
        while (u1 <= 0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2 * std::log(u1)) * std::cos(6.283185307179586476925 * u2);
    }

    CounterRng fork(std::uint64_t stream) const { return CounterRng(key_, stream); }
    std::uint64_t counter() const { return counter_; }

private:
    static std::uint64_t mix(std::uint64_t z)
    {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace dlab
