#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace spar {

// Derives an independent stream seed from (base seed, purpose label, index).
// Training code keeps one stream per purpose (init, shuffle, augment, ...) so
// that enabling or disabling one consumer never shifts another stream.
std::uint64_t mix_seed(std::uint64_t seed, std::string_view purpose, std::uint64_t index = 0);

// mt19937_64 with hand-rolled output transforms. std::uniform_real_distribution
// and friends are implementation-defined, these are not.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0,1) with 53 random bits.
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller (one value per two uniforms, no caching).
    double normal() {
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::uint64_t i = v.size(); i > 1; --i) {
            std::uint64_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 eng_;
};

} // namespace spar
