#pragma once

#include <cstdint>
#include <random>

#include "sklab/core.hpp"

namespace sklab {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stream for replicate `index` of an experiment; independent of scheduling.
inline Rng replicate_rng(std::uint64_t master_seed, std::uint64_t index, std::uint64_t salt = 0) {
    std::uint64_t s = master_seed;
    std::uint64_t a = splitmix64(s);
    s = a ^ (index * 0xd1342543de82ef95ULL);
    std::uint64_t b = splitmix64(s);
    s = b ^ (salt + 0x632be59bd9b4e019ULL);
    std::uint64_t c = splitmix64(s);
    std::seed_seq seq{std::uint32_t(b), std::uint32_t(b >> 32), std::uint32_t(c), std::uint32_t(c >> 32)};
    return Rng(seq);
}

// Standard complex Gaussian: E|c|^2 = 1.
class ComplexGaussian {
public:
    cdouble operator()(Rng& rng) {
        double re = normal_(rng);
        double im = normal_(rng);
        return {re, im};
    }

private:
    std::normal_distribution<double> normal_{0.0, std::sqrt(0.5)};
};

}  // namespace sklab
