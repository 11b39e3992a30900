#pragma once

#include "polyvol/core.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace polyvol {

/// Seedable random source for one chain.
///
/// Streams: the state is initialised from (seed, stream) through a seed
/// sequence, so `Rng(s, k)` for k = 0, 1, ... gives independent reproducible
/// streams. `split(k)` derives child stream k of the current stream; parallel
/// chains use `rng.split(chain_index)` and results stay identical for any
/// thread count.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0) : seed_(seed), stream_(stream)
    {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                          0x9e3779b9u};
        engine_.seed(seq);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    Rng split(std::uint64_t child) const
    {
        // splitmix64 finaliser keeps child streams of different parents apart
        std::uint64_t z = stream_ * 0x9e3779b97f4a7c15ULL + child + 1;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return Rng(seed_, z);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in (0, 1); safe for logarithms.
    double uniform_open()
    {
        double u;
        do {
            u = uniform();
        } while (u == 0.0);
        return u;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() { return normal_(engine_); }

    std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }

    template <typename Scalar>
    Vec<Scalar> gaussian_vector(Index d)
    {
        Vec<Scalar> g(d);
        for (Index i = 0; i < d; ++i) g(i) = static_cast<Scalar>(normal());
        return g;
    }

    /// Uniformly distributed direction on the unit sphere.
    template <typename Scalar>
    Vec<Scalar> direction(Index d)
    {
        Vec<Scalar> g;
        Scalar n;
        do {
            g = gaussian_vector<Scalar>(d);
            n = g.norm();
        } while (n == Scalar(0));
        return g / n;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

}  // namespace polyvol
