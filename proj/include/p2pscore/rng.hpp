#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace p2p {

// Deterministic random source. All distributions are implemented by hand on
// top of mt19937_64 so that streams are bit-identical across platforms and
// standard-library versions (std::uniform_real_distribution and friends make
// no such guarantee).
class Rng {
   public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n); n must be positive. Rejection sampling keeps
    // the draw exactly unbiased.
    size_t uniform_index(size_t n);

    // Standard normal via Box-Muller (caches the second deviate).
    double normal();

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Poisson by Knuth's product-of-uniforms method; fine for small lambda.
    long poisson(double lambda);

    // First k entries of a random permutation of {0..n-1} (partial
    // Fisher-Yates): a uniform sample of k distinct indices.
    std::vector<size_t> sample_indices(size_t n, size_t k);

    // In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[uniform_index(i)]);
        }
    }

    // Index into cumulative-probability table (sampling from a categorical
    // distribution given inclusive prefix sums of the class probabilities).
    size_t categorical(const std::vector<double>& cumulative);

   private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace p2p
