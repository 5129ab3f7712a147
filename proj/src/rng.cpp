#include "p2pscore/rng.hpp"

#include <cmath>

namespace p2p {

size_t Rng::uniform_index(size_t n) {
    uint64_t range = n;
    uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    uint64_t x;
    do {
        x = gen_();
    } while (x >= limit);
    return static_cast<size_t>(x % range);
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Box-Muller; u1 is kept away from 0 so log() stays finite.
    double u1;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

long Rng::poisson(double lambda) {
    double l = std::exp(-lambda);
    long k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= uniform();
    } while (p > l);
    return k - 1;
}

std::vector<size_t> Rng::sample_indices(size_t n, size_t k) {
    std::vector<size_t> idx(n);
    for (size_t i = 0; i < n; ++i) idx[i] = i;
    if (k > n) k = n;
    for (size_t j = 0; j < k; ++j) {
        size_t pick = j + uniform_index(n - j);
        std::swap(idx[j], idx[pick]);
    }
    idx.resize(k);
    return idx;
}

size_t Rng::categorical(const std::vector<double>& cumulative) {
    double u = uniform() * cumulative.back();
    size_t lo = 0, hi = cumulative.size() - 1;
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (u < cumulative[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return lo;
}

}  // namespace p2p
