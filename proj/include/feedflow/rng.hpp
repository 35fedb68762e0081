#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace feedflow {

// Deterministic RNG. All transforms are hand-rolled on top of mt19937_64 so
// that a seed produces the same stream regardless of standard library.
class Rng {
   public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // integer in [0, n)
    int below(int n) {
        int k = static_cast<int>(uniform() * n);
        return k >= n ? n - 1 : k;
    }

    double exponential(double rate) {
        return -std::log1p(-uniform()) / rate;
    }

   private:
    std::mt19937_64 gen_;
};

}  // namespace feedflow
