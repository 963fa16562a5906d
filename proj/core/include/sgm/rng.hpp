#pragma once

#include <cstdint>
#include <cmath>
#include <limits>
#include <vector>

namespace sgm {

// Philox4x32-10 counter-based generator. Splittable: a (seed, stream) pair
// keys an independent sequence, so parallel replicas use stream = replica
// index without coordination. Satisfies UniformRandomBitGenerator.
class Rng {
  public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : key0_(static_cast<std::uint32_t>(seed)),
          key1_(static_cast<std::uint32_t>(seed >> 32)),
          ctr2_(static_cast<std::uint32_t>(stream)),
          ctr3_(static_cast<std::uint32_t>(stream >> 32)) {}

    // Derive a child generator; deterministic function of (this key, stream).
    Rng split(std::uint64_t stream) const {
        Rng r(static_cast<std::uint64_t>(key0_) | (static_cast<std::uint64_t>(key1_) << 32));
        r.ctr2_ = ctr2_ ^ static_cast<std::uint32_t>(stream);
        r.ctr3_ = ctr3_ ^ static_cast<std::uint32_t>(stream >> 32) ^ 0x9E3779B9u;
        return r;
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (have_) {
            have_ = false;
            return spare_;
        }
        std::uint32_t c0 = static_cast<std::uint32_t>(counter_);
        std::uint32_t c1 = static_cast<std::uint32_t>(counter_ >> 32);
        ++counter_;
        std::uint32_t x0 = c0, x1 = c1, x2 = ctr2_, x3 = ctr3_;
        std::uint32_t k0 = key0_, k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            std::uint64_t p0 = 0xD2511F53ULL * x0;
            std::uint64_t p1 = 0xCD9E8D57ULL * x2;
            std::uint32_t y0 = static_cast<std::uint32_t>(p1 >> 32) ^ x1 ^ k0;
            std::uint32_t y1 = static_cast<std::uint32_t>(p1);
            std::uint32_t y2 = static_cast<std::uint32_t>(p0 >> 32) ^ x3 ^ k1;
            std::uint32_t y3 = static_cast<std::uint32_t>(p0);
            x0 = y0; x1 = y1; x2 = y2; x3 = y3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        spare_ = (static_cast<std::uint64_t>(x2) << 32) | x3;
        have_ = true;
        return (static_cast<std::uint64_t>(x0) << 32) | x1;
    }

    // Uniform in [0,1).
    double uniform() {
        return static_cast<double>(operator()() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Lemire-style rejection-free-ish; n is small in all our uses.
        std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = operator()();
            if (r >= threshold || threshold == 0) return r % n;
        }
    }

    double normal() {
        // Box-Muller, one value per call (pair not cached: simplicity).
        double u1 = uniform();
        while (u1 == 0.0) u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    unsigned poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean < 30.0) {
            double limit = std::exp(-mean), prod = uniform();
            unsigned k = 0;
            while (prod > limit) {
                prod *= uniform();
                ++k;
            }
            return k;
        }
        // Split recursively; exact and adequate for the means we use.
        unsigned half = poisson(mean / 2.0);
        return half + poisson(mean - mean / 2.0);
    }

  private:
    std::uint32_t key0_, key1_;
    std::uint32_t ctr2_, ctr3_;
    std::uint64_t counter_ = 0;
    std::uint64_t spare_ = 0;
    bool have_ = false;
};

}  // namespace sgm
