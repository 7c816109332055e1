#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "schoice/rational.hpp"

namespace schoice {

/// Seeded random source whose draws are reproducible across platforms.
/// std::mt19937_64 output is fully specified by the standard; the
/// distribution helpers here avoid <random> distributions, whose output is
/// implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, n), unbiased via rejection. n must be > 0.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = n * (~std::uint64_t{0} / n);
        std::uint64_t draw;
        do {
            draw = next();
        } while (draw >= limit);
        return draw % n;
    }

    /// Uniform big integer in [0, n), by masking to bit-length and rejecting.
    BigInt below_big(const BigInt& n) {
        if (n <= std::uint64_t(~std::uint64_t{0}))
            return BigInt(below(n.convert_to<std::uint64_t>()));
        const unsigned bits = boost::multiprecision::msb(n) + 1;
        const unsigned words = (bits + 63) / 64;
        while (true) {
            BigInt draw = 0;
            for (unsigned w = 0; w < words; ++w) {
                draw <<= 64;
                draw |= BigInt(next());
            }
            draw >>= words * 64 - bits;
            if (draw < n)
                return draw;
        }
    }

    /// Bernoulli draw with success probability p (clamped to [0, 1]).
    bool bernoulli(double p) {
        if (p <= 0.0)
            return false;
        if (p >= 1.0)
            return true;
        // 53-bit threshold comparison; exact for any representable p.
        const auto threshold = static_cast<std::uint64_t>(p * 9007199254740992.0);
        return (next() >> 11) < threshold;
    }

    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t t = values.size(); t > 1; --t)
            std::swap(values[t - 1], values[below(t)]);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace schoice
