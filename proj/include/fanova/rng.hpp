#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace fanova {

// splitmix64 step; used to whiten seeds and derive substreams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seed of the `index`-th substream under `master`. Distinct indices
// give decorrelated streams, independent of execution order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t s = master;
    const std::uint64_t a = splitmix64(s);
    s = a ^ (index + 0x9e3779b97f4a7c15ULL);
    return splitmix64(s);
}

// Deterministic RNG. The engine is std::mt19937_64 (bit-exact across
// platforms); all distributions are implemented here because the
// standard library's distribution algorithms are not pinned by the
// standard and would break run-to-run reproducibility guarantees.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        engine_.seed(splitmix64(s));
    }

    // Independent stream for unit `index` under `master`; see
    // derive_seed.
    static Rng substream(std::uint64_t master, std::uint64_t index) {
        return Rng(derive_seed(master, index));
    }

    std::uint64_t bits() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Marsaglia polar method; caches the second variate.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Unbiased integer in [0, n) via rejection.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t reject = (0ULL - n) % n;
        for (;;) {
            const std::uint64_t r = engine_();
            if (r >= reject) return r % n;
        }
    }

    // Fisher-Yates; uniform over all permutations.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            using std::swap;
            swap(v[i - 1], v[j]);
        }
    }

    // Random permutation of 0..n-1.
    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = i;
        shuffle(p);
        return p;
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace fanova
