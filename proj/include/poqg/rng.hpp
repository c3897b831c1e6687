#ifndef POQG_RNG_HPP
#define POQG_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace poqg {

// splitmix64 finalizer. Used to key independent substreams from (seed,
// dataset, method, fold) tuples so reordering or parallelizing work items
// cannot change any stream's output.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ mix64(b));
}

inline std::uint64_t hash64(std::string_view s) {
    // FNV-1a.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Deterministic random stream. mt19937_64 output is fixed by the standard;
// the distributions in <random> are not, so uniform/normal draws are derived
// here by hand and are bit-identical across platforms and compilers.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer on [0, n). Rejection sampling keeps it unbiased.
    std::size_t uniform_index(std::size_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
        std::uint64_t x = engine_();
        while (x >= limit) {
            x = engine_();
        }
        return static_cast<std::size_t>(x % n);
    }

    // Standard normal via Box-Muller. The second value of each pair is
    // cached, so draws come in a fixed sequence.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) {
            u1 = uniform();
        }
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace poqg

#endif
