#ifndef GENRBF_RNG_HPP_
#define GENRBF_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <utility>

namespace genrbf {

// Counter-based random numbers: every draw is a pure function of
// (seed, stream, counter), so results do not depend on iteration order
// or thread count.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t a) {
    return splitmix64(seed ^ (0x9e3779b97f4a7c15ULL + a));
}

inline std::uint64_t hash3(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return splitmix64(hash_combine(hash_combine(seed, a), b));
}

/// Uniform double in [0, 1) from a 64-bit hash.
inline double u64_to_unit(std::uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// Uniform in [0,1) keyed by (seed, stream, counter).
inline double uniform_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return u64_to_unit(hash3(seed, stream, counter));
}

/// Small sequential generator for shuffles and sampling; deterministic
/// across platforms (unlike std::shuffle with a std engine).
class SplitMixRng {
  public:
    explicit SplitMixRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    double uniform() { return u64_to_unit(next()); }

    /// Unbiased integer in [0, bound).
    std::uint64_t bounded(std::uint64_t bound) {
        // rejection sampling on the top bits
        std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    /// Standard normal via Box-Muller.
    double normal() {
        double u1, u2;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    template <typename Container>
    void shuffle(Container& c) {
        for (std::size_t i = c.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(c[i - 1], c[j]);
        }
    }

  private:
    std::uint64_t state_;
};

}  // namespace genrbf

#endif  // GENRBF_RNG_HPP_
