#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

namespace cos {

// Deterministic RNG. std::uniform_real_distribution and friends are
// implementation-defined, so all draws here are derived from raw
// mt19937_64 output with fixed arithmetic; identical seeds give identical
// streams on every platform.
class Rng {
public:
    Rng() : Rng(0) {}
    explicit Rng(std::uint64_t seed) { reseed(seed); }

    void reseed(std::uint64_t seed) {
        state_ = seed ? seed : 0x9e3779b97f4a7c15ull;
        // splitmix64 warmup decorrelates adjacent seeds
        for (int i = 0; i < 4; ++i) next_raw();
        have_spare_ = false;
    }

    std::uint64_t next_raw() {
        // xorshift* keeps the generator tiny and serializable
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545f4914f6cdd1dull;
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_raw() >> 11) * 0x1.0p-53; }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    std::uint64_t uniform_int(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
    }

    // standard normal via Box-Muller (portable, unlike std::normal_distribution)
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    std::uint64_t state() const { return state_; }
    void set_state(std::uint64_t s, bool spare_valid = false, double spare = 0.0) {
        state_ = s;
        have_spare_ = spare_valid;
        spare_ = spare;
    }
    bool has_spare() const { return have_spare_; }
    double spare() const { return spare_; }

private:
    std::uint64_t state_ = 1;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Stable stream derivation: hash(seed, tag, a, b) so training and
// evaluation seeds never collide.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t h = 0xcbf29ce484222325ull ^ seed;
    auto mix = [&h](std::uint64_t v) {
        h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        h *= 0x100000001b3ull;
    };
    for (char c : tag) mix(static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
    mix(a);
    mix(b);
    return h ? h : 1;
}

}  // namespace cos
