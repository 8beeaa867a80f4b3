#pragma once

#include <cstdint>
#include <cmath>
#include <string_view>

namespace lrinorm {

/// Deterministic splittable generator: one 64-bit seed, named substreams.
/// splitmix64 core, so identical seeds give identical streams on every
/// platform and thread.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    /// Child stream derived from a label; independent of draws made here.
    Rng stream(std::string_view name) const {
        std::uint64_t h = 1469598103934665603ull;  // FNV-1a
        for (char ch : name) {
            h ^= static_cast<unsigned char>(ch);
            h *= 1099511628211ull;
        }
        return Rng(mix(state_ ^ h));
    }

    Rng stream(std::uint64_t index) const { return Rng(mix(state_ ^ (index * 0x9e3779b97f4a7c15ull + 0x632be59bd9b4e019ull))); }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi].
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    /// Standard normal via Box-Muller.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

  private:
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    std::uint64_t state_;
};

}  // namespace lrinorm
