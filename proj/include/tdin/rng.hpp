#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tdin {

// Seeded random source with hand-rolled transforms. std::mt19937_64 output is
// fixed by the standard, and rolling the transforms ourselves keeps streams
// byte-identical across standard library implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Exponential with the given rate (mean 1/rate).
    double exponential(double rate) {
        double u;
        do {
            u = uniform01();
        } while (u == 0.0);
        return -std::log(u) / rate;
    }

    // Standard normal via Box-Muller; one cached deviate.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1;
        do {
            u1 = uniform01();
        } while (u1 == 0.0);
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Uniform integer in [0, n).
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(uniform01() * static_cast<double>(n)) % n;
    }

  private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace tdin
