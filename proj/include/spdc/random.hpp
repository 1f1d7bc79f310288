#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace spdc {

// Seeded generator with distributions written out explicitly so that streams
// are identical across standard library implementations.
class Rng
{
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Exponential waiting time with the given rate.
    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

    /// Standard normal (Box-Muller, one value per call).
    double normal()
    {
        double const u1 = 1.0 - uniform();  // (0, 1]
        double const u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    bool bernoulli(double p) { return uniform() < p; }

  private:
    std::mt19937_64 engine_;
};

}  // namespace spdc
