#pragma once

// Deterministic random number generation.
//
// All randomness in the library flows through this header. The engine is
// std::mt19937_64 (its output sequence is pinned by the standard), and the
// distribution transforms are written out explicitly because the std::*
// distribution classes are allowed to differ between standard library
// implementations. That keeps every artifact byte-reproducible for a given
// seed.

#include <cmath>
#include <cstdint>
#include <random>

#include "gmtd/common.hpp"

namespace gmtd {

// splitmix64 step; used for seed mixing/derivation only.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Derive an independent stream seed from (base, tag, index). Different tags
// give unrelated streams even for equal base seeds; used to keep e.g.
// training and evaluation trials disjoint.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag, std::uint64_t index = 0) {
    std::uint64_t s = base;
    std::uint64_t a = splitmix64(s);
    s = a ^ (tag * 0xd1342543de82ef95ull);
    std::uint64_t b = splitmix64(s);
    s = b ^ (index * 0x2545f4914f6cdd1dull);
    return splitmix64(s);
}

// Seed-stream tags (arbitrary distinct constants).
namespace stream {
inline constexpr std::uint64_t kClutterJitter = 0x434c5554ull;   // per-scene patch amplitudes
inline constexpr std::uint64_t kSnapshots = 0x534e4150ull;       // Gaussian snapshot draws
inline constexpr std::uint64_t kTrainTrial = 0x5452414eull;      // per-training-trial scene seeds
inline constexpr std::uint64_t kTrainTarget = 0x54475431ull;     // training target Doppler draws
inline constexpr std::uint64_t kEvalTrial = 0x4556414cull;       // per-eval-trial scene seeds
inline constexpr std::uint64_t kEvalTarget = 0x54475432ull;      // eval target Doppler draws
}  // namespace stream

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Exponential with unit mean.
    double exponential() { return -std::log1p(-uniform()); }

    // Standard normal via Box-Muller (pairs cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log1p(-u1));
        double a = 2.0 * kPi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Circularly-symmetric complex normal, unit variance (E|z|^2 = 1).
    cplx complex_normal() {
        double re = normal();
        double im = normal();
        return cplx(re * 0.70710678118654752440, im * 0.70710678118654752440);
    }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace gmtd
