#pragma once

#include <cstdint>
#include <random>

namespace iso {

// Deterministic Gaussian stream on top of std::mt19937_64.
//
// std::normal_distribution is not pinned by the standard, so the Box-Muller
// transform is spelled out here; identical seeds give bit-identical streams
// on any conforming implementation.
class GaussianRng {
public:
    explicit GaussianRng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on (0,1]; never returns 0 so log() below is safe.
    double uniform01() {
        const std::uint64_t r = engine_();
        return (static_cast<double>(r >> 11) + 1.0) * 0x1.0p-53;
    }

    // Standard normal N(0,1).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    std::uint64_t raw() { return engine_(); }

    // Independent per-trajectory stream seeds, derived from a base seed and a
    // trajectory counter by SplitMix64 mixing. Documented so ensembles are
    // reproducible for any worker count.
    static std::uint64_t derive_stream(std::uint64_t base, std::uint64_t index) {
        std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace iso
