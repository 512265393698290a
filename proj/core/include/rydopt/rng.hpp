#pragma once

#include <cstdint>

namespace rydopt::rng {

// splitmix64: tiny, well-mixed, and identical on every platform. Streams are
// keyed by (master seed, realization index, channel), so ensembles are
// deterministic regardless of execution order.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index,
                              std::uint64_t channel) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s) ^ (index * 0xd6e8feb86659fd93ULL);
    std::uint64_t b = splitmix64(a) ^ (channel * 0xa5a5a5a5a5a5a5a5ULL);
    return splitmix64(b);
}

// standard-normal stream via Box-Muller on splitmix64 uniforms
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : state_(seed) {}

    double uniform() { // (0, 1]
        const std::uint64_t r = splitmix64(state_);
        return (static_cast<double>(r >> 11) + 1.0) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace rydopt::rng
