#pragma once

// Counter-style RNG: stream i of seed s is an independent splitmix64
// sequence derived from (s, i), so samples can be generated in any order
// or in parallel while staying reproducible.

#include <cmath>
#include <cstdint>

namespace rpq {

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : state_(detail::mix64(detail::mix64(seed + 0x9e3779b97f4a7c15ULL) +
                               stream * 0xbf58476d1ce4e5b9ULL)) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return detail::mix64(state_);
    }

    // uniform in (0, 1]
    double next_uniform() { return double((next_u64() >> 11) + 1) * 0x1p-53; }

    // standard normal via Box-Muller, pairs cached
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace rpq
