#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace multifuse {

/// Deterministic random source. Raw bits come from std::mt19937_64 (whose
/// output sequence is fixed by the standard) and every derived draw uses an
/// explicit transform, so a given seed produces the same stream on any
/// platform or standard library. std::shuffle and the std distributions are
/// implementation-defined and would break the fixed-seed contracts.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound), bound > 0.
    int uniform_int(int bound) {
        const auto wide = static_cast<unsigned __int128>(gen_()) *
                          static_cast<unsigned __int128>(bound);
        return static_cast<int>(wide >> 64);
    }

    /// Standard normal deviate (Box-Muller, second value cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log1p(-u1)); // log(1-u1), u1 < 1
        const double t = 2.0 * kPi * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    /// Fisher-Yates shuffle driven by this stream.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (int i = static_cast<int>(v.size()) - 1; i > 0; --i)
            std::swap(v[static_cast<std::size_t>(i)],
                      v[static_cast<std::size_t>(uniform_int(i + 1))]);
    }

private:
    static constexpr double kPi = 3.141592653589793238462643383279502884;

    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace multifuse
