#pragma once
// Seeded RNG with distributions computed from raw mt19937_64 draws, so
// streams are identical across standard libraries.

#include <cstdint>
#include <random>
#include <vector>

namespace kbhop {

class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : gen_(seed) {}

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    std::int64_t randint(std::int64_t n) {
        return static_cast<std::int64_t>(uniform() * static_cast<double>(n));
    }

    Rng fork() { return Rng(gen_()); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(randint(static_cast<std::int64_t>(i)));
            std::swap(v[i - 1], v[j]);
        }
    }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

} // namespace kbhop
