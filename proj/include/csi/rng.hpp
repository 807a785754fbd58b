#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace csi::rng {

// SplitMix64. Output sequence is fully specified, so runs replay
// bit-identically on any platform.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

// Folds a list of 64-bit parts into one seed. Used to derive independent
// streams keyed by (seed, trial), (seed, word, trial), etc.
inline std::uint64_t mix_key(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t state = 0x9E3779B97F4A7C15ULL;
    for (std::uint64_t p : parts) {
        std::uint64_t s = p;
        state ^= splitmix64(s) + 0x9E3779B97F4A7C15ULL + (state << 6) + (state >> 2);
    }
    std::uint64_t s = state;
    return splitmix64(s);
}

class Generator {
public:
    explicit Generator(std::uint64_t seed) : state_(seed) {
        // warm up so near-zero seeds do not yield near-zero first outputs
        splitmix64(state_);
    }

    std::uint64_t next() { return splitmix64(state_); }

    // Unbiased integer in [0, bound) via rejection sampling.
    std::uint64_t bounded(std::uint64_t bound) {
        if (bound <= 1) return 0;
        std::uint64_t threshold = (0 - bound) % bound;
        while (true) {
            std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform double in [0, 1) with 53 bits of precision.
    double unit_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

// Fisher-Yates with the portable generator above. std::shuffle is
// implementation-defined, so it cannot be used for replayable plans.
template <typename T>
void shuffle(std::vector<T>& items, Generator& gen) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(gen.bounded(i));
        using std::swap;
        swap(items[i - 1], items[j]);
    }
}

// Draws `count` distinct indices from [0, pool_size) without replacement.
inline std::vector<std::size_t> sample_indices(std::size_t pool_size, std::size_t count,
                                               Generator& gen) {
    std::vector<std::size_t> pool(pool_size);
    for (std::size_t i = 0; i < pool_size; ++i) pool[i] = i;
    std::vector<std::size_t> picked;
    picked.reserve(count);
    for (std::size_t i = 0; i < count && i < pool_size; ++i) {
        std::size_t j = i + static_cast<std::size_t>(gen.bounded(pool_size - i));
        std::swap(pool[i], pool[j]);
        picked.push_back(pool[i]);
    }
    return picked;
}

}  // namespace csi::rng
