#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>
#include <vector>

namespace notecls {

// Deterministic PRNG with a fully pinned algorithm (splitmix64). std::shuffle
// and the <random> distributions are implementation-defined, so every shuffled
// or sampled result in this project flows through this class and is therefore
// reproducible across platforms and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform integer in [0, bound) via 128-bit multiply-shift.
    std::uint64_t bounded(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

    // Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Fisher-Yates, pinned order of draws.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

// Derives a child seed from a base seed and a list of string tags. Used to
// give every component of a run its own independent stream, so adding or
// reordering parallelism never changes results.
inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::string_view> tags) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ base;
    auto mix_byte = [&h](unsigned char b) {
        h ^= b;
        h *= 0x100000001b3ULL;
    };
    for (std::string_view tag : tags) {
        for (char c : tag) mix_byte(static_cast<unsigned char>(c));
        mix_byte(0x1f); // tag separator
    }
    // splitmix finalizer for avalanche
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
    return h ^ (h >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::string_view> tags,
                                 std::uint64_t index) {
    char buf[21];
    int n = 0;
    if (index == 0) {
        buf[n++] = '0';
    } else {
        char tmp[21];
        int m = 0;
        while (index > 0) {
            tmp[m++] = static_cast<char>('0' + index % 10);
            index /= 10;
        }
        while (m > 0) buf[n++] = tmp[--m];
    }
    std::uint64_t h = derive_seed(base, tags);
    return derive_seed(h, {std::string_view(buf, static_cast<std::size_t>(n))});
}

} // namespace notecls
