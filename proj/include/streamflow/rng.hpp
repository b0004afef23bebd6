#pragma once

#include <cstdint>
#include <vector>

namespace streamflow {

// SplitMix64. The standard library engines are portable but
// std::shuffle and the distributions are not, so everything that has to
// be byte-reproducible across platforms goes through this.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n). Modulo bias is irrelevant at our n.
    std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }

    bool coin() { return (next() & 1u) != 0; }

    double unit() {
        return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Stream of seeds decorrelated from the master, stable across runs.
    static std::uint64_t derive(std::uint64_t master, std::uint64_t tag) {
        Rng r(master ^ (0xd6e8feb86659fd93ULL * (tag + 1)));
        return r.next();
    }

private:
    std::uint64_t state_;
};

} // namespace streamflow
