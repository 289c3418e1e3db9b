#pragma once
#include <array>
#include <cstdint>
#include <string_view>

namespace eivsparse {

/// splitmix64: seeds xoshiro state and derives independent stream keys.
inline std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// xoshiro256** 1.0 with splitmix64 seeding.
///
/// Streams: `Rng(seed).split(a, b, ...)` returns a generator whose state is a
/// pure function of (seed, a, b, ...), independent of how many draws were
/// taken from the parent. Normal deviates use the Box-Muller transform on
/// 53-bit uniforms so the sequence depends only on the integer stream and
/// libm's log/sin/cos.
class Rng
{
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0) : key_(seed)
    {
        std::uint64_t sm = seed;
        for (auto& s : s_) s = splitmix64(sm);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()()
    {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Child generator keyed by `stream`; does not advance *this.
    Rng split(std::uint64_t stream) const
    {
        std::uint64_t sm = key_ ^ (0xD1B54A32D192ED03ULL * (stream + 1));
        const std::uint64_t a = splitmix64(sm);
        const std::uint64_t b = splitmix64(sm);
        return Rng(a ^ rotl(b, 29));
    }

    template <class... Rest>
    Rng split(std::uint64_t stream, std::uint64_t next, Rest... rest) const
    {
        return split(stream).split(next, rest...);
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, bound), bound > 0. Lemire rejection.
    std::uint64_t below(std::uint64_t bound);

    /// Standard normal deviate.
    double normal();

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k)
    {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t key_;
    std::array<std::uint64_t, 4> s_{};
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Stable 64-bit tag for naming streams ("fold", "ridge", ...). FNV-1a.
constexpr std::uint64_t stream_tag(std::string_view name)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace eivsparse
