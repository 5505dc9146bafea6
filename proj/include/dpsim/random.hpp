#ifndef DPSIM_RANDOM_HPP
#define DPSIM_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace dpsim {

/// splitmix64 finalizer, used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/**
 * Seeded random source with platform-independent output.
 *
 * std::mt19937_64 is bit-exact across standard libraries; the standard
 * distributions are not, so the helpers below are implemented directly.
 */
class Rng
{
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Seed derived from a root seed and a path of stream labels,
    /// e.g. stream(seed, {scenario, tick, rep, kind}).
    static std::uint64_t stream(std::uint64_t root, std::initializer_list<std::uint64_t> labels)
    {
        std::uint64_t h = mix64(root);
        for (auto l : labels)
            h = mix64(h ^ mix64(l + 0x632be59bd9b4e019ULL));
        return h;
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n)
    {
        // rejection keeps the result unbiased
        const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    /// True with probability p; always consumes one draw.
    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 engine_;
};

} // namespace dpsim

#endif
