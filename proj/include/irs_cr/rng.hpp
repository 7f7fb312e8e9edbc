#pragma once

#include <cstdint>
#include <random>

namespace irs_cr {

using Engine = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent stream keys.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// A reproducible random stream identified by a 64-bit key.
///
/// Child streams are addressed by index (trial, link, restart, ...), so the
/// draws of one child never depend on how many draws another child made.
class RngStream {
public:
    constexpr explicit RngStream(std::uint64_t key) : key_(key) {}

    constexpr std::uint64_t key() const { return key_; }
    constexpr RngStream child(std::uint64_t index) const { return RngStream(mix64(key_ ^ mix64(index + 1))); }
    Engine engine() const { return Engine(key_); }

private:
    std::uint64_t key_;
};

}  // namespace irs_cr
