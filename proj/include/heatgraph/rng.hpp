#pragma once

#include <cstddef>
#include <cstdint>

namespace heatgraph {

/// Counter-based random stream.
///
/// Output k of a stream is a pure function of (key, k), so a stream can be
/// split into independent children by deriving new keys. Every random draw in
/// the library flows from one 64-bit seed through `split`, which makes runs
/// reproducible bit for bit given (seed, configuration).
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Independent child stream identified by `stream`.
    Rng split(std::uint64_t stream) const;

    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

    /// Standard normal (Box-Muller).
    double normal();

    /// Uniform integer in [0, n), unbiased. Requires n > 0.
    std::size_t below(std::size_t n);

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

} // namespace heatgraph
