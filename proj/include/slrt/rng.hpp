#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace slrt {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11), exposed as a
// UniformRandomBitGenerator producing 64-bit words. A (key, stream) pair names
// an independent substream; the 64-bit block counter walks within it.
class Philox {
public:
    using result_type = std::uint64_t;
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    explicit Philox(std::uint64_t key, std::uint64_t stream = 0);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

    // Raw 10-round bijection, for known-answer tests.
    static Block bijection(Block counter, Key key);

private:
    void refill();

    Key key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    Block out_{};
    int used_ = 2;
};

std::uint64_t splitmix64(std::uint64_t x);

// Deterministic substream id from a seed and a list of labels
// (replication index, phase, cell coordinates, ...).
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> labels);

// Uniform double in [0, 1) with 53 random bits.
double uniform01(Philox& rng);

}  // namespace slrt
