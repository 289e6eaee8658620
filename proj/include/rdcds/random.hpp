#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "rdcds/field.hpp"

namespace rdcds {

/// Seeded generator; independent streams are derived by mixing a stream id into the seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0x9e3779b9u};
        eng_.seed(seq);
    }

    Symbol symbol(std::uint32_t q) { return std::uniform_int_distribution<Symbol>(0, q - 1)(eng_); }

    std::vector<Symbol> symbols(std::size_t count, std::uint32_t q) {
        std::uniform_int_distribution<Symbol> dist(0, q - 1);
        std::vector<Symbol> v(count);
        for (auto& s : v) s = dist(eng_);
        return v;
    }

    bool bernoulli(double p) { return std::bernoulli_distribution(p)(eng_); }
    int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }

    std::mt19937_64& engine() noexcept { return eng_; }

private:
    std::mt19937_64 eng_;
};

} // namespace rdcds
