#pragma once

#include <bit>
#include <cstdint>
#include <cassert>

namespace tci::bits {

// Binomial coefficients up to C(63,k); larger entries saturate to UINT64_MAX.
uint64_t binomial(int n, int k);

// Next configuration with the same popcount, in ascending integer order
// (Gosper's hack). Caller must not call past the last combination.
inline uint64_t next_same_popcount(uint64_t v) {
    uint64_t t = v | (v - 1);
    return (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(v) + 1));
}

// Rank of `config` among all words with the same popcount, ascending.
// Combinadic: for the m-th set bit (0-based) at position p, add C(p, m+1).
inline int64_t rank_combinadic(uint64_t config) {
    int64_t r = 0;
    int m = 1;
    while (config) {
        int p = std::countr_zero(config);
        r += static_cast<int64_t>(binomial(p, m++));
        config &= config - 1;
    }
    return r;
}

inline int popcount(uint64_t v) { return std::popcount(v); }

} // namespace tci::bits
