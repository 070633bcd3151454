#include "tci/bits.hpp"

#include <array>
#include <limits>

namespace tci::bits {

namespace {

constexpr int kMaxN = 64;

std::array<std::array<uint64_t, kMaxN + 1>, kMaxN + 1> make_table() {
    std::array<std::array<uint64_t, kMaxN + 1>, kMaxN + 1> c{};
    for (int n = 0; n <= kMaxN; ++n) {
        c[n][0] = 1;
        for (int k = 1; k <= n; ++k) {
            const uint64_t a = c[n - 1][k - 1];
            const uint64_t b = (k <= n - 1) ? c[n - 1][k] : 0;
            const uint64_t s = a + b;
            c[n][k] = (s < a) ? std::numeric_limits<uint64_t>::max() : s;
        }
    }
    return c;
}

const auto kBinomial = make_table();

} // namespace

uint64_t binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    return kBinomial[n][k];
}

} // namespace tci::bits
