#include "heatplan/moo/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace heatplan::moo {

namespace {

constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                           59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131};

}  // namespace

Eigen::MatrixXd scrambled_halton(int n, int dims, std::uint64_t seed, bool scramble, int skip) {
    if (n < 0 || dims < 1 || skip < 0) throw std::invalid_argument("bad Halton sequence size");
    if (dims > static_cast<int>(std::size(kPrimes))) throw std::invalid_argument("Halton sequence supports up to 32 dimensions");
    std::mt19937_64 rng(seed);
    Eigen::MatrixXd out(n, dims);
    for (int d = 0; d < dims; ++d) {
        const int b = kPrimes[d];
        std::vector<int> perm(b);
        std::iota(perm.begin(), perm.end(), 0);
        if (scramble) std::shuffle(perm.begin(), perm.end(), rng);
        // Enough digits to exhaust double precision.
        const int depth = static_cast<int>(std::ceil(53.0 * std::log(2.0) / std::log(b)));
        for (int i = 0; i < n; ++i) {
            long long k = static_cast<long long>(i) + skip;
            double value = 0.0, scale = 1.0 / b;
            for (int digit = 0; digit < depth; ++digit) {
                value += perm[k % b] * scale;
                k /= b;
                scale /= b;
            }
            out(i, d) = std::min(value, std::nextafter(1.0, 0.0));
        }
    }
    return out;
}

}  // namespace heatplan::moo
