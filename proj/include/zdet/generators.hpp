#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>

#include "zdet/int_matrix.hpp"
#include "zdet/rng.hpp"

namespace zdet {

/// n x n matrix with entries i.i.d. uniform on the lambda+1 integers
/// {-floor(lambda/2), ..., ceil(lambda/2)}; deterministic per seed.
inline IntMatrix gen_random(std::size_t n, std::uint64_t lambda, std::uint64_t seed) {
    if (lambda < 1) throw std::invalid_argument("gen_random: lambda must be >= 1");
    Rng rng(seed);
    IntMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.entry_set(lambda);
    return a;
}

namespace detail {

// In-place unimodular mixing: `count` elementary operations per side
// (row/column transvections with coefficients in {-2..2}\{0}, swaps,
// negations). Determinant changes sign only; Smith form is preserved.
inline void unimodular_mix(IntMatrix& a, Rng& rng, std::size_t count) {
    const std::size_t n = a.rows();
    if (n < 2) return;
    static const long coeffs[4] = {-2, -1, 1, 2};
    for (std::size_t step = 0; step < count; ++step) {
        const std::uint64_t kind = rng.below(std::uint64_t(8));
        std::size_t i = rng.below(std::uint64_t(n));
        std::size_t j = rng.below(std::uint64_t(n - 1));
        if (j >= i) ++j;  // distinct pair
        const long c = coeffs[rng.below(std::uint64_t(4))];
        switch (kind) {
            case 0:  // row_i += c * row_j
            case 1:
            case 2:
                for (std::size_t k = 0; k < n; ++k) a(i, k) += c * a(j, k);
                break;
            case 3:  // col_i += c * col_j
            case 4:
            case 5:
                for (std::size_t k = 0; k < n; ++k) a(k, i) += c * a(k, j);
                break;
            case 6:  // swap rows
                for (std::size_t k = 0; k < n; ++k) std::swap(a(i, k), a(j, k));
                break;
            default:  // negate a row
                for (std::size_t k = 0; k < n; ++k) a(i, k) = -a(i, k);
                break;
        }
    }
}

}  // namespace detail

/// U * diag(1..n) * V with U, V random unimodular: same Smith form as
/// diag(1..n), |det| = n!. Entry growth is kept polynomial by bounding the
/// number of elementary operations.
inline IntMatrix gen_engineered(std::size_t n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("gen_engineered: n must be >= 1");
    Rng rng(seed);
    IntMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) a(i, i) = long(i + 1);
    detail::unimodular_mix(a, rng, 2 * n);
    return a;
}

/// Product of at most 4n elementary matrices with coefficients in {-2..2};
/// determinant is exactly +1 or -1.
inline IntMatrix gen_unimodular(std::size_t n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("gen_unimodular: n must be >= 1");
    Rng rng(seed);
    IntMatrix a = IntMatrix::identity(n);
    if (n == 1) {
        if (rng.below(std::uint64_t(2)) == 1) a(0, 0) = -1;
        return a;
    }
    detail::unimodular_mix(a, rng, 4 * n);
    return a;
}

}  // namespace zdet
