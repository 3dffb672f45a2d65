#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "zdet/int_matrix.hpp"

namespace zdet {

/// Exact determinant by Bareiss fraction-free elimination. Every division
/// performed is exact, so all intermediates stay integral. Reference oracle
/// for the modular/lifting paths; cubic in n with subdeterminant-sized
/// intermediates.
inline mpz_class bareiss_det(const IntMatrix& a) {
    if (!a.square()) throw std::invalid_argument("bareiss_det: matrix not square");
    const std::size_t n = a.rows();
    if (n == 0) return 1;
    std::vector<std::vector<mpz_class>> w(n, std::vector<mpz_class>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) w[i][j] = a(i, j);

    int sign = 1;
    mpz_class prev = 1;
    mpz_class t;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (w[k][k] == 0) {
            std::size_t piv = k + 1;
            while (piv < n && w[piv][k] == 0) ++piv;
            if (piv == n) return 0;
            std::swap(w[k], w[piv]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                t = w[i][j] * w[k][k] - w[i][k] * w[k][j];
                mpz_divexact(w[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
            w[i][k] = 0;
        }
        prev = w[k][k];
    }
    return sign > 0 ? w[n - 1][n - 1] : mpz_class(-w[n - 1][n - 1]);
}

/// Invariant factors s_1 | s_2 | ... | s_r of an integer matrix (r = rank).
struct SmithForm {
    std::vector<mpz_class> factors;  // all positive, divisibility chain holds

    std::size_t rank() const { return factors.size(); }

    std::size_t nontrivial() const {
        std::size_t c = 0;
        for (const auto& f : factors)
            if (f > 1) ++c;
        return c;
    }

    mpz_class product() const {
        mpz_class p = 1;
        for (const auto& f : factors) p *= f;
        return p;
    }
};

/// Smith normal form by elementary integer row/column reduction, pivoting on
/// the smallest nonzero entry with nearest-multiple clearing. Test oracle:
/// simple and exact, meant for n up to ~60, not for production sizes.
inline SmithForm smith_form(const IntMatrix& a) {
    const std::size_t m = a.rows(), n = a.cols();
    std::vector<std::vector<mpz_class>> w(m, std::vector<mpz_class>(n));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) w[i][j] = a(i, j);

    auto move_pivot = [&](std::size_t tpos, std::size_t pi, std::size_t pj) {
        std::swap(w[tpos], w[pi]);
        if (pj != tpos)
            for (std::size_t i = tpos; i < m; ++i) std::swap(w[i][tpos], w[i][pj]);
        if (w[tpos][tpos] < 0)
            for (std::size_t j = tpos; j < n; ++j) w[tpos][j] = -w[tpos][j];
    };

    // smallest nonzero entry of the trailing submatrix; false if all zero
    auto find_pivot = [&](std::size_t tpos, std::size_t& pi, std::size_t& pj) {
        bool found = false;
        for (std::size_t i = tpos; i < m; ++i)
            for (std::size_t j = tpos; j < n; ++j)
                if (w[i][j] != 0 &&
                    (!found || mpz_cmpabs(w[i][j].get_mpz_t(), w[pi][pj].get_mpz_t()) < 0)) {
                    pi = i;
                    pj = j;
                    found = true;
                }
        return found;
    };

    SmithForm out;
    const std::size_t lim = m < n ? m : n;
    mpz_class q, r;
    for (std::size_t tpos = 0; tpos < lim; ++tpos) {
        std::size_t pi, pj;
        if (!find_pivot(tpos, pi, pj)) break;  // rank reached
        move_pivot(tpos, pi, pj);

        for (;;) {
            const mpz_class& piv = w[tpos][tpos];  // positive
            bool dirty = false;
            for (std::size_t i = tpos + 1; i < m; ++i) {
                if (w[i][tpos] == 0) continue;
                mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), w[i][tpos].get_mpz_t(), piv.get_mpz_t());
                if (2 * r > piv) q += 1;  // round to nearest multiple
                if (q != 0)
                    for (std::size_t j = tpos; j < n; ++j) w[i][j] -= q * w[tpos][j];
                if (w[i][tpos] != 0) dirty = true;
            }
            for (std::size_t j = tpos + 1; j < n; ++j) {
                if (w[tpos][j] == 0) continue;
                mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), w[tpos][j].get_mpz_t(), piv.get_mpz_t());
                if (2 * r > piv) q += 1;
                if (q != 0)
                    for (std::size_t i = tpos; i < m; ++i) w[i][j] -= q * w[i][tpos];
                if (w[tpos][j] != 0) dirty = true;
            }
            if (dirty) {  // a smaller remainder appeared somewhere; re-pivot on it
                find_pivot(tpos, pi, pj);
                move_pivot(tpos, pi, pj);
                continue;
            }
            // the pivot must divide the whole trailing submatrix or the
            // divisibility chain breaks; fold an offending row in and redo
            bool chained = true;
            for (std::size_t i = tpos + 1; i < m && chained; ++i)
                for (std::size_t j = tpos + 1; j < n && chained; ++j)
                    if (!mpz_divisible_p(w[i][j].get_mpz_t(), piv.get_mpz_t())) {
                        for (std::size_t jj = tpos; jj < n; ++jj) w[tpos][jj] += w[i][jj];
                        chained = false;
                    }
            if (chained) break;
        }
        out.factors.push_back(w[tpos][tpos]);
    }
    return out;
}

}  // namespace zdet
