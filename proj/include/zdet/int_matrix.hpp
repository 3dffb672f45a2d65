#pragma once

#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace zdet {

/// Thrown for unreadable or malformed matrix files.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dense matrix of arbitrary-precision integers, row-major.
/// Immutable by convention once built; all library routines take it by
/// const reference and never modify their input.
class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), e_(rows * cols) {}

    static IntMatrix identity(std::size_t n) {
        IntMatrix a(n, n);
        for (std::size_t i = 0; i < n; ++i) a(i, i) = 1;
        return a;
    }

    static IntMatrix diagonal(const std::vector<mpz_class>& d) {
        IntMatrix a(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) a(i, i) = d[i];
        return a;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    mpz_class& operator()(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
    const mpz_class& operator()(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

    /// Max-norm: largest entry in absolute value (0 for an empty matrix).
    mpz_class norm() const {
        mpz_class m = 0;
        for (const auto& v : e_) {
            if (mpz_cmpabs(v.get_mpz_t(), m.get_mpz_t()) > 0) m = abs(v);
        }
        return m;
    }

    bool operator==(const IntMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<mpz_class> e_;
};

inline IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: shape mismatch");
    IntMatrix c(a.rows(), b.cols());
    mpz_class acc;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            acc = 0;
            for (std::size_t k = 0; k < a.cols(); ++k)
                mpz_addmul(acc.get_mpz_t(), a(i, k).get_mpz_t(), b(k, j).get_mpz_t());
            c(i, j) = acc;
        }
    return c;
}

/// Text format: first line "n m", then n lines of m decimal integers
/// separated by single spaces. Lines starting with '#' are comments.
inline IntMatrix read_matrix(std::istream& in) {
    auto next_line = [&in](std::string& line) -> bool {
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::size_t i = line.find_first_not_of(" \t");
            if (i == std::string::npos) continue;
            if (line[i] == '#') continue;
            return true;
        }
        return false;
    };
    std::string line;
    if (!next_line(line)) throw ParseError("matrix: missing header line");
    std::istringstream head(line);
    long long n = -1, m = -1;
    if (!(head >> n >> m) || n < 0 || m < 0) throw ParseError("matrix: bad header '" + line + "'");
    std::string extra;
    if (head >> extra) throw ParseError("matrix: trailing tokens in header");
    IntMatrix a{std::size_t(n), std::size_t(m)};
    for (long long i = 0; i < n; ++i) {
        if (!next_line(line)) throw ParseError("matrix: missing row " + std::to_string(i));
        std::istringstream row(line);
        std::string tok;
        for (long long j = 0; j < m; ++j) {
            if (!(row >> tok)) throw ParseError("matrix: short row " + std::to_string(i));
            try {
                a(std::size_t(i), std::size_t(j)) = mpz_class(tok);
            } catch (const std::invalid_argument&) {
                throw ParseError("matrix: bad integer '" + tok + "'");
            }
        }
        if (row >> tok) throw ParseError("matrix: long row " + std::to_string(i));
    }
    return a;
}

inline IntMatrix read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return read_matrix(in);
}

inline void write_matrix(std::ostream& out, const IntMatrix& a) {
    out << a.rows() << ' ' << a.cols() << '\n';
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (j) out << ' ';
            out << a(i, j);
        }
        out << '\n';
    }
}

}  // namespace zdet
