#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace retset {

using Int = mpz_class;
using Rat = mpq_class;

/// Dense matrix of arbitrary-precision integers, row-major.
class IntMat {
public:
    IntMat() : rows_(0), cols_(0) {}
    IntMat(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols, Int(0)) {}

    static IntMat identity(std::size_t n);
    static IntMat from_rows(const std::vector<std::vector<Int>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Int& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const Int& at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    std::vector<Int> row(std::size_t i) const;
    void set_row(std::size_t i, const std::vector<Int>& r);
    void append_row(const std::vector<Int>& r);

    IntMat transpose() const;
    IntMat operator*(const IntMat& other) const;
    bool operator==(const IntMat& other) const = default;

    // Largest |entry|; zero for an empty matrix.
    Int max_abs() const;

    std::string to_string() const;

private:
    std::size_t rows_, cols_;
    std::vector<Int> a_;
};

/// Canonical row Hermite normal form: pivots positive and strictly to the
/// right as rows descend, entries above each pivot reduced into [0, pivot).
/// Zero rows are dropped, so the result's rows are a basis of the row lattice.
IntMat row_hnf(const IntMat& m);

struct HnfTransform {
    IntMat hnf;        // rank rows, canonical form (zero rows dropped)
    IntMat transform;  // unimodular U with U*m = hnf stacked over zero rows
    std::size_t rank;
};
HnfTransform row_hnf_transform(const IntMat& m);

/// Basis (as rows, HNF-reduced) of the right kernel {x : m x = 0}.
IntMat kernel_basis(const IntMat& m);

/// Solve y * m = target over the integers. Returns one solution or nullopt.
std::optional<std::vector<Int>> solve_left(const IntMat& m, const std::vector<Int>& target);

/// Smith normal form invariant factors d1 | d2 | ... (positive, nonzero only).
std::vector<Int> snf_invariants(const IntMat& m);

/// Monic characteristic polynomial of a square integer matrix,
/// returned as coefficients c[0..n] with c[n] = 1 (p(x) = sum c[k] x^k).
std::vector<Int> charpoly_int(const IntMat& m);

}  // namespace retset
