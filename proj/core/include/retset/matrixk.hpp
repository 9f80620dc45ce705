#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "retset/quadfield.hpp"

namespace retset {

using VectorK = std::vector<QuadElem>;

struct CommutationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Dense matrix over Q or an imaginary quadratic field, exact arithmetic.
class MatrixK {
public:
    MatrixK() : field_(FieldDescriptor::rational()), rows_(0), cols_(0) {}
    MatrixK(FieldDescriptor field, std::size_t rows, std::size_t cols)
        : field_(field), rows_(rows), cols_(cols),
          a_(rows * cols, QuadElem::zero(field)) {}

    static MatrixK identity(const FieldDescriptor& field, std::size_t n);
    static MatrixK from_rows(const FieldDescriptor& field,
                             const std::vector<std::vector<QuadElem>>& rows);

    const FieldDescriptor& field() const { return field_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    QuadElem& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const QuadElem& at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    MatrixK operator*(const MatrixK& o) const;
    VectorK operator*(const VectorK& v) const;
    MatrixK operator+(const MatrixK& o) const;
    MatrixK operator-(const MatrixK& o) const;
    MatrixK scaled(const QuadElem& s) const;
    MatrixK transpose() const;
    bool operator==(const MatrixK& o) const;

    MatrixK coerce(const FieldDescriptor& target) const;
    QuadElem trace() const;

    std::string to_string() const;

private:
    FieldDescriptor field_;
    std::size_t rows_, cols_;
    std::vector<QuadElem> a_;
};

std::optional<MatrixK> matk_try_inverse(const MatrixK& m);
MatrixK matk_inverse(const MatrixK& m);  // throws std::domain_error when singular
std::size_t matk_rank(const MatrixK& m);
std::vector<VectorK> matk_kernel(const MatrixK& m);  // basis of {x : m x = 0}
std::optional<VectorK> matk_solve(const MatrixK& m, const VectorK& b);
/// X with m*X = b (unique when m has full column rank); nullopt if inconsistent.
std::optional<MatrixK> matk_solve_multi(const MatrixK& m, const MatrixK& b);
/// g x rank matrix whose columns span the column space.
MatrixK column_space(const MatrixK& m);

/// Monic characteristic polynomial, coefficients c[0..n] with c[n] = 1.
std::vector<QuadElem> charpoly(const MatrixK& m);

VectorK vec_coerce(const VectorK& v, const FieldDescriptor& f);

/// All roots (with multiplicity) of a monic polynomial whose splitting field
/// is the base field or one imaginary quadratic extension of Q, per the
/// degree-2 discriminant recognition rule.
struct RootSplit {
    bool ok = false;
    FieldDescriptor field = FieldDescriptor::rational();
    std::vector<QuadElem> roots;
    std::string reason;
};
RootSplit split_monic_poly(const std::vector<QuadElem>& poly, const FieldDescriptor& base);

struct Diagonalizable {
    FieldDescriptor field;
    MatrixK p, p_inv;  // p_inv * J_i * p diagonal
    std::vector<std::vector<QuadElem>> eigenvalues;  // [matrix][coordinate]
};
struct TwoByTwoUnipotent {
    FieldDescriptor field;
    MatrixK b, b_inv;  // b * J_i * b_inv = scale_i * [[1, shear_i], [0, 1]]
    std::vector<QuadElem> scale, shear;
};
struct Unsupported {
    std::string reason;
};
using Eigenstructure = std::variant<Diagonalizable, TwoByTwoUnipotent, Unsupported>;

/// Shared normal form of a commuting family: simultaneous diagonalization,
/// or the 2x2 repeated-eigenvalue shear form, or Unsupported with a reason.
/// Throws CommutationError if the matrices do not commute.
Eigenstructure common_eigenstructure(const std::vector<MatrixK>& js);

}  // namespace retset
