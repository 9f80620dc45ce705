#include "retset/intmat.hpp"

#include <sstream>
#include <stdexcept>

namespace retset {

IntMat IntMat::identity(std::size_t n) {
    IntMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

IntMat IntMat::from_rows(const std::vector<std::vector<Int>>& rows) {
    if (rows.empty()) return IntMat();
    IntMat m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols())
            throw std::invalid_argument("IntMat::from_rows: ragged rows");
        for (std::size_t j = 0; j < m.cols(); ++j) m.at(i, j) = rows[i][j];
    }
    return m;
}

std::vector<Int> IntMat::row(std::size_t i) const {
    std::vector<Int> r(cols_);
    for (std::size_t j = 0; j < cols_; ++j) r[j] = at(i, j);
    return r;
}

void IntMat::set_row(std::size_t i, const std::vector<Int>& r) {
    if (r.size() != cols_) throw std::invalid_argument("IntMat::set_row: size mismatch");
    for (std::size_t j = 0; j < cols_; ++j) at(i, j) = r[j];
}

void IntMat::append_row(const std::vector<Int>& r) {
    if (rows_ == 0 && cols_ == 0) cols_ = r.size();
    if (r.size() != cols_) throw std::invalid_argument("IntMat::append_row: size mismatch");
    a_.insert(a_.end(), r.begin(), r.end());
    ++rows_;
}

IntMat IntMat::transpose() const {
    IntMat t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
    return t;
}

IntMat IntMat::operator*(const IntMat& other) const {
    if (cols_ != other.rows_) throw std::invalid_argument("IntMat::operator*: shape mismatch");
    IntMat p(rows_, other.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const Int& x = at(i, k);
            if (x == 0) continue;
            for (std::size_t j = 0; j < other.cols_; ++j)
                p.at(i, j) += x * other.at(k, j);
        }
    return p;
}

Int IntMat::max_abs() const {
    Int m = 0;
    for (const Int& x : a_) {
        Int ax = abs(x);
        if (ax > m) m = ax;
    }
    return m;
}

std::string IntMat::to_string() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < rows_; ++i) {
        os << (i ? " [" : "[");
        for (std::size_t j = 0; j < cols_; ++j)
            os << at(i, j).get_str() << (j + 1 < cols_ ? " " : "");
        os << "]";
    }
    os << "]";
    return os.str();
}

namespace {

// In-place row reduction to HNF with the unimodular transform tracked.
// Returns the rank; pivot rows end up on top with increasing pivot columns,
// zero rows sink to the bottom.
std::size_t hnf_inplace(IntMat& m, IntMat* u) {
    const std::size_t rows = m.rows(), cols = m.cols();
    auto swap_rows = [&](std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t j = 0; j < cols; ++j) std::swap(m.at(a, j), m.at(b, j));
        if (u)
            for (std::size_t j = 0; j < u->cols(); ++j) std::swap(u->at(a, j), u->at(b, j));
    };
    auto addmul_row = [&](std::size_t dst, std::size_t src, const Int& q) {
        // row dst += q * row src
        if (q == 0) return;
        for (std::size_t j = 0; j < cols; ++j) m.at(dst, j) += q * m.at(src, j);
        if (u)
            for (std::size_t j = 0; j < u->cols(); ++j) u->at(dst, j) += q * u->at(src, j);
    };
    auto negate_row = [&](std::size_t i) {
        for (std::size_t j = 0; j < cols; ++j) m.at(i, j) = -m.at(i, j);
        if (u)
            for (std::size_t j = 0; j < u->cols(); ++j) u->at(i, j) = -u->at(i, j);
    };

    std::size_t pivot_row = 0;
    for (std::size_t col = 0; col < cols && pivot_row < rows; ++col) {
        // Euclidean elimination in this column below pivot_row.
        while (true) {
            std::size_t best = rows;
            for (std::size_t i = pivot_row; i < rows; ++i) {
                if (m.at(i, col) != 0 &&
                    (best == rows || mpz_cmpabs(m.at(i, col).get_mpz_t(), m.at(best, col).get_mpz_t()) < 0))
                    best = i;
            }
            if (best == rows) break;  // column clear below
            swap_rows(pivot_row, best);
            if (m.at(pivot_row, col) < 0) negate_row(pivot_row);
            bool clean = true;
            for (std::size_t i = pivot_row + 1; i < rows; ++i) {
                if (m.at(i, col) == 0) continue;
                Int q;
                mpz_fdiv_q(q.get_mpz_t(), m.at(i, col).get_mpz_t(), m.at(pivot_row, col).get_mpz_t());
                addmul_row(i, pivot_row, -q);
                if (m.at(i, col) != 0) clean = false;
            }
            if (clean) break;
        }
        if (m.at(pivot_row, col) == 0) continue;
        // Reduce entries above the pivot into [0, pivot).
        for (std::size_t i = 0; i < pivot_row; ++i) {
            Int q;
            mpz_fdiv_q(q.get_mpz_t(), m.at(i, col).get_mpz_t(), m.at(pivot_row, col).get_mpz_t());
            addmul_row(i, pivot_row, -q);
        }
        ++pivot_row;
    }
    return pivot_row;
}

}  // namespace

IntMat row_hnf(const IntMat& m) {
    IntMat work = m;
    std::size_t rank = hnf_inplace(work, nullptr);
    IntMat out(rank, m.cols());
    for (std::size_t i = 0; i < rank; ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out.at(i, j) = work.at(i, j);
    return out;
}

HnfTransform row_hnf_transform(const IntMat& m) {
    IntMat work = m;
    IntMat u = IntMat::identity(m.rows());
    std::size_t rank = hnf_inplace(work, &u);
    IntMat h(rank, m.cols());
    for (std::size_t i = 0; i < rank; ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) h.at(i, j) = work.at(i, j);
    return HnfTransform{std::move(h), std::move(u), rank};
}

IntMat kernel_basis(const IntMat& m) {
    // Rows u of the transform with u * m^T = 0 form a basis of {x : m x = 0}.
    HnfTransform t = row_hnf_transform(m.transpose());
    IntMat ker(0, m.cols());
    for (std::size_t i = t.rank; i < t.transform.rows(); ++i)
        ker.append_row(t.transform.row(i));
    return row_hnf(ker);
}

std::optional<std::vector<Int>> solve_left(const IntMat& m, const std::vector<Int>& target) {
    if (target.size() != m.cols()) throw std::invalid_argument("solve_left: size mismatch");
    HnfTransform t = row_hnf_transform(m);
    std::vector<Int> c = target;
    std::vector<Int> z(t.rank, Int(0));
    for (std::size_t i = 0; i < t.rank; ++i) {
        // Pivot column of row i.
        std::size_t p = 0;
        while (p < m.cols() && t.hnf.at(i, p) == 0) ++p;
        Int q, r;
        mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), c[p].get_mpz_t(), t.hnf.at(i, p).get_mpz_t());
        if (r != 0) return std::nullopt;
        z[i] = q;
        if (q != 0)
            for (std::size_t j = 0; j < m.cols(); ++j) c[j] -= q * t.hnf.at(i, j);
    }
    for (const Int& x : c)
        if (x != 0) return std::nullopt;
    std::vector<Int> y(m.rows(), Int(0));
    for (std::size_t i = 0; i < t.rank; ++i)
        for (std::size_t j = 0; j < m.rows(); ++j) y[j] += z[i] * t.transform.at(i, j);
    return y;
}

std::vector<Int> snf_invariants(const IntMat& m) {
    IntMat w = m;
    const std::size_t rows = w.rows(), cols = w.cols();
    std::vector<Int> inv;
    std::size_t top = 0;
    while (top < rows && top < cols) {
        // Find smallest nonzero entry in the trailing submatrix.
        std::size_t bi = rows, bj = cols;
        for (std::size_t i = top; i < rows; ++i)
            for (std::size_t j = top; j < cols; ++j)
                if (w.at(i, j) != 0 &&
                    (bi == rows || mpz_cmpabs(w.at(i, j).get_mpz_t(), w.at(bi, bj).get_mpz_t()) < 0)) {
                    bi = i;
                    bj = j;
                }
        if (bi == rows) break;  // all zero
        for (std::size_t j = 0; j < cols; ++j) std::swap(w.at(top, j), w.at(bi, j));
        for (std::size_t i = 0; i < rows; ++i) std::swap(w.at(i, top), w.at(i, bj));
        if (w.at(top, top) < 0)
            for (std::size_t j = 0; j < cols; ++j) w.at(top, j) = -w.at(top, j);

        bool dirty = true;
        while (dirty) {
            dirty = false;
            for (std::size_t i = top + 1; i < rows; ++i) {
                if (w.at(i, top) == 0) continue;
                Int q = w.at(i, top) / w.at(top, top);
                for (std::size_t j = 0; j < cols; ++j) w.at(i, j) -= q * w.at(top, j);
                if (w.at(i, top) != 0) {
                    for (std::size_t j = 0; j < cols; ++j) std::swap(w.at(top, j), w.at(i, j));
                    if (w.at(top, top) < 0)
                        for (std::size_t j = 0; j < cols; ++j) w.at(top, j) = -w.at(top, j);
                    dirty = true;
                }
            }
            for (std::size_t j = top + 1; j < cols; ++j) {
                if (w.at(top, j) == 0) continue;
                Int q = w.at(top, j) / w.at(top, top);
                for (std::size_t i = 0; i < rows; ++i) w.at(i, j) -= q * w.at(i, top);
                if (w.at(top, j) != 0) {
                    for (std::size_t i = 0; i < rows; ++i) std::swap(w.at(i, top), w.at(i, j));
                    if (w.at(top, top) < 0)
                        for (std::size_t jj = 0; jj < cols; ++jj) w.at(top, jj) = -w.at(top, jj);
                    dirty = true;
                }
            }
        }
        // Enforce divisibility: fold any non-multiple into the pivot's row.
        bool redo = false;
        for (std::size_t i = top + 1; i < rows && !redo; ++i)
            for (std::size_t j = top + 1; j < cols && !redo; ++j)
                if (w.at(i, j) % w.at(top, top) != 0) {
                    for (std::size_t jj = 0; jj < cols; ++jj) w.at(top, jj) += w.at(i, jj);
                    redo = true;
                }
        if (redo) continue;
        inv.push_back(w.at(top, top));
        ++top;
    }
    return inv;
}

std::vector<Int> charpoly_int(const IntMat& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("charpoly_int: not square");
    const std::size_t n = m.rows();
    // Faddeev-LeVerrier over the rationals; the result is integral.
    std::vector<std::vector<Rat>> a(n, std::vector<Rat>(n)), mk(n, std::vector<Rat>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i][j] = Rat(m.at(i, j));
    std::vector<Rat> coeff(n + 1);
    coeff[n] = 1;
    mk = a;
    for (std::size_t k = 1; k <= n; ++k) {
        Rat tr = 0;
        for (std::size_t i = 0; i < n; ++i) tr += mk[i][i];
        Rat ck = -tr / Rat(static_cast<long>(k));
        coeff[n - k] = ck;
        if (k == n) break;
        for (std::size_t i = 0; i < n; ++i) mk[i][i] += ck;
        std::vector<std::vector<Rat>> next(n, std::vector<Rat>(n, Rat(0)));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t l = 0; l < n; ++l) {
                if (a[i][l] == 0) continue;
                for (std::size_t j = 0; j < n; ++j) next[i][j] += a[i][l] * mk[l][j];
            }
        mk = std::move(next);
    }
    std::vector<Int> out(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        if (coeff[i].get_den() != 1) throw std::logic_error("charpoly_int: non-integral coefficient");
        out[i] = coeff[i].get_num();
    }
    return out;
}

}  // namespace retset
