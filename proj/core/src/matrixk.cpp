#include "retset/matrixk.hpp"

#include <algorithm>
#include <sstream>

#include "retset/factored.hpp"

namespace retset {

MatrixK MatrixK::identity(const FieldDescriptor& field, std::size_t n) {
    MatrixK m(field, n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = QuadElem::one(field);
    return m;
}

MatrixK MatrixK::from_rows(const FieldDescriptor& field,
                           const std::vector<std::vector<QuadElem>>& rows) {
    if (rows.empty()) return MatrixK(field, 0, 0);
    MatrixK m(field, rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols()) throw std::invalid_argument("MatrixK: ragged rows");
        for (std::size_t j = 0; j < m.cols(); ++j) m.at(i, j) = rows[i][j].coerce(field);
    }
    return m;
}

MatrixK MatrixK::operator*(const MatrixK& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("MatrixK::operator*: shape mismatch");
    MatrixK p(field_, rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const QuadElem& x = at(i, k);
            if (x.is_zero()) continue;
            for (std::size_t j = 0; j < o.cols_; ++j) p.at(i, j) += x * o.at(k, j);
        }
    return p;
}

VectorK MatrixK::operator*(const VectorK& v) const {
    if (cols_ != v.size()) throw std::invalid_argument("MatrixK: vector size mismatch");
    VectorK out(rows_, QuadElem::zero(field_));
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if (!at(i, j).is_zero()) out[i] += at(i, j) * v[j].coerce(field_);
    return out;
}

MatrixK MatrixK::operator+(const MatrixK& o) const {
    MatrixK s(field_, rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) s.a_[i] = a_[i] + o.a_[i];
    return s;
}

MatrixK MatrixK::operator-(const MatrixK& o) const {
    MatrixK s(field_, rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) s.a_[i] = a_[i] - o.a_[i];
    return s;
}

MatrixK MatrixK::scaled(const QuadElem& s) const {
    MatrixK out(field_, rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] * s;
    return out;
}

MatrixK MatrixK::transpose() const {
    MatrixK t(field_, cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
    return t;
}

bool MatrixK::operator==(const MatrixK& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) return false;
    for (std::size_t i = 0; i < a_.size(); ++i)
        if (a_[i] != o.a_[i]) return false;
    return true;
}

MatrixK MatrixK::coerce(const FieldDescriptor& target) const {
    MatrixK m(target, rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i].coerce(target);
    return m;
}

QuadElem MatrixK::trace() const {
    QuadElem t = QuadElem::zero(field_);
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += at(i, i);
    return t;
}

std::string MatrixK::to_string() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < rows_; ++i) {
        os << (i ? " [" : "[");
        for (std::size_t j = 0; j < cols_; ++j) os << at(i, j).to_string() << (j + 1 < cols_ ? " " : "");
        os << "]";
    }
    os << "]";
    return os.str();
}

VectorK vec_coerce(const VectorK& v, const FieldDescriptor& f) {
    VectorK out;
    out.reserve(v.size());
    for (const QuadElem& x : v) out.push_back(x.coerce(f));
    return out;
}

namespace {

// Gauss-Jordan to reduced row echelon form; returns pivot columns.
std::vector<std::size_t> rref(MatrixK& m) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
        std::size_t sel = m.rows();
        for (std::size_t i = row; i < m.rows(); ++i)
            if (!m.at(i, col).is_zero()) {
                sel = i;
                break;
            }
        if (sel == m.rows()) continue;
        if (sel != row)
            for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m.at(sel, j), m.at(row, j));
        QuadElem inv = m.at(row, col).inverse();
        for (std::size_t j = col; j < m.cols(); ++j) m.at(row, j) *= inv;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == row || m.at(i, col).is_zero()) continue;
            QuadElem f = m.at(i, col);
            for (std::size_t j = col; j < m.cols(); ++j) m.at(i, j) -= f * m.at(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

}  // namespace

std::optional<MatrixK> matk_try_inverse(const MatrixK& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("matk_inverse: not square");
    const std::size_t n = m.rows();
    MatrixK aug(m.field(), n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug.at(i, j) = m.at(i, j);
        aug.at(i, n + i) = QuadElem::one(m.field());
    }
    auto pivots = rref(aug);
    if (pivots.size() != n || pivots.back() != n - 1) return std::nullopt;
    MatrixK inv(m.field(), n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv.at(i, j) = aug.at(i, n + j);
    return inv;
}

MatrixK matk_inverse(const MatrixK& m) {
    auto inv = matk_try_inverse(m);
    if (!inv) throw std::domain_error("matk_inverse: singular matrix");
    return *inv;
}

std::size_t matk_rank(const MatrixK& m) {
    MatrixK w = m;
    return rref(w).size();
}

std::vector<VectorK> matk_kernel(const MatrixK& m) {
    MatrixK w = m;
    auto pivots = rref(w);
    std::vector<bool> is_pivot(m.cols(), false);
    for (std::size_t p : pivots) is_pivot[p] = true;
    std::vector<VectorK> basis;
    for (std::size_t free = 0; free < m.cols(); ++free) {
        if (is_pivot[free]) continue;
        VectorK v(m.cols(), QuadElem::zero(m.field()));
        v[free] = QuadElem::one(m.field());
        for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -w.at(i, free);
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<MatrixK> matk_solve_multi(const MatrixK& m, const MatrixK& b) {
    if (m.rows() != b.rows()) throw std::invalid_argument("matk_solve_multi: shape mismatch");
    MatrixK aug(m.field(), m.rows(), m.cols() + b.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) aug.at(i, j) = m.at(i, j);
        for (std::size_t j = 0; j < b.cols(); ++j) aug.at(i, m.cols() + j) = b.at(i, j).coerce(m.field());
    }
    auto pivots = rref(aug);
    // Inconsistent if a pivot lands in the right block.
    for (std::size_t p : pivots)
        if (p >= m.cols()) return std::nullopt;
    MatrixK x(m.field(), m.cols(), b.cols());
    for (std::size_t i = 0; i < pivots.size(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) x.at(pivots[i], j) = aug.at(i, m.cols() + j);
    // Check residual exactly (free columns default to zero).
    if (!(m * x == b.coerce(m.field()))) return std::nullopt;
    return x;
}

std::optional<VectorK> matk_solve(const MatrixK& m, const VectorK& b) {
    MatrixK bm(m.field(), m.rows(), 1);
    for (std::size_t i = 0; i < m.rows(); ++i) bm.at(i, 0) = b[i].coerce(m.field());
    auto x = matk_solve_multi(m, bm);
    if (!x) return std::nullopt;
    VectorK out(m.cols(), QuadElem::zero(m.field()));
    for (std::size_t i = 0; i < m.cols(); ++i) out[i] = x->at(i, 0);
    return out;
}

MatrixK column_space(const MatrixK& m) {
    MatrixK w = m;
    auto pivots = rref(w);
    // Pivot columns of the original matrix are an independent spanning set.
    MatrixK out(m.field(), m.rows(), pivots.size());
    for (std::size_t j = 0; j < pivots.size(); ++j)
        for (std::size_t i = 0; i < m.rows(); ++i) out.at(i, j) = m.at(i, pivots[j]);
    return out;
}

std::vector<QuadElem> charpoly(const MatrixK& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("charpoly: not square");
    const std::size_t n = m.rows();
    const FieldDescriptor& f = m.field();
    std::vector<QuadElem> coeff(n + 1, QuadElem::zero(f));
    coeff[n] = QuadElem::one(f);
    if (n == 0) return coeff;
    MatrixK mk = m;
    for (std::size_t k = 1; k <= n; ++k) {
        QuadElem ck = -(mk.trace() * QuadElem::from_rat(f, Rat(1, static_cast<long>(k))));
        coeff[n - k] = ck;
        if (k == n) break;
        for (std::size_t i = 0; i < n; ++i) mk.at(i, i) += ck;
        mk = m * mk;
    }
    return coeff;
}

namespace {

using Poly = std::vector<QuadElem>;  // coefficients, low degree first, monic

QuadElem poly_eval(const Poly& p, const QuadElem& x) {
    QuadElem acc = QuadElem::zero(x.field());
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + p[i].coerce(x.field());
    return acc;
}

// Divide a monic polynomial by (x - root); remainder must vanish.
Poly deflate(const Poly& p, const QuadElem& root) {
    const std::size_t n = p.size() - 1;
    Poly q(n, QuadElem::zero(root.field()));
    QuadElem carry = p[n].coerce(root.field());
    for (std::size_t i = n; i-- > 0;) {
        q[i] = carry;
        carry = p[i].coerce(root.field()) + carry * root;
    }
    if (!carry.is_zero()) throw std::logic_error("deflate: nonzero remainder");
    return q;
}

bool poly_all_rational(const Poly& p) {
    for (const QuadElem& c : p)
        if (!c.is_rational_value()) return false;
    return true;
}

std::vector<Int> int_divisors(const Int& n, std::size_t cap) {
    std::vector<Int> divs = {Int(1)};
    for (const auto& [p, e] : factor_int(abs(n))) {
        std::vector<Int> next;
        Int pk = 1;
        for (unsigned k = 0; k <= e; ++k) {
            for (const Int& d : divs) next.push_back(d * pk);
            pk *= p;
        }
        divs = std::move(next);
        if (divs.size() > cap) throw std::length_error("int_divisors: too many divisors");
    }
    std::sort(divs.begin(), divs.end());
    return divs;
}

// All divisors (up to the full unit orbit) of a nonzero integral element.
std::vector<QuadElem> quad_divisors(const QuadElem& a, std::size_t cap) {
    FactoredElement f = factor(a);
    std::vector<QuadElem> divs;
    QuadElem zeta = unit_generator(a.field());
    unsigned w = a.field().unit_group_order();
    QuadElem u = QuadElem::one(a.field());
    for (unsigned j = 0; j < w; ++j) {
        divs.push_back(u);
        u = u * zeta;
    }
    for (const auto& [prime, e] : f.exponents()) {
        std::vector<QuadElem> next;
        QuadElem pk = QuadElem::one(a.field());
        for (Int k = 0; k <= e; ++k) {
            for (const QuadElem& d : divs) next.push_back(d * pk);
            pk = pk * prime;
        }
        divs = std::move(next);
        if (divs.size() > cap) throw std::length_error("quad_divisors: too many divisors");
    }
    return divs;
}

// Squarefree decomposition n = s^2 * d with d squarefree; returns (d, s).
std::pair<Int, Int> square_part(const Int& n) {
    Int d = 1, s = 1;
    for (const auto& [p, e] : factor_int(n)) {
        for (unsigned k = 0; k < e / 2; ++k) s *= p;
        if (e % 2 == 1) d *= p;
    }
    return {d, s};
}

struct SplitState {
    FieldDescriptor field = FieldDescriptor::rational();
    std::vector<QuadElem> roots;
    bool ok = true;
    std::string reason;
    void fail(const std::string& r) {
        ok = false;
        reason = r;
    }
};

// Register a quadratic factor y^2 + b y + c with integer coefficients and no
// rational roots; roots are (-b ± s*sqrt(-d0))/2 when -disc = s^2 d0.
void split_integer_quadratic(SplitState& st, const Int& b, const Int& c) {
    Int disc = b * b - 4 * c;
    if (disc >= 0) {
        st.fail("real quadratic eigenvalues (positive discriminant)");
        return;
    }
    auto [d0, s] = square_part(-disc);
    if (d0 > std::numeric_limits<unsigned long>::max()) {
        st.fail("discriminant too large");
        return;
    }
    FieldDescriptor want = FieldDescriptor::imag_quadratic(d0.get_ui());
    if (st.field.is_rational())
        st.field = want;
    else if (!(st.field == want)) {
        st.fail("eigenvalues need two distinct quadratic extensions");
        return;
    }
    QuadElem half = QuadElem(want, Rat(-b) / 2, Rat(s) / 2);
    st.roots.push_back(half);
    st.roots.push_back(half.conj());
}

void split_rational_monic(SplitState& st, const Poly& input) {
    // Substitute x = y/c so the polynomial becomes monic with integer
    // coefficients; roots scale back by 1/c.
    const std::size_t n = input.size() - 1;
    Int c = 1;
    for (const QuadElem& a : input) {
        Int den = a.x().get_den();
        mpz_lcm(c.get_mpz_t(), c.get_mpz_t(), den.get_mpz_t());
    }
    std::vector<Int> q(n + 1);
    Int cpow = 1;
    for (std::size_t i = 0; i <= n; ++i) {
        Rat scaled = input[n - i].x() * Rat(cpow);
        if (scaled.get_den() != 1) throw std::logic_error("split: scaling failed");
        q[n - i] = scaled.get_num();
        cpow *= c;
    }
    auto push_rational_root = [&](const Int& y) {
        st.roots.push_back(QuadElem::from_rat(st.field, Rat(y) / Rat(c)));
    };
    // Strip zero roots, then integer roots (divisors of the constant term).
    std::vector<Int> w = q;
    auto eval = [&](const std::vector<Int>& poly, const Int& y) {
        Int acc = 0;
        for (std::size_t i = poly.size(); i-- > 0;) acc = acc * y + poly[i];
        return acc;
    };
    auto deflate_int = [&](std::vector<Int>& poly, const Int& y) {
        std::vector<Int> out(poly.size() - 1);
        Int carry = poly.back();
        for (std::size_t i = poly.size() - 1; i-- > 0;) {
            out[i] = carry;
            carry = poly[i] + carry * y;
        }
        poly = std::move(out);
    };
    while (w.size() > 1 && w[0] == 0) {
        push_rational_root(0);
        w.erase(w.begin());
    }
    bool progress = true;
    while (progress && w.size() > 1 && w[0] != 0) {
        progress = false;
        std::vector<Int> divs;
        try {
            divs = int_divisors(w[0], 20000);
        } catch (const std::length_error&) {
            st.fail("constant term has too many divisors");
            return;
        }
        for (const Int& d : divs) {
            for (int sgn : {1, -1}) {
                Int cand = sgn * d;
                if (eval(w, cand) == 0) {
                    push_rational_root(cand);
                    deflate_int(w, cand);
                    progress = true;
                    break;
                }
            }
            if (progress) break;
        }
    }
    const std::size_t deg = w.size() - 1;
    if (deg == 0) return;
    if (deg == 2) {
        split_integer_quadratic(st, w[1], w[0]);
        // Scale the two quadratic roots back by 1/c.
        if (st.ok)
            for (std::size_t i = st.roots.size() - 2; i < st.roots.size(); ++i)
                st.roots[i] = st.roots[i] * QuadElem::from_rat(st.roots[i].field(), Rat(1) / Rat(c));
        return;
    }
    if (deg == 4) {
        // Try an integer split into two monic quadratics.
        std::vector<Int> divs;
        try {
            divs = int_divisors(w[0], 20000);
        } catch (const std::length_error&) {
            st.fail("quartic constant term has too many divisors");
            return;
        }
        for (const Int& d : divs) {
            for (int sgn : {1, -1}) {
                Int b0 = sgn * d;
                Int e0 = w[0] / b0;
                // a + a2 = w[3]; b0 + e0 + a*a2 = w[2]; a*e0 + a2*b0 = w[1]
                Int da = w[3] * w[3] - 4 * (w[2] - b0 - e0);
                if (da < 0 || mpz_perfect_square_p(da.get_mpz_t()) == 0) continue;
                Int sq;
                mpz_sqrt(sq.get_mpz_t(), da.get_mpz_t());
                for (int s2 : {1, -1}) {
                    Int twice_a = w[3] + s2 * sq;
                    if (twice_a % 2 != 0) continue;
                    Int a1 = twice_a / 2;
                    Int a2 = w[3] - a1;
                    if (a1 * e0 + a2 * b0 != w[1]) continue;
                    std::size_t before = st.roots.size();
                    split_integer_quadratic(st, a1, b0);
                    if (st.ok) split_integer_quadratic(st, a2, e0);
                    if (!st.ok) return;
                    for (std::size_t i = before; i < st.roots.size(); ++i)
                        st.roots[i] =
                            st.roots[i] * QuadElem::from_rat(st.roots[i].field(), Rat(1) / Rat(c));
                    return;
                }
            }
        }
        st.fail("irreducible quartic characteristic factor");
        return;
    }
    st.fail("characteristic factor of degree " + std::to_string(deg) +
            " without roots in a quadratic extension");
}

void split_quadratic_field_poly(SplitState& st, const Poly& input) {
    // Coefficients genuinely involve sqrt(-d): roots must lie in the field
    // itself. Peel roots by O_K divisor search on the constant term.
    Poly w = input;
    const FieldDescriptor f = st.field;
    while (w.size() > 1) {
        const std::size_t deg = w.size() - 1;
        if (deg == 1) {
            st.roots.push_back(-w[0]);
            return;
        }
        if (deg == 2) {
            QuadElem disc = w[1] * w[1] - QuadElem::from_rat(f, Rat(4)) * w[0];
            auto s = field_sqrt(disc);
            if (!s) {
                st.fail("2x2 eigenvalues outside the coefficient field");
                return;
            }
            QuadElem half = QuadElem::from_rat(f, Rat(1, 2));
            st.roots.push_back((-w[1] + *s) * half);
            st.roots.push_back((-w[1] - *s) * half);
            return;
        }
        if (w[0].is_zero()) {
            st.roots.push_back(QuadElem::zero(f));
            w.erase(w.begin());
            continue;
        }
        // Scale to integral coefficients so candidate roots divide w[0].
        Int scale = 1;
        for (const QuadElem& a : w) {
            Int dx = a.x().get_den(), dy = a.y().get_den();
            mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), dx.get_mpz_t());
            mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), dy.get_mpz_t());
        }
        Poly scaled(w.size(), QuadElem::zero(f));
        QuadElem spow = QuadElem::one(f);
        for (std::size_t i = w.size(); i-- > 0;) {
            scaled[i] = w[i] * spow;
            spow = spow * QuadElem::from_rat(f, Rat(scale));
        }
        if (!f.class_number_one()) {
            st.fail("root search needs unique factorization: " + f.to_string());
            return;
        }
        bool found = false;
        std::vector<QuadElem> cands;
        try {
            cands = quad_divisors(scaled[0], 20000);
        } catch (const std::length_error&) {
            st.fail("constant term has too many divisors");
            return;
        }
        for (const QuadElem& cand : cands) {
            QuadElem root = cand / QuadElem::from_rat(f, Rat(scale));
            if (poly_eval(w, root).is_zero()) {
                st.roots.push_back(root);
                w = deflate(w, root);
                found = true;
                break;
            }
        }
        if (!found) {
            st.fail("no root of degree-" + std::to_string(deg) + " factor in " + f.to_string());
            return;
        }
    }
}

}  // namespace

RootSplit split_monic_poly(const std::vector<QuadElem>& poly, const FieldDescriptor& base) {
    if (poly.empty() || !(poly.back() == QuadElem::one(poly.back().field())))
        throw std::invalid_argument("split_monic_poly: polynomial must be monic");
    SplitState st;
    st.field = base;
    if (poly_all_rational(poly)) {
        FieldDescriptor hold = st.field;
        st.field = FieldDescriptor::rational();
        split_rational_monic(st, poly);
        if (st.ok && !hold.is_rational()) {
            if (st.field.is_rational())
                st.field = hold;
            else if (!(st.field == hold))
                st.fail("eigenvalues leave the coefficient field");
        }
        if (st.ok)
            for (QuadElem& r : st.roots) r = r.coerce(st.field);
    } else {
        split_quadratic_field_poly(st, poly);
    }
    RootSplit out;
    out.ok = st.ok;
    out.field = st.field;
    out.roots = std::move(st.roots);
    out.reason = std::move(st.reason);
    return out;
}

namespace {

struct DiagAttempt {
    bool ok = false;
    std::string reason;
    Diagonalizable result{FieldDescriptor::rational(), {}, {}, {}};
};

DiagAttempt try_diagonalize(const std::vector<MatrixK>& js, const FieldDescriptor& field) {
    DiagAttempt out;
    const std::size_t g = js[0].rows();
    std::vector<MatrixK> blocks = {MatrixK::identity(field, g)};
    for (const MatrixK& j0 : js) {
        MatrixK j = j0.coerce(field);
        std::vector<MatrixK> next;
        for (const MatrixK& s : blocks) {
            auto x = matk_solve_multi(s, j * s);
            if (!x) {
                out.reason = "block not invariant";
                return out;
            }
            RootSplit rs = split_monic_poly(charpoly(*x), field);
            if (!rs.ok) {
                out.reason = rs.reason;
                return out;
            }
            std::vector<QuadElem> distinct;
            for (const QuadElem& r : rs.roots) {
                bool seen = false;
                for (const QuadElem& d : distinct) seen = seen || d == r;
                if (!seen) distinct.push_back(r);
            }
            std::size_t total = 0;
            for (const QuadElem& lambda : distinct) {
                MatrixK shifted = *x;
                for (std::size_t i = 0; i < shifted.rows(); ++i)
                    shifted.at(i, i) -= lambda.coerce(field);
                std::vector<VectorK> kern = matk_kernel(shifted);
                total += kern.size();
                if (kern.empty()) continue;
                MatrixK kb(field, x->rows(), kern.size());
                for (std::size_t c = 0; c < kern.size(); ++c)
                    for (std::size_t i = 0; i < x->rows(); ++i) kb.at(i, c) = kern[c][i];
                next.push_back(s * kb);
            }
            if (total != x->rows()) {
                out.reason = "matrix not diagonalizable";
                return out;
            }
        }
        blocks = std::move(next);
    }
    MatrixK p(field, g, g);
    std::size_t col = 0;
    for (const MatrixK& b : blocks)
        for (std::size_t c = 0; c < b.cols(); ++c, ++col)
            for (std::size_t i = 0; i < g; ++i) p.at(i, col) = b.at(i, c);
    auto pinv = matk_try_inverse(p);
    if (!pinv) {
        out.reason = "eigenbasis not invertible";
        return out;
    }
    std::vector<std::vector<QuadElem>> table;
    for (const MatrixK& j0 : js) {
        MatrixK d = *pinv * j0.coerce(field) * p;
        std::vector<QuadElem> row;
        for (std::size_t i = 0; i < g; ++i) {
            for (std::size_t jj = 0; jj < g; ++jj)
                if (i != jj && !d.at(i, jj).is_zero()) {
                    out.reason = "conjugate not diagonal";
                    return out;
                }
            row.push_back(d.at(i, i));
        }
        table.push_back(std::move(row));
    }
    out.ok = true;
    out.result = Diagonalizable{field, p, *pinv, std::move(table)};
    return out;
}

}  // namespace

Eigenstructure common_eigenstructure(const std::vector<MatrixK>& js) {
    if (js.empty()) throw std::invalid_argument("common_eigenstructure: empty family");
    const std::size_t g = js[0].rows();
    for (const MatrixK& j : js)
        if (j.rows() != g || j.cols() != g)
            throw std::invalid_argument("common_eigenstructure: shape mismatch");
    // Settle the working field: every characteristic polynomial must split
    // over the base field or one common imaginary quadratic extension.
    FieldDescriptor field = FieldDescriptor::rational();
    for (const MatrixK& j : js)
        if (!j.field().is_rational()) {
            if (!field.is_rational() && !(field == j.field()))
                return Unsupported{"matrices over distinct imaginary quadratic fields"};
            field = j.field();
        }
    for (std::size_t i = 0; i < js.size(); ++i)
        for (std::size_t k = i + 1; k < js.size(); ++k)
            if (!(js[i].coerce(field) * js[k].coerce(field) ==
                  js[k].coerce(field) * js[i].coerce(field)))
                throw CommutationError("matrices " + std::to_string(i + 1) + " and " +
                                       std::to_string(k + 1) + " do not commute");
    std::string split_failure;
    for (const MatrixK& j : js) {
        RootSplit rs = split_monic_poly(charpoly(j.coerce(field)), field);
        if (!rs.ok) {
            split_failure = rs.reason;
            break;
        }
        field = rs.field;
    }

    if (split_failure.empty()) {
        DiagAttempt attempt = try_diagonalize(js, field);
        if (attempt.ok) return attempt.result;
        split_failure = attempt.reason;
    }

    if (g != 2) return Unsupported{split_failure};

    // 2x2 fallback: commuting family with a non-diagonalizable member forces
    // one repeated eigenvalue per matrix and a shared eigenvector.
    std::vector<QuadElem> lambda;
    for (const MatrixK& j0 : js) {
        MatrixK j = j0.coerce(field);
        QuadElem tr = j.trace();
        QuadElem det = j.at(0, 0) * j.at(1, 1) - j.at(0, 1) * j.at(1, 0);
        if (!(tr * tr == QuadElem::from_rat(field, Rat(4)) * det))
            return Unsupported{"mixed spectra: " + split_failure};
        lambda.push_back(tr * QuadElem::from_rat(field, Rat(1, 2)));
    }
    std::size_t pivot = js.size();
    for (std::size_t i = 0; i < js.size(); ++i) {
        MatrixK j = js[i].coerce(field);
        MatrixK shifted = j;
        shifted.at(0, 0) -= lambda[i];
        shifted.at(1, 1) -= lambda[i];
        bool scalar = shifted.at(0, 0).is_zero() && shifted.at(0, 1).is_zero() &&
                      shifted.at(1, 0).is_zero() && shifted.at(1, 1).is_zero();
        if (!scalar) {
            pivot = i;
            break;
        }
    }
    if (pivot == js.size()) return Unsupported{"scalar family failed diagonalization"};
    MatrixK shifted = js[pivot].coerce(field);
    shifted.at(0, 0) -= lambda[pivot];
    shifted.at(1, 1) -= lambda[pivot];
    std::vector<VectorK> kern = matk_kernel(shifted);
    if (kern.size() != 1) return Unsupported{"repeated eigenvalue with full eigenspace"};
    VectorK v = kern[0];
    for (std::size_t i = 0; i < js.size(); ++i) {
        VectorK jv = js[i].coerce(field) * v;
        if (!(jv[0] == lambda[i] * v[0] && jv[1] == lambda[i] * v[1]))
            return Unsupported{"no shared eigenvector"};
    }
    // Complete v to a basis with a standard vector.
    VectorK u(2, QuadElem::zero(field));
    u[v[0].is_zero() ? 0 : 1] = QuadElem::one(field);
    MatrixK binv(field, 2, 2);
    binv.at(0, 0) = v[0];
    binv.at(1, 0) = v[1];
    binv.at(0, 1) = u[0];
    binv.at(1, 1) = u[1];
    auto b = matk_try_inverse(binv);
    if (!b) return Unsupported{"shear basis not invertible"};
    std::vector<QuadElem> shear;
    for (std::size_t i = 0; i < js.size(); ++i) {
        MatrixK n = *b * js[i].coerce(field) * binv;
        if (lambda[i].is_zero()) return Unsupported{"nilpotent member (zero eigenvalue)"};
        QuadElem c = n.at(0, 1) / lambda[i];
        MatrixK expect(field, 2, 2);
        expect.at(0, 0) = lambda[i];
        expect.at(0, 1) = lambda[i] * c;
        expect.at(1, 1) = lambda[i];
        if (!(n == expect)) return Unsupported{"shear normal form verification failed"};
        shear.push_back(c);
    }
    return TwoByTwoUnipotent{field, *b, binv, std::move(lambda), std::move(shear)};
}

}  // namespace retset
