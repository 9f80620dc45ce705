#include "retset/factored.hpp"

#include <algorithm>
#include <stdexcept>

namespace retset {

namespace {

void require_supported(const FieldDescriptor& f) {
    if (!f.class_number_one())
        throw UnsupportedFieldError("unsupported field (class number > 1): " + f.to_string());
}

// Lexicographically smallest associate by (|x|, |y|, x, y).
QuadElem canonical_associate(const QuadElem& pi) {
    QuadElem zeta = unit_generator(pi.field());
    unsigned w = pi.field().unit_group_order();
    QuadElem best = pi, u = QuadElem::one(pi.field());
    auto less = [](const QuadElem& a, const QuadElem& b) {
        int c = cmp(abs(a.x()), abs(b.x()));
        if (c != 0) return c < 0;
        c = cmp(abs(a.y()), abs(b.y()));
        if (c != 0) return c < 0;
        c = cmp(a.x(), b.x());
        if (c != 0) return c < 0;
        return cmp(a.y(), b.y()) < 0;
    };
    for (unsigned j = 1; j < w; ++j) {
        u = u * zeta;
        QuadElem cand = u * pi;
        if (less(cand, best)) best = cand;
    }
    return best;
}

}  // namespace

QuadElem unit_generator(const FieldDescriptor& field) {
    if (field.d() == 1) return QuadElem(field, Rat(0), Rat(1));                  // i
    if (field.d() == 3) return QuadElem(field, Rat(1, 2), Rat(1, 2));            // zeta_6
    return QuadElem::from_rat(field, Rat(-1));
}

std::optional<unsigned> unit_index_of(const QuadElem& u) {
    QuadElem zeta = unit_generator(u.field());
    QuadElem acc = QuadElem::one(u.field());
    for (unsigned j = 0; j < u.field().unit_group_order(); ++j) {
        if (acc == u) return j;
        acc = acc * zeta;
    }
    return std::nullopt;
}

std::map<Int, unsigned> factor_int(Int n) {
    if (n <= 0) throw std::domain_error("factor_int: argument must be positive");
    std::map<Int, unsigned> out;
    for (Int p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        while (n % p == 0) {
            ++out[p];
            n /= p;
        }
    }
    if (n > 1) ++out[n];
    return out;
}

std::vector<QuadElem> primes_above(const Int& p, const FieldDescriptor& field) {
    if (field.is_rational()) return {QuadElem::from_rat(field, Rat(p))};
    require_supported(field);
    const Int d(static_cast<unsigned long>(field.d()));
    std::optional<QuadElem> found;
    if (field.half_integral_ring()) {
        // Elements (s + t sqrt(-d))/2 with s = t mod 2; norm (s^2 + d t^2)/4 = p.
        Int four_p = 4 * p;
        for (Int t = 0; d * t * t <= four_p; ++t) {
            Int rem = four_p - d * t * t;
            if (mpz_perfect_square_p(rem.get_mpz_t()) == 0) continue;
            Int s;
            mpz_sqrt(s.get_mpz_t(), rem.get_mpz_t());
            if ((s - t) % 2 != 0) continue;
            found = QuadElem(field, Rat(s) / 2, Rat(t) / 2);
            break;
        }
    } else {
        for (Int y = 0; d * y * y <= p; ++y) {
            Int rem = p - d * y * y;
            if (mpz_perfect_square_p(rem.get_mpz_t()) == 0) continue;
            Int x;
            mpz_sqrt(x.get_mpz_t(), rem.get_mpz_t());
            found = QuadElem(field, Rat(x), Rat(y));
            break;
        }
    }
    if (!found) return {QuadElem::from_rat(field, Rat(p))};  // inert
    QuadElem c1 = canonical_associate(*found);
    QuadElem c2 = canonical_associate(found->conj());
    if (c1 == c2) return {c1};  // ramified
    std::vector<QuadElem> out = {c1, c2};
    std::sort(out.begin(), out.end(), [](const QuadElem& a, const QuadElem& b) { return a.key_less(b); });
    return out;
}

void FactoredElement::bump(const QuadElem& prime, const Int& e) {
    if (e == 0) return;
    auto it = exponents_.find(prime);
    if (it == exponents_.end()) {
        exponents_.emplace(prime, e);
    } else {
        it->second += e;
        if (it->second == 0) exponents_.erase(it);
    }
}

FactoredElement FactoredElement::operator*(const FactoredElement& o) const {
    FactoredElement r = *this;
    r.set_unit_index(unit_index_ + o.unit_index_);
    for (const auto& [p, e] : o.exponents_) r.bump(p, e);
    return r;
}

FactoredElement FactoredElement::operator/(const FactoredElement& o) const {
    FactoredElement r = *this;
    unsigned w = field_.unit_group_order();
    r.set_unit_index(unit_index_ + w - o.unit_index_ % w);
    for (const auto& [p, e] : o.exponents_) r.bump(p, -e);
    return r;
}

QuadElem FactoredElement::reconstruct() const {
    QuadElem acc = unit_generator(field_).pow(Int(unit_index_));
    for (const auto& [p, e] : exponents_) acc = acc * p.pow(e);
    return acc;
}

FactoredElement factor(const QuadElem& a) {
    if (a.is_zero()) throw std::domain_error("factor: zero element");
    if (!a.is_integral()) throw std::domain_error("factor: element not integral");
    require_supported(a.field());
    FactoredElement out(a.field());
    if (a.field().is_rational()) {
        Int n = a.x().get_num();
        if (n < 0) out.set_unit_index(1);
        for (const auto& [p, e] : factor_int(abs(n)))
            out.bump(QuadElem::from_rat(a.field(), Rat(p)), Int(e));
        return out;
    }
    QuadElem rest = a;
    Int n = a.norm().get_num();
    for (const auto& [p, e] : factor_int(n)) {
        (void)e;
        for (const QuadElem& pi : primes_above(p, a.field())) {
            while (true) {
                QuadElem q = rest / pi;
                if (!q.is_integral()) break;
                rest = q;
                out.bump(pi, 1);
            }
        }
    }
    auto idx = unit_index_of(rest);
    if (!idx) throw std::logic_error("factor: nonunit residual");
    out.set_unit_index(*idx);
    return out;
}

FactoredElement factor_field_element(const QuadElem& a) {
    if (a.is_zero()) throw std::domain_error("factor: zero element");
    if (a.is_integral()) return factor(a);
    Int m = 1;
    Int dx = a.x().get_den(), dy = a.y().get_den();
    mpz_lcm(m.get_mpz_t(), dx.get_mpz_t(), dy.get_mpz_t());
    QuadElem scaled = a * QuadElem::from_rat(a.field(), Rat(m));
    return factor(scaled) / factor(QuadElem::from_rat(a.field(), Rat(m)));
}

namespace {

FieldDescriptor common_field(const std::vector<QuadElem>& a) {
    FieldDescriptor f = FieldDescriptor::rational();
    for (const QuadElem& x : a)
        if (!x.field().is_rational()) {
            if (!f.is_rational() && !(f == x.field()))
                throw std::invalid_argument("mixed imaginary quadratic fields");
            f = x.field();
        }
    return f;
}

struct ExponentSystem {
    std::vector<QuadElem> primes;  // sorted universe
    IntMat matrix;                 // primes x r exponent matrix
    std::vector<FactoredElement> factored;
};

ExponentSystem build_system(const std::vector<QuadElem>& a, const FieldDescriptor& field) {
    ExponentSystem sys;
    for (const QuadElem& x : a) {
        if (x.is_zero()) throw std::domain_error("multiplicative solve: zero element");
        sys.factored.push_back(factor_field_element(x.coerce(field)));
    }
    std::map<QuadElem, std::size_t, QuadKeyLess> index;
    for (const FactoredElement& f : sys.factored)
        for (const auto& [p, e] : f.exponents()) {
            (void)e;
            index.emplace(p, 0);
        }
    std::size_t i = 0;
    for (auto& [p, idx] : index) {
        idx = i++;
        sys.primes.push_back(p);
    }
    sys.matrix = IntMat(sys.primes.size(), a.size());
    for (std::size_t col = 0; col < sys.factored.size(); ++col)
        for (const auto& [p, e] : sys.factored[col].exponents())
            sys.matrix.at(index.at(p), col) = e;
    return sys;
}

// { m in Z^s : sum m_j t_j = 0 mod w }, mapped through the rows `basis`.
IntegerLattice torsion_kernel(const std::vector<unsigned>& t, unsigned w, const IntMat& basis,
                              std::size_t ambient) {
    const std::size_t s = t.size();
    IntMat congruence(1, s + 1);
    for (std::size_t j = 0; j < s; ++j) congruence.at(0, j) = Int(t[j]);
    congruence.at(0, s) = Int(w);
    IntMat mker = kernel_basis(congruence);  // rows (m, q) with m.t + q w = 0
    IntMat gens(0, ambient);
    for (std::size_t i = 0; i < mker.rows(); ++i) {
        std::vector<Int> v(ambient, Int(0));
        for (std::size_t j = 0; j < s; ++j)
            for (std::size_t c = 0; c < ambient; ++c) v[c] += mker.at(i, j) * basis.at(j, c);
        gens.append_row(v);
    }
    return IntegerLattice::from_generators(ambient, gens);
}

QuadElem eval_power_product(const std::vector<QuadElem>& a, const std::vector<Int>& n,
                            const FieldDescriptor& field) {
    QuadElem acc = QuadElem::one(field);
    for (std::size_t i = 0; i < a.size(); ++i) acc = acc * a[i].coerce(field).pow(n[i]);
    return acc;
}

}  // namespace

IntegerLattice mult_relation_lattice(const std::vector<QuadElem>& a) {
    const std::size_t r = a.size();
    FieldDescriptor field = common_field(a);
    require_supported(field);
    ExponentSystem sys = build_system(a, field);
    IntMat k0 = kernel_basis(sys.matrix);  // rows: tuples with trivial prime part
    const unsigned w = field.unit_group_order();
    // Torsion character on the prime-kernel, evaluated exactly per basis row.
    std::vector<unsigned> t(k0.rows());
    for (std::size_t j = 0; j < k0.rows(); ++j) {
        QuadElem val = eval_power_product(a, k0.row(j), field);
        auto idx = unit_index_of(val);
        if (!idx) throw std::logic_error("mult_relation_lattice: kernel value not a unit");
        t[j] = *idx;
    }
    return torsion_kernel(t, w, k0, r);
}

std::optional<MultSolution> mult_equation_solve(const std::vector<QuadElem>& a,
                                                const QuadElem& rhs) {
    if (rhs.is_zero()) throw std::domain_error("mult_equation_solve: zero right-hand side");
    const std::size_t r = a.size();
    FieldDescriptor field = common_field(a);
    if (!rhs.field().is_rational()) {
        if (!field.is_rational() && !(field == rhs.field()))
            throw std::invalid_argument("mixed imaginary quadratic fields");
        field = rhs.field();
    }
    require_supported(field);
    std::vector<QuadElem> all = a;
    all.push_back(rhs);
    ExponentSystem sys = build_system(all, field);
    // Split the combined matrix: first r columns for the bases, last for rhs.
    IntMat e(sys.primes.size(), r);
    std::vector<Int> f(sys.primes.size());
    for (std::size_t i = 0; i < sys.primes.size(); ++i) {
        for (std::size_t j = 0; j < r; ++j) e.at(i, j) = sys.matrix.at(i, j);
        f[i] = sys.matrix.at(i, r);
    }
    auto n0 = solve_left(e.transpose(), f);
    if (!n0) return std::nullopt;

    IntMat k0 = kernel_basis(e);
    const unsigned w = field.unit_group_order();
    std::vector<unsigned> t(k0.rows());
    for (std::size_t j = 0; j < k0.rows(); ++j) {
        auto idx = unit_index_of(eval_power_product(a, k0.row(j), field));
        if (!idx) throw std::logic_error("mult_equation_solve: kernel value not a unit");
        t[j] = *idx;
    }
    // Unit defect of the particular solution, fixed inside the finite quotient.
    QuadElem defect = eval_power_product(a, *n0, field) / rhs.coerce(field);
    auto didx = unit_index_of(defect);
    if (!didx) throw std::logic_error("mult_equation_solve: defect not a unit");
    unsigned target = (w - *didx % w) % w;

    const std::size_t s = k0.rows();
    std::vector<unsigned> m(s, 0);
    bool found = false;
    while (true) {
        unsigned acc = 0;
        for (std::size_t j = 0; j < s; ++j) acc = (acc + m[j] * t[j]) % w;
        if (acc == target) {
            found = true;
            break;
        }
        std::size_t j = 0;
        while (j < s && ++m[j] == w) m[j++] = 0;
        if (j == s) break;
    }
    if (!found) return std::nullopt;
    std::vector<Int> particular = *n0;
    for (std::size_t j = 0; j < s; ++j)
        for (std::size_t c = 0; c < r; ++c) particular[c] += Int(m[j]) * k0.at(j, c);
    return MultSolution{std::move(particular), torsion_kernel(t, w, k0, r)};
}

}  // namespace retset
