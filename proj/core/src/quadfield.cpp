#include "retset/quadfield.hpp"

#include <array>
#include <sstream>
#include <stdexcept>

namespace retset {

FieldDescriptor FieldDescriptor::imag_quadratic(unsigned long d) {
    if (d == 0) throw std::invalid_argument("FieldDescriptor: d must be positive");
    Int n(static_cast<unsigned long>(d));
    for (Int p = 2; p * p <= n; ++p)
        if (n % (p * p) == 0) throw std::invalid_argument("FieldDescriptor: d must be squarefree");
    return FieldDescriptor(d);
}

bool FieldDescriptor::class_number_one() const {
    if (is_rational()) return true;
    static constexpr std::array<unsigned long, 9> ok = {1, 2, 3, 7, 11, 19, 43, 67, 163};
    for (unsigned long v : ok)
        if (d_ == v) return true;
    return false;
}

unsigned FieldDescriptor::unit_group_order() const {
    if (d_ == 1) return 4;
    if (d_ == 3) return 6;
    return 2;
}

std::string FieldDescriptor::to_string() const {
    if (is_rational()) return "Q";
    return "Q(sqrt(-" + std::to_string(d_) + "))";
}

QuadElem::QuadElem(FieldDescriptor field, Rat x, Rat y)
    : field_(field), x_(std::move(x)), y_(std::move(y)) {
    if (field_.is_rational() && y_ != 0)
        throw std::invalid_argument("QuadElem: nonzero imaginary part over Q");
}

bool QuadElem::is_integral() const {
    if (field_.is_rational()) return x_.get_den() == 1;
    if (!field_.half_integral_ring()) return x_.get_den() == 1 && y_.get_den() == 1;
    // Ring basis 1, (1+sqrt(-d))/2: coordinates are x - y and 2y.
    Rat two_y = 2 * y_;
    Rat u = x_ - y_;
    return two_y.get_den() == 1 && u.get_den() == 1;
}

FieldDescriptor QuadElem::join(const FieldDescriptor& a, const FieldDescriptor& b) {
    if (a == b) return a;
    if (a.is_rational()) return b;
    if (b.is_rational()) return a;
    throw std::invalid_argument("QuadElem: mixing distinct imaginary quadratic fields");
}

QuadElem QuadElem::coerce(const FieldDescriptor& target) const {
    if (field_ == target) return *this;
    if (field_.is_rational()) return QuadElem(target, x_, Rat(0));
    throw std::invalid_argument("QuadElem::coerce: incompatible fields");
}

QuadElem QuadElem::operator+(const QuadElem& o) const {
    FieldDescriptor f = join(field_, o.field_);
    return QuadElem(f, x_ + o.x_, y_ + o.y_);
}

QuadElem QuadElem::operator-(const QuadElem& o) const {
    FieldDescriptor f = join(field_, o.field_);
    return QuadElem(f, x_ - o.x_, y_ - o.y_);
}

QuadElem QuadElem::operator*(const QuadElem& o) const {
    FieldDescriptor f = join(field_, o.field_);
    Rat d(static_cast<long>(f.d()));
    return QuadElem(f, x_ * o.x_ - d * y_ * o.y_, x_ * o.y_ + y_ * o.x_);
}

QuadElem QuadElem::inverse() const {
    if (is_zero()) throw std::domain_error("QuadElem: division by zero");
    Rat n = norm();
    return QuadElem(field_, x_ / n, -y_ / n);
}

QuadElem QuadElem::operator/(const QuadElem& o) const { return *this * o.inverse(); }

QuadElem QuadElem::pow(const Int& e) const {
    QuadElem base = e < 0 ? inverse() : *this;
    Int n = abs(e);
    QuadElem acc = QuadElem::one(field_);
    while (n > 0) {
        if (mpz_odd_p(n.get_mpz_t())) acc = acc * base;
        base = base * base;
        n >>= 1;
    }
    return acc;
}

bool QuadElem::operator==(const QuadElem& other) const {
    if (x_ != other.x_ || y_ != other.y_) return false;
    if (y_ == 0) return true;  // rational values compare across fields
    return field_ == other.field_;
}

bool QuadElem::key_less(const QuadElem& other) const {
    if (field_.d() != other.field_.d()) return field_.d() < other.field_.d();
    int c = cmp(x_, other.x_);
    if (c != 0) return c < 0;
    return cmp(y_, other.y_) < 0;
}

std::string QuadElem::to_string() const {
    std::ostringstream os;
    if (y_ == 0) {
        os << x_.get_str();
    } else {
        Rat ay = abs(y_);
        os << x_.get_str() << (y_ > 0 ? "+" : "-") << ay.get_str() << "*sqrt(-" << field_.d()
           << ")";
    }
    return os.str();
}

std::optional<Rat> rat_sqrt(const Rat& a) {
    if (a < 0) return std::nullopt;
    Int num = a.get_num(), den = a.get_den();
    Int rn, rd;
    if (mpz_perfect_square_p(num.get_mpz_t()) == 0) return std::nullopt;
    if (mpz_perfect_square_p(den.get_mpz_t()) == 0) return std::nullopt;
    mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
    return Rat(rn) / Rat(rd);
}

std::optional<QuadElem> field_sqrt(const QuadElem& a) {
    const FieldDescriptor& f = a.field();
    Rat d(static_cast<long>(f.d()));
    if (a.y() == 0) {
        if (auto r = rat_sqrt(a.x())) return QuadElem::from_rat(f, *r);
        if (f.is_rational()) return std::nullopt;
        // x negative with -x/d a rational square gives a purely imaginary root.
        if (a.x() < 0) {
            if (auto r = rat_sqrt(-a.x() / d)) return QuadElem(f, Rat(0), *r);
        }
        return std::nullopt;
    }
    // (u + v sqrt(-d))^2 = a: u^2 - d v^2 = x, 2uv = y. Then u^2 is a root of
    // 4t^2 - 4xt - d y^2 = 0, so t = (x ± sqrt(norm(a)))/2 must be a rational
    // square.
    auto n = rat_sqrt(a.norm());
    if (!n) return std::nullopt;
    for (int sgn : {1, -1}) {
        Rat t = (a.x() + (sgn > 0 ? *n : -*n)) / 2;
        auto u = rat_sqrt(t);
        if (!u || *u == 0) continue;
        Rat v = a.y() / (2 * *u);
        QuadElem cand(f, *u, v);
        if (cand * cand == a) return cand;
    }
    return std::nullopt;
}

}  // namespace retset
