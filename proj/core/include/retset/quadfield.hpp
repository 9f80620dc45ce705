#pragma once

#include <string>

#include "retset/intmat.hpp"

namespace retset {

/// The base field: Q itself or an imaginary quadratic field Q(sqrt(-d)).
class FieldDescriptor {
public:
    static FieldDescriptor rational() { return FieldDescriptor(0); }
    static FieldDescriptor imag_quadratic(unsigned long d);

    bool is_rational() const { return d_ == 0; }
    unsigned long d() const { return d_; }

    /// Ring of integers is Z[(1+sqrt(-d))/2] exactly when -d = 1 mod 4.
    bool half_integral_ring() const { return d_ % 4 == 3; }

    /// d for which O_K has unique factorization.
    bool class_number_one() const;

    /// Order w of the root-of-unity group: 2 generically, 4 for d=1, 6 for d=3.
    unsigned unit_group_order() const;

    bool operator==(const FieldDescriptor& other) const = default;

    std::string to_string() const;

private:
    explicit FieldDescriptor(unsigned long d) : d_(d) {}
    unsigned long d_;  // 0 encodes the rational field
};

/// Exact element x + y*sqrt(-d) of the field (y = 0 over Q).
class QuadElem {
public:
    QuadElem() : field_(FieldDescriptor::rational()), x_(0), y_(0) {}
    QuadElem(FieldDescriptor field, Rat x, Rat y);
    static QuadElem from_rat(const FieldDescriptor& field, const Rat& x) {
        return QuadElem(field, x, Rat(0));
    }
    static QuadElem zero(const FieldDescriptor& field) { return from_rat(field, Rat(0)); }
    static QuadElem one(const FieldDescriptor& field) { return from_rat(field, Rat(1)); }

    const FieldDescriptor& field() const { return field_; }
    const Rat& x() const { return x_; }
    const Rat& y() const { return y_; }

    bool is_zero() const { return x_ == 0 && y_ == 0; }
    bool is_rational_value() const { return y_ == 0; }

    /// True iff the element lies in O_K (in Z when the field is Q).
    bool is_integral() const;

    Rat norm() const { return x_ * x_ + Rat(static_cast<long>(field_.d())) * y_ * y_; }
    Rat trace() const { return 2 * x_; }
    QuadElem conj() const { return QuadElem(field_, x_, -y_); }

    QuadElem operator+(const QuadElem& o) const;
    QuadElem operator-(const QuadElem& o) const;
    QuadElem operator-() const { return QuadElem(field_, -x_, -y_); }
    QuadElem operator*(const QuadElem& o) const;
    QuadElem operator/(const QuadElem& o) const;
    QuadElem& operator+=(const QuadElem& o) { return *this = *this + o; }
    QuadElem& operator-=(const QuadElem& o) { return *this = *this - o; }
    QuadElem& operator*=(const QuadElem& o) { return *this = *this * o; }

    QuadElem inverse() const;
    QuadElem pow(const Int& e) const;  // negative exponents via the inverse

    bool operator==(const QuadElem& other) const;
    bool operator!=(const QuadElem& other) const { return !(*this == other); }

    /// Strict total order usable as a map key (field, then x, then y).
    bool key_less(const QuadElem& other) const;

    /// Coerce into a compatible field (Q embeds into any Q(sqrt(-d))).
    QuadElem coerce(const FieldDescriptor& target) const;

    std::string to_string() const;

private:
    FieldDescriptor field_;
    Rat x_, y_;
    static FieldDescriptor join(const FieldDescriptor& a, const FieldDescriptor& b);
};

/// Exact square root inside the field, when one exists.
std::optional<QuadElem> field_sqrt(const QuadElem& a);

std::optional<Rat> rat_sqrt(const Rat& a);

}  // namespace retset
