#pragma once

#include <map>
#include <optional>
#include <vector>

#include "retset/classc.hpp"
#include "retset/quadfield.hpp"

namespace retset {

struct UnsupportedFieldError : std::domain_error {
    using std::domain_error::domain_error;
};

struct QuadKeyLess {
    bool operator()(const QuadElem& a, const QuadElem& b) const { return a.key_less(b); }
};

/// Unit times prime powers: unit is an index into the root-of-unity group
/// (generator -1, or i for d=1, or (1+sqrt(-3))/2 for d=3), exponents map
/// canonical primes of O_K (positive rational primes over Q) to integers.
class FactoredElement {
public:
    explicit FactoredElement(FieldDescriptor field) : field_(field), unit_index_(0) {}

    const FieldDescriptor& field() const { return field_; }
    unsigned unit_index() const { return unit_index_; }
    void set_unit_index(unsigned idx) { unit_index_ = idx % field_.unit_group_order(); }
    const std::map<QuadElem, Int, QuadKeyLess>& exponents() const { return exponents_; }

    void bump(const QuadElem& prime, const Int& e);

    FactoredElement operator*(const FactoredElement& o) const;
    FactoredElement operator/(const FactoredElement& o) const;

    QuadElem reconstruct() const;

    bool operator==(const FactoredElement& o) const {
        return field_ == o.field_ && unit_index_ == o.unit_index_ && exponents_ == o.exponents_;
    }

private:
    FieldDescriptor field_;
    unsigned unit_index_;
    std::map<QuadElem, Int, QuadKeyLess> exponents_;
};

/// Canonical generator of the root-of-unity group of O_K.
QuadElem unit_generator(const FieldDescriptor& field);

/// Index j with zeta^j == u, if u is a root of unity of the field.
std::optional<unsigned> unit_index_of(const QuadElem& u);

/// Canonical primes of O_K above the rational prime p (one if inert or
/// ramified, two if split). Requires class number one.
std::vector<QuadElem> primes_above(const Int& p, const FieldDescriptor& field);

/// Exact factorization of a nonzero integral element.
FactoredElement factor(const QuadElem& a);

/// Factorization of a nonzero field element (negative exponents allowed).
FactoredElement factor_field_element(const QuadElem& a);

/// Trial-division factorization of a positive integer.
std::map<Int, unsigned> factor_int(Int n);

/// { n in Z^r : prod a_i^{n_i} = 1 }.
IntegerLattice mult_relation_lattice(const std::vector<QuadElem>& a);

struct MultSolution {
    std::vector<Int> particular;  // one solution over Z^r
    IntegerLattice lattice;       // full homogeneous solution lattice
};

/// Full solution set over Z^r of prod a_i^{n_i} = rhs, if any.
std::optional<MultSolution> mult_equation_solve(const std::vector<QuadElem>& a,
                                                const QuadElem& rhs);

}  // namespace retset
