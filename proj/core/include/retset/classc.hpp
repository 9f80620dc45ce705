#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "retset/intmat.hpp"

namespace retset {

/// Exponent tuple in N^r (context decides whether negatives are allowed;
/// cell offsets are validated nonnegative).
using Tuple = std::vector<Int>;

/// Coordinatewise order on N^r: true iff b - a is nonnegative.
bool tuple_leq(const Tuple& a, const Tuple& b);

/// The elements of s with no strictly smaller element of s; every element
/// of s dominates one of them.
std::vector<Tuple> minimal_elements(const std::vector<Tuple>& s);

std::vector<Tuple> sorted_unique(std::vector<Tuple> s);

/// Subgroup of Z^r kept in canonical row Hermite normal form, so equal
/// lattices have bit-identical bases.
class IntegerLattice {
public:
    explicit IntegerLattice(std::size_t ambient) : ambient_(ambient), basis_(0, ambient) {}
    static IntegerLattice from_generators(std::size_t ambient, const IntMat& generators);
    static IntegerLattice span_of(std::size_t ambient, const std::vector<Tuple>& vectors);
    static IntegerLattice full(std::size_t ambient);

    std::size_t ambient() const { return ambient_; }
    std::size_t rank() const { return basis_.rows(); }
    const IntMat& basis() const { return basis_; }

    bool contains(const std::vector<Int>& v) const;
    IntegerLattice intersect(const IntegerLattice& other) const;
    IntegerLattice scaled(const Int& n) const;

    /// All lattice points x with lo <= x <= hi componentwise. Sorted.
    std::vector<Tuple> points_in_box(const std::vector<Int>& lo, const std::vector<Int>& hi) const;

    bool operator==(const IntegerLattice& other) const = default;

private:
    std::size_t ambient_;
    IntMat basis_;  // rank x ambient, canonical row HNF
};

/// Minimal generating set of the monoid H ∩ N^r (its minimal nonzero
/// elements), computed by certified box completion.
std::vector<Tuple> hilbert_basis(const IntegerLattice& h);

/// One cell gamma + (H ∩ N^r).
struct CosetCell {
    Tuple offset;
    IntegerLattice lattice;

    CosetCell(Tuple off, IntegerLattice lat);
    bool contains(const Tuple& t) const;
    bool operator==(const CosetCell& other) const = default;
};

/// Finite union of cells; the canonical answer format for return sets.
class ClassCSet {
public:
    explicit ClassCSet(std::size_t rank) : rank_(rank) {}
    static ClassCSet empty_set(std::size_t rank) { return ClassCSet(rank); }
    static ClassCSet all(std::size_t rank);
    static ClassCSet single_point(const Tuple& t);
    static ClassCSet from_cells(std::size_t rank, std::vector<CosetCell> cells);

    std::size_t rank() const { return rank_; }
    const std::vector<CosetCell>& cells() const { return cells_; }
    bool is_empty() const { return cells_.empty(); }

    bool member(const Tuple& t) const;

    /// Members with 0 <= t_i <= bound_i, sorted and deduplicated.
    std::vector<Tuple> box_enumerate(const std::vector<Int>& bound) const;

    ClassCSet unite(const ClassCSet& other) const;
    ClassCSet intersect(const ClassCSet& other) const;

    /// { drop(t, index) : t in set, t[index] == value }, rank r-1.
    ClassCSet slice(std::size_t index, const Int& value) const;

    /// Translate by a nonnegative delta.
    ClassCSet shifted(const Tuple& delta) const;

    bool operator==(const ClassCSet& other) const = default;

private:
    std::size_t rank_;
    std::vector<CosetCell> cells_;
    void normalize();
};

/// (gamma + H) ∩ N^r as a union of cells beta + (H ∩ N^r), beta running over
/// the minimal elements of the intersection. gamma may have negative entries.
ClassCSet positive_part(const std::vector<Int>& gamma, const IntegerLattice& h);

/// Same denoted set, with every output lattice equal to n*H.
ClassCSet refine_mod(const CosetCell& cell, const Int& n);

/// Minimal elements of (gamma + H) ∩ N^r.
std::vector<Tuple> coset_minimal_elements(const std::vector<Int>& gamma, const IntegerLattice& h);

/// Box-equality of denoted sets up to the given bound.
bool box_equal(const ClassCSet& a, const ClassCSet& b, const std::vector<Int>& bound);

}  // namespace retset
