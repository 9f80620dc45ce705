#include "retset/classc.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace retset {

namespace {

Int tuple_total(const Tuple& t) {
    Int s = 0;
    for (const Int& x : t) s += x;
    return s;
}

bool tuple_nonneg(const std::vector<Int>& t) {
    for (const Int& x : t)
        if (x < 0) return false;
    return true;
}

// ceil(a/b), b > 0
Int div_ceil(const Int& a, const Int& b) {
    Int q;
    mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}
// floor(a/b), b > 0
Int div_floor(const Int& a, const Int& b) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

constexpr std::size_t kEnumerationCap = 6'000'000;

}  // namespace

bool tuple_leq(const Tuple& a, const Tuple& b) {
    if (a.size() != b.size()) throw std::invalid_argument("tuple_leq: dimension mismatch");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

std::vector<Tuple> sorted_unique(std::vector<Tuple> s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

std::vector<Tuple> minimal_elements(const std::vector<Tuple>& s) {
    // Sort by total degree so any strict dominator of a point comes later;
    // scanning against the running minima is then sufficient.
    std::vector<Tuple> pts = sorted_unique(s);
    std::stable_sort(pts.begin(), pts.end(), [](const Tuple& a, const Tuple& b) {
        return tuple_total(a) < tuple_total(b);
    });
    std::vector<Tuple> mins;
    for (const Tuple& p : pts) {
        bool dominated = false;
        for (const Tuple& m : mins)
            if (tuple_leq(m, p)) {
                dominated = true;
                break;
            }
        if (!dominated) mins.push_back(p);
    }
    return sorted_unique(std::move(mins));
}

IntegerLattice IntegerLattice::from_generators(std::size_t ambient, const IntMat& generators) {
    if (generators.rows() > 0 && generators.cols() != ambient)
        throw std::invalid_argument("IntegerLattice: generator width != ambient rank");
    IntegerLattice l(ambient);
    l.basis_ = row_hnf(generators);
    return l;
}

IntegerLattice IntegerLattice::span_of(std::size_t ambient, const std::vector<Tuple>& vectors) {
    IntMat g(0, ambient);
    for (const Tuple& v : vectors) {
        if (v.size() != ambient) throw std::invalid_argument("IntegerLattice::span_of: bad vector");
        g.append_row(v);
    }
    return from_generators(ambient, g);
}

IntegerLattice IntegerLattice::full(std::size_t ambient) {
    return from_generators(ambient, IntMat::identity(ambient));
}

bool IntegerLattice::contains(const std::vector<Int>& v) const {
    if (v.size() != ambient_) throw std::invalid_argument("IntegerLattice::contains: bad vector");
    std::vector<Int> c = v;
    for (std::size_t i = 0; i < basis_.rows(); ++i) {
        std::size_t p = 0;
        while (p < ambient_ && basis_.at(i, p) == 0) ++p;
        Int q, r;
        mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), c[p].get_mpz_t(), basis_.at(i, p).get_mpz_t());
        if (r != 0) return false;
        if (q != 0)
            for (std::size_t j = p; j < ambient_; ++j) c[j] -= q * basis_.at(i, j);
    }
    for (const Int& x : c)
        if (x != 0) return false;
    return true;
}

IntegerLattice IntegerLattice::intersect(const IntegerLattice& other) const {
    if (ambient_ != other.ambient_)
        throw std::invalid_argument("IntegerLattice::intersect: ambient mismatch");
    const std::size_t k1 = rank(), k2 = other.rank();
    IntMat stacked(k1 + k2, ambient_);
    for (std::size_t i = 0; i < k1; ++i)
        for (std::size_t j = 0; j < ambient_; ++j) stacked.at(i, j) = basis_.at(i, j);
    for (std::size_t i = 0; i < k2; ++i)
        for (std::size_t j = 0; j < ambient_; ++j) stacked.at(k1 + i, j) = -other.basis_.at(i, j);
    // Left-kernel rows (a, b) satisfy a*B1 = b*B2; those common values span the
    // intersection.
    IntMat lk = kernel_basis(stacked.transpose());
    IntMat gens(0, ambient_);
    for (std::size_t i = 0; i < lk.rows(); ++i) {
        std::vector<Int> v(ambient_, Int(0));
        for (std::size_t s = 0; s < k1; ++s)
            for (std::size_t j = 0; j < ambient_; ++j) v[j] += lk.at(i, s) * basis_.at(s, j);
        gens.append_row(v);
    }
    return from_generators(ambient_, gens);
}

IntegerLattice IntegerLattice::scaled(const Int& n) const {
    if (n <= 0) throw std::invalid_argument("IntegerLattice::scaled: n must be positive");
    IntMat b = basis_;
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) b.at(i, j) *= n;
    return from_generators(ambient_, b);
}

std::vector<Tuple> IntegerLattice::points_in_box(const std::vector<Int>& lo,
                                                 const std::vector<Int>& hi) const {
    if (lo.size() != ambient_ || hi.size() != ambient_)
        throw std::invalid_argument("points_in_box: bound size mismatch");
    for (std::size_t j = 0; j < ambient_; ++j)
        if (lo[j] > hi[j]) return {};

    const std::size_t k = rank();
    std::vector<std::size_t> pivot(k);
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t p = 0;
        while (p < ambient_ && basis_.at(i, p) == 0) ++p;
        pivot[i] = p;
    }

    std::vector<Tuple> out;
    std::vector<Int> x(ambient_, Int(0));
    // Columns strictly left of pivot[level] are final once rows < level are
    // summed; range-check them as they freeze, then branch on the pivot.
    auto rec = [&](auto&& self, std::size_t level, std::size_t checked) -> void {
        std::size_t freeze = (level < k) ? pivot[level] : ambient_;
        for (std::size_t c = checked; c < freeze; ++c)
            if (x[c] < lo[c] || x[c] > hi[c]) return;
        if (level == k) {
            if (out.size() >= kEnumerationCap)
                throw std::length_error("points_in_box: enumeration too large");
            out.push_back(x);
            return;
        }
        const Int& piv = basis_.at(level, pivot[level]);
        Int ymin = div_ceil(lo[pivot[level]] - x[pivot[level]], piv);
        Int ymax = div_floor(hi[pivot[level]] - x[pivot[level]], piv);
        for (Int y = ymin; y <= ymax; ++y) {
            for (std::size_t j = pivot[level]; j < ambient_; ++j)
                x[j] += y * basis_.at(level, j);
            self(self, level + 1, freeze);
            for (std::size_t j = pivot[level]; j < ambient_; ++j)
                x[j] -= y * basis_.at(level, j);
        }
    };
    rec(rec, 0, 0);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

// Reduce gamma modulo the lattice so pivot coordinates land in [0, pivot).
std::vector<Int> reduce_offset(const std::vector<Int>& gamma, const IntegerLattice& h) {
    std::vector<Int> g = gamma;
    const IntMat& b = h.basis();
    for (std::size_t i = 0; i < b.rows(); ++i) {
        std::size_t p = 0;
        while (p < h.ambient() && b.at(i, p) == 0) ++p;
        Int q = div_floor(g[p], b.at(i, p));
        if (q != 0)
            for (std::size_t j = p; j < h.ambient(); ++j) g[j] -= q * b.at(i, j);
    }
    return g;
}

std::vector<Tuple> coset_points_in_box(const std::vector<Int>& gamma, const IntegerLattice& h,
                                       const Int& bound) {
    const std::size_t r = h.ambient();
    std::vector<Int> lo(r), hi(r);
    for (std::size_t j = 0; j < r; ++j) {
        lo[j] = -gamma[j];
        hi[j] = bound - gamma[j];
    }
    std::vector<Tuple> pts = h.points_in_box(lo, hi);
    for (Tuple& z : pts)
        for (std::size_t j = 0; j < r; ++j) z[j] += gamma[j];
    return pts;
}

// Every enumerated monoid point must be an N-combination of the candidates.
bool all_generated(const std::vector<Tuple>& points, const std::vector<Tuple>& cands) {
    std::vector<Tuple> pts = points;
    std::stable_sort(pts.begin(), pts.end(), [](const Tuple& a, const Tuple& b) {
        return tuple_total(a) < tuple_total(b);
    });
    std::map<Tuple, bool> gen;
    for (const Tuple& z : pts) {
        if (tuple_total(z) == 0) {
            gen[z] = true;
            continue;
        }
        bool ok = false;
        for (const Tuple& c : cands) {
            if (!tuple_leq(c, z)) continue;
            Tuple rest(z.size());
            for (std::size_t j = 0; j < z.size(); ++j) rest[j] = z[j] - c[j];
            auto it = gen.find(rest);
            if (it != gen.end() && it->second) {
                ok = true;
                break;
            }
        }
        gen[z] = ok;
        if (!ok) return false;
    }
    return true;
}

}  // namespace

std::vector<Tuple> hilbert_basis(const IntegerLattice& h) {
    const std::size_t r = h.ambient();
    const std::size_t k = h.rank();
    if (k == 0) return {};
    if (k == 1) {
        Tuple v = h.basis().row(0);
        Tuple neg(r);
        for (std::size_t j = 0; j < r; ++j) neg[j] = -v[j];
        if (tuple_nonneg(v)) return {v};
        if (tuple_nonneg(neg)) return {neg};
        return {};
    }
    Int b = 4;
    if (2 * h.basis().max_abs() > b) b = 2 * h.basis().max_abs();
    while (true) {
        std::vector<Int> lo(r, Int(0)), hi(r, b);
        std::vector<Tuple> pts = h.points_in_box(lo, hi);
        std::vector<Tuple> nonzero;
        for (const Tuple& z : pts)
            if (tuple_total(z) != 0) nonzero.push_back(z);
        std::vector<Tuple> cands = minimal_elements(nonzero);
        Int cmax = 0;
        for (const Tuple& c : cands)
            for (const Int& x : c)
                if (x > cmax) cmax = x;
        if (b > 2 * cmax && all_generated(pts, cands)) return cands;
        b *= 2;
    }
}

std::vector<Tuple> coset_minimal_elements(const std::vector<Int>& gamma, const IntegerLattice& h) {
    const std::size_t r = h.ambient();
    if (gamma.size() != r) throw std::invalid_argument("coset_minimal_elements: size mismatch");
    std::vector<Int> g = reduce_offset(gamma, h);
    const std::size_t k = h.rank();
    if (k == 0) {
        if (tuple_nonneg(g)) return {g};
        return {};
    }
    if (k == 1) {
        // One-parameter family g + t*v: exact integer range analysis.
        Tuple v = h.basis().row(0);
        bool has_pos = false, has_neg = false;
        Int tlo, thi;
        bool lo_set = false, hi_set = false;
        for (std::size_t j = 0; j < r; ++j) {
            if (v[j] > 0) {
                has_pos = true;
                Int t = div_ceil(-g[j], v[j]);
                if (!lo_set || t > tlo) tlo = t, lo_set = true;
            } else if (v[j] < 0) {
                has_neg = true;
                Int t = div_floor(g[j], -v[j]);
                if (!hi_set || t < thi) thi = t, hi_set = true;
            } else if (g[j] < 0) {
                return {};
            }
        }
        auto point_at = [&](const Int& t) {
            Tuple x(r);
            for (std::size_t j = 0; j < r; ++j) x[j] = g[j] + t * v[j];
            return x;
        };
        if (has_pos && has_neg) {
            if (tlo > thi) return {};
            std::vector<Tuple> all;
            for (Int t = tlo; t <= thi; ++t) all.push_back(point_at(t));
            return minimal_elements(all);  // mixed direction: pairwise incomparable
        }
        if (has_pos) return {point_at(tlo)};
        if (has_neg) return {point_at(thi)};
        return tuple_nonneg(g) ? std::vector<Tuple>{g} : std::vector<Tuple>{};
    }

    // General rank: grow the search box until the minimal set is stable and
    // comfortably inside it. The box [0,b]^r is downward closed, so the
    // minima found are always true minima; growth only adds missing ones.
    Int gmax = 0;
    for (const Int& x : g) {
        Int ax = abs(x);
        if (ax > gmax) gmax = ax;
    }
    Int b = 4;
    if (2 * gmax > b) b = 2 * gmax;
    if (2 * h.basis().max_abs() > b) b = 2 * h.basis().max_abs();
    Int far_cap = 2 * (1 + gmax) * (1 + Int(static_cast<long>(k)) * h.basis().max_abs());
    std::vector<Tuple> prev = minimal_elements(coset_points_in_box(g, h, b));
    while (true) {
        Int b2 = b * 2;
        std::vector<Tuple> next = minimal_elements(coset_points_in_box(g, h, b2));
        if (prev == next) {
            if (!next.empty()) {
                Int cmax = 0;
                for (const Tuple& c : next)
                    for (const Int& x : c)
                        if (x > cmax) cmax = x;
                if (b >= 2 * cmax) return next;
            } else if (b >= far_cap) {
                return {};
            }
        }
        prev = std::move(next);
        b = b2;
    }
}

CosetCell::CosetCell(Tuple off, IntegerLattice lat) : offset(std::move(off)), lattice(std::move(lat)) {
    if (offset.size() != lattice.ambient())
        throw std::invalid_argument("CosetCell: offset size != ambient rank");
    if (!tuple_nonneg(offset)) throw std::invalid_argument("CosetCell: negative offset");
}

bool CosetCell::contains(const Tuple& t) const {
    if (t.size() != offset.size()) throw std::invalid_argument("CosetCell::contains: bad tuple");
    std::vector<Int> d(t.size());
    for (std::size_t j = 0; j < t.size(); ++j) {
        d[j] = t[j] - offset[j];
        if (d[j] < 0) return false;
    }
    return lattice.contains(d);
}

ClassCSet ClassCSet::all(std::size_t rank) {
    return from_cells(rank, {CosetCell(Tuple(rank, Int(0)), IntegerLattice::full(rank))});
}

ClassCSet ClassCSet::single_point(const Tuple& t) {
    return from_cells(t.size(), {CosetCell(t, IntegerLattice(t.size()))});
}

ClassCSet ClassCSet::from_cells(std::size_t rank, std::vector<CosetCell> cells) {
    for (const CosetCell& c : cells)
        if (c.offset.size() != rank) throw std::invalid_argument("ClassCSet: cell rank mismatch");
    ClassCSet s(rank);
    s.cells_ = std::move(cells);
    s.normalize();
    return s;
}

void ClassCSet::normalize() {
    auto cell_less = [](const CosetCell& a, const CosetCell& b) {
        if (a.offset != b.offset) return a.offset < b.offset;
        if (a.lattice.rank() != b.lattice.rank()) return a.lattice.rank() < b.lattice.rank();
        for (std::size_t i = 0; i < a.lattice.rank(); ++i) {
            auto ra = a.lattice.basis().row(i), rb = b.lattice.basis().row(i);
            if (ra != rb) return ra < rb;
        }
        return false;
    };
    std::sort(cells_.begin(), cells_.end(), cell_less);
    cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
    // Prune any cell provably contained in a distinct sibling with the same
    // lattice (offset difference nonnegative and in the lattice). Containment
    // between distinct cells is antisymmetric, so pruning all of them at once
    // is sound.
    std::vector<bool> dead(cells_.size(), false);
    for (std::size_t i = 0; i < cells_.size(); ++i)
        for (std::size_t j = 0; j < cells_.size(); ++j) {
            if (i == j) continue;
            if (cells_[i].lattice == cells_[j].lattice && cells_[i].offset != cells_[j].offset &&
                cells_[j].contains(cells_[i].offset)) {
                dead[i] = true;
                break;
            }
        }
    std::vector<CosetCell> kept;
    for (std::size_t i = 0; i < cells_.size(); ++i)
        if (!dead[i]) kept.push_back(cells_[i]);
    cells_ = std::move(kept);
}

bool ClassCSet::member(const Tuple& t) const {
    if (t.size() != rank_) throw std::invalid_argument("ClassCSet::member: rank mismatch");
    for (const CosetCell& c : cells_)
        if (c.contains(t)) return true;
    return false;
}

std::vector<Tuple> ClassCSet::box_enumerate(const std::vector<Int>& bound) const {
    if (bound.size() != rank_) throw std::invalid_argument("box_enumerate: bound size mismatch");
    std::vector<Tuple> out;
    for (const CosetCell& c : cells_) {
        std::vector<Int> lo(rank_, Int(0)), hi(rank_);
        bool feasible = true;
        for (std::size_t j = 0; j < rank_; ++j) {
            hi[j] = bound[j] - c.offset[j];
            if (hi[j] < 0) {
                feasible = false;
                break;
            }
        }
        if (!feasible) continue;
        for (Tuple z : c.lattice.points_in_box(lo, hi)) {
            for (std::size_t j = 0; j < rank_; ++j) z[j] += c.offset[j];
            out.push_back(std::move(z));
        }
    }
    return sorted_unique(std::move(out));
}

ClassCSet ClassCSet::unite(const ClassCSet& other) const {
    if (rank_ != other.rank_) throw std::invalid_argument("unite: rank mismatch");
    std::vector<CosetCell> cells = cells_;
    cells.insert(cells.end(), other.cells_.begin(), other.cells_.end());
    return from_cells(rank_, std::move(cells));
}

ClassCSet ClassCSet::intersect(const ClassCSet& other) const {
    if (rank_ != other.rank_) throw std::invalid_argument("intersect: rank mismatch");
    std::vector<CosetCell> out;
    for (const CosetCell& a : cells_) {
        for (const CosetCell& b : other.cells_) {
            IntegerLattice h = a.lattice.intersect(b.lattice);
            const std::size_t k1 = a.lattice.rank(), k2 = b.lattice.rank();
            IntMat stacked(k1 + k2, rank_);
            for (std::size_t i = 0; i < k1; ++i)
                for (std::size_t j = 0; j < rank_; ++j) stacked.at(i, j) = a.lattice.basis().at(i, j);
            for (std::size_t i = 0; i < k2; ++i)
                for (std::size_t j = 0; j < rank_; ++j)
                    stacked.at(k1 + i, j) = -b.lattice.basis().at(i, j);
            std::vector<Int> target(rank_);
            for (std::size_t j = 0; j < rank_; ++j) target[j] = b.offset[j] - a.offset[j];
            auto sol = solve_left(stacked, target);
            if (!sol) continue;  // the lattice cosets are disjoint
            std::vector<Int> delta(rank_);
            for (std::size_t j = 0; j < rank_; ++j) {
                delta[j] = a.offset[j];
                for (std::size_t i = 0; i < k1; ++i) delta[j] += (*sol)[i] * a.lattice.basis().at(i, j);
            }
            Tuple gmax(rank_);
            for (std::size_t j = 0; j < rank_; ++j) gmax[j] = std::max(a.offset[j], b.offset[j]);
            std::vector<Int> shifted(rank_);
            for (std::size_t j = 0; j < rank_; ++j) shifted[j] = delta[j] - gmax[j];
            for (const CosetCell& cell : positive_part(shifted, h).cells()) {
                Tuple off(rank_);
                for (std::size_t j = 0; j < rank_; ++j) off[j] = gmax[j] + cell.offset[j];
                out.emplace_back(off, cell.lattice);
            }
        }
    }
    return from_cells(rank_, std::move(out));
}

ClassCSet ClassCSet::slice(std::size_t index, const Int& value) const {
    if (index >= rank_) throw std::out_of_range("slice: coordinate index out of range");
    if (value < 0) throw std::invalid_argument("slice: negative value");
    std::vector<CosetCell> out;
    for (const CosetCell& c : cells_) {
        Int a = value - c.offset[index];
        if (a < 0) continue;
        const IntMat& b = c.lattice.basis();
        const std::size_t k = b.rows();
        // Solve (y B)[index] = a, then take the sublattice with zero there.
        IntMat column(k, 1);
        for (std::size_t i = 0; i < k; ++i) column.at(i, 0) = b.at(i, index);
        auto y0 = solve_left(column, {a});
        if (!y0) continue;
        std::vector<Int> delta(rank_, Int(0));
        for (std::size_t j = 0; j < rank_; ++j)
            for (std::size_t i = 0; i < k; ++i) delta[j] += (*y0)[i] * b.at(i, j);
        IntMat ker = kernel_basis(column.transpose());  // rows y with y.column = 0
        IntMat h0(0, rank_);
        for (std::size_t i = 0; i < ker.rows(); ++i) {
            std::vector<Int> v(rank_, Int(0));
            for (std::size_t s = 0; s < k; ++s)
                for (std::size_t j = 0; j < rank_; ++j) v[j] += ker.at(i, s) * b.at(s, j);
            h0.append_row(v);
        }
        IntegerLattice slab = IntegerLattice::from_generators(rank_, h0);
        for (const CosetCell& part : positive_part(delta, slab).cells()) {
            Tuple off;
            IntMat proj(0, rank_ - 1);
            for (std::size_t j = 0; j < rank_; ++j)
                if (j != index) off.push_back(c.offset[j] + part.offset[j]);
            for (std::size_t i = 0; i < part.lattice.rank(); ++i) {
                std::vector<Int> v;
                for (std::size_t j = 0; j < rank_; ++j)
                    if (j != index) v.push_back(part.lattice.basis().at(i, j));
                proj.append_row(v);
            }
            out.emplace_back(off, IntegerLattice::from_generators(rank_ - 1, proj));
        }
    }
    return from_cells(rank_ - 1, std::move(out));
}

ClassCSet ClassCSet::shifted(const Tuple& delta) const {
    if (delta.size() != rank_) throw std::invalid_argument("shifted: rank mismatch");
    if (!tuple_nonneg(delta)) throw std::invalid_argument("shifted: negative delta");
    std::vector<CosetCell> out;
    for (const CosetCell& c : cells_) {
        Tuple off(rank_);
        for (std::size_t j = 0; j < rank_; ++j) off[j] = c.offset[j] + delta[j];
        out.emplace_back(off, c.lattice);
    }
    return from_cells(rank_, std::move(out));
}

ClassCSet positive_part(const std::vector<Int>& gamma, const IntegerLattice& h) {
    std::vector<CosetCell> cells;
    for (const Tuple& m : coset_minimal_elements(gamma, h)) cells.emplace_back(m, h);
    return ClassCSet::from_cells(h.ambient(), std::move(cells));
}

ClassCSet refine_mod(const CosetCell& cell, const Int& n) {
    if (n < 1) throw std::invalid_argument("refine_mod: n must be >= 1");
    const std::size_t r = cell.lattice.ambient();
    const std::size_t k = cell.lattice.rank();
    IntegerLattice scaled = cell.lattice.scaled(n);
    // Representatives of H/nH are the [0,n)^k combinations of the basis.
    std::vector<CosetCell> out;
    std::vector<Int> coeff(k, Int(0));
    auto rec = [&](auto&& self, std::size_t level) -> void {
        if (level == k) {
            std::vector<Int> tau(r, Int(0));
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < r; ++j) tau[j] += coeff[i] * cell.lattice.basis().at(i, j);
            for (const CosetCell& part : positive_part(tau, scaled).cells()) {
                Tuple off(r);
                for (std::size_t j = 0; j < r; ++j) off[j] = cell.offset[j] + part.offset[j];
                out.emplace_back(off, part.lattice);
            }
            return;
        }
        for (Int c = 0; c < n; ++c) {
            coeff[level] = c;
            self(self, level + 1);
        }
    };
    rec(rec, 0);
    return ClassCSet::from_cells(r, std::move(out));
}

bool box_equal(const ClassCSet& a, const ClassCSet& b, const std::vector<Int>& bound) {
    return a.box_enumerate(bound) == b.box_enumerate(bound);
}

}  // namespace retset
