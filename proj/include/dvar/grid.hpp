#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dvar/expr.hpp"

namespace dvar {

/// Uniform time grid t_p = t0 + p*h for p = 0..n. Times are derived, never
/// stored, so the spacing is exactly uniform by construction. n >= 4 is a
/// hard invariant of the whole framework.
class Partition {
public:
    Partition(double t0, double h, int n);

    /// Uniform partition of [a, b] with n steps: h = (b-a)/n, t0 = a.
    static Partition cover(double a, double b, int n);

    double t0() const { return t0_; }
    double h() const { return h_; }
    int n() const { return n_; }
    double time(int p) const { return t0_ + p * h_; }

    /// Left shift: times start at t1, same step and count.
    Partition shifted() const { return Partition(t0_ + h_, h_, n_); }

    friend bool operator==(const Partition& a, const Partition& b) {
        return a.t0_ == b.t0_ && a.h_ == b.h_ && a.n_ == b.n_;
    }

private:
    double t0_;
    double h_;
    int n_;
};

/// Real sequence Q_0..Q_n aligned to a partition.
class GridFn {
public:
    GridFn(Partition partition, std::vector<double> values);

    const Partition& partition() const { return part_; }
    std::span<const double> values() const { return values_; }
    int n() const { return part_.n(); }
    double h() const { return part_.h(); }
    double operator[](int p) const { return values_[static_cast<std::size_t>(p)]; }
    double time(int p) const { return part_.time(p); }

    /// Left shift: values (Q_1, ..., Q_n, 0) on the shifted partition.
    GridFn shifted() const;

    /// CSV with header "p,t,q"; doubles are written shortest-round-trip, so
    /// write/read round-trips bit-exactly.
    void write_csv(std::ostream& out) const;
    void write_csv(const std::string& path) const;
    static GridFn read_csv(std::istream& in);
    static GridFn read_csv(const std::string& path);

private:
    Partition part_;
    std::vector<double> values_;
};

/// Difference-operator output with its valid index range attached: the
/// operators map R^{n+1} to shorter sequences with different offsets, and
/// carrying the range makes off-by-one misuse loud.
class IndexedSeq {
public:
    IndexedSeq(int first, std::vector<double> values);

    int first() const { return first_; }
    int last() const { return first_ + static_cast<int>(values_.size()) - 1; }
    int size() const { return static_cast<int>(values_.size()); }
    std::span<const double> raw() const { return values_; }

    double operator[](int p) const;

private:
    int first_;
    std::vector<double> values_;
};

/// Backward difference: (Q_p - Q_{p-1})/h for p = 1..n.
IndexedSeq delta_minus(const GridFn& q);

/// Forward-difference operator with the sign convention (Q_p - Q_{p+1})/h
/// for p = 0..n-1; its negation is the usual forward Euler quotient.
IndexedSeq delta_plus(const GridFn& q);

/// Centered second difference (Q_{p+1} - 2 Q_p + Q_{p-1})/h^2 for
/// p = 1..n-1; equals applying delta_minus then the negated delta_plus.
IndexedSeq second_diff(const GridFn& q);

enum class BoundaryClass {
    Free,
    Zero1, // W_0 = W_n = 0
    Zero2, // W_0 = W_1 = W_{n-1} = W_n = 0
};

bool in_boundary_class(const GridFn& w, BoundaryClass c);

} // namespace dvar
