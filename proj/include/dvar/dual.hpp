#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace dvar {

/// Maximum number of simultaneously seeded directions. The largest variable
/// vocabulary in this project has 6 entries (x, vm, vp, w, t, xi).
inline constexpr int kMaxSeeds = 6;

/// Forward-mode dual scalar: a value plus up to kMaxSeeds first-order
/// partials. Seeding is per-call; there is no global tape. Binary operations
/// broadcast over max(width) with missing partials treated as zero, so
/// constants can be built with width 0.
class Dual {
public:
    Dual() = default;
    Dual(double value) : v_(value) {}
    Dual(double value, int width) : v_(value), n_(width) {}

    static Dual seeded(double value, int width, int direction) {
        Dual d(value, width);
        d.d_[static_cast<std::size_t>(direction)] = 1.0;
        return d;
    }

    double value() const { return v_; }
    int width() const { return n_; }
    double partial(int i) const { return i < n_ ? d_[static_cast<std::size_t>(i)] : 0.0; }
    double& partial_ref(int i) { return d_[static_cast<std::size_t>(i)]; }

    Dual operator-() const {
        Dual r(-v_, n_);
        for (int i = 0; i < n_; ++i) r.d_[i] = -d_[i];
        return r;
    }

    friend Dual operator+(const Dual& a, const Dual& b) {
        Dual r(a.v_ + b.v_, a.n_ > b.n_ ? a.n_ : b.n_);
        for (int i = 0; i < r.n_; ++i) r.d_[i] = a.partial(i) + b.partial(i);
        return r;
    }
    friend Dual operator-(const Dual& a, const Dual& b) {
        Dual r(a.v_ - b.v_, a.n_ > b.n_ ? a.n_ : b.n_);
        for (int i = 0; i < r.n_; ++i) r.d_[i] = a.partial(i) - b.partial(i);
        return r;
    }
    friend Dual operator*(const Dual& a, const Dual& b) {
        Dual r(a.v_ * b.v_, a.n_ > b.n_ ? a.n_ : b.n_);
        for (int i = 0; i < r.n_; ++i) r.d_[i] = a.partial(i) * b.v_ + a.v_ * b.partial(i);
        return r;
    }
    friend Dual operator/(const Dual& a, const Dual& b) {
        Dual r(a.v_ / b.v_, a.n_ > b.n_ ? a.n_ : b.n_);
        const double inv2 = 1.0 / (b.v_ * b.v_);
        for (int i = 0; i < r.n_; ++i)
            r.d_[i] = (a.partial(i) * b.v_ - a.v_ * b.partial(i)) * inv2;
        return r;
    }

    Dual& operator+=(const Dual& b) { *this = *this + b; return *this; }

private:
    double v_ = 0.0;
    std::array<double, kMaxSeeds> d_{};
    int n_ = 0;
};

inline Dual operator*(double c, const Dual& a) { return Dual(c) * a; }
inline Dual operator*(const Dual& a, double c) { return a * Dual(c); }
inline Dual operator+(double c, const Dual& a) { return Dual(c) + a; }
inline Dual operator-(double c, const Dual& a) { return Dual(c) - a; }
inline Dual operator/(const Dual& a, double c) { return a / Dual(c); }

/// Applies a scalar function with known derivative: r = f(u), r' = df * u'.
inline Dual chain(const Dual& u, double f, double df) {
    Dual r(f, u.width());
    for (int i = 0; i < u.width(); ++i) r.partial_ref(i) = df * u.partial(i);
    return r;
}

inline Dual sin(const Dual& u)  { return chain(u, std::sin(u.value()),  std::cos(u.value())); }
inline Dual cos(const Dual& u)  { return chain(u, std::cos(u.value()), -std::sin(u.value())); }
inline Dual tan(const Dual& u)  { const double c = std::cos(u.value()); return chain(u, std::tan(u.value()), 1.0 / (c * c)); }
inline Dual exp(const Dual& u)  { const double e = std::exp(u.value()); return chain(u, e, e); }
inline Dual log(const Dual& u)  { return chain(u, std::log(u.value()), 1.0 / u.value()); }
inline Dual sqrt(const Dual& u) { const double s = std::sqrt(u.value()); return chain(u, s, 0.5 / s); }
inline Dual tanh(const Dual& u) { const double th = std::tanh(u.value()); return chain(u, th, 1.0 - th * th); }

/// Hyper-dual scalar carrying two first-order slots and the mixed
/// second-order slot d12 = d2/(dq1 dq2). The arithmetic is symmetric in the
/// two slots, so swapping seed roles reproduces the mixed partial bitwise.
struct HyperDual {
    double v = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double d12 = 0.0;

    HyperDual() = default;
    HyperDual(double value) : v(value) {}
    HyperDual(double value, double a, double b, double ab) : v(value), d1(a), d2(b), d12(ab) {}

    HyperDual operator-() const { return {-v, -d1, -d2, -d12}; }

    friend HyperDual operator+(const HyperDual& a, const HyperDual& b) {
        return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2, a.d12 + b.d12};
    }
    friend HyperDual operator-(const HyperDual& a, const HyperDual& b) {
        return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2, a.d12 - b.d12};
    }
    friend HyperDual operator*(const HyperDual& a, const HyperDual& b) {
        // d12 is grouped so that swapping the two seed slots commutes terms
        // only inside single sums/products; the result is bitwise symmetric.
        return {a.v * b.v,
                a.d1 * b.v + a.v * b.d1,
                a.d2 * b.v + a.v * b.d2,
                (a.d12 * b.v + a.v * b.d12) + (a.d1 * b.d2 + a.d2 * b.d1)};
    }
    friend HyperDual operator/(const HyperDual& a, const HyperDual& b) {
        return a * inverse(b);
    }

    HyperDual& operator+=(const HyperDual& b) { *this = *this + b; return *this; }

    /// r = f(u) with the second-order chain rule.
    static HyperDual chain(const HyperDual& u, double f, double df, double ddf) {
        return {f, df * u.d1, df * u.d2, ddf * (u.d1 * u.d2) + df * u.d12};
    }

    friend HyperDual inverse(const HyperDual& u) {
        const double iv = 1.0 / u.v;
        return chain(u, iv, -iv * iv, 2.0 * iv * iv * iv);
    }
};

inline HyperDual operator*(double c, const HyperDual& a) { return HyperDual(c) * a; }
inline HyperDual operator*(const HyperDual& a, double c) { return a * HyperDual(c); }

inline HyperDual sin(const HyperDual& u) {
    const double s = std::sin(u.v), c = std::cos(u.v);
    return HyperDual::chain(u, s, c, -s);
}
inline HyperDual cos(const HyperDual& u) {
    const double s = std::sin(u.v), c = std::cos(u.v);
    return HyperDual::chain(u, c, -s, -c);
}
inline HyperDual tan(const HyperDual& u) {
    const double t = std::tan(u.v), sec2 = 1.0 + t * t;
    return HyperDual::chain(u, t, sec2, 2.0 * t * sec2);
}
inline HyperDual exp(const HyperDual& u) {
    const double e = std::exp(u.v);
    return HyperDual::chain(u, e, e, e);
}
inline HyperDual log(const HyperDual& u) {
    const double iv = 1.0 / u.v;
    return HyperDual::chain(u, std::log(u.v), iv, -iv * iv);
}
inline HyperDual sqrt(const HyperDual& u) {
    const double s = std::sqrt(u.v);
    return HyperDual::chain(u, s, 0.5 / s, -0.25 / (s * u.v));
}
inline HyperDual tanh(const HyperDual& u) {
    const double th = std::tanh(u.v), sech2 = 1.0 - th * th;
    return HyperDual::chain(u, th, sech2, -2.0 * th * sech2);
}

inline double scalar_value(double x) { return x; }
inline double scalar_value(const Dual& x) { return x.value(); }
inline double scalar_value(const HyperDual& x) { return x.v; }

} // namespace dvar
