#pragma once

#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "heavenly/ring_element.hpp"

namespace heavenly {

/// Bigrading key: t-power m and hbar-power k.
struct Grade {
    int m = 0;
    int k = 0;
    friend bool operator<(const Grade& a, const Grade& b) {
        return a.m != b.m ? a.m < b.m : a.k < b.k;
    }
    friend bool operator==(const Grade& a, const Grade& b) { return a.m == b.m && a.k == b.k; }
};

/// Moyal star product on the 2-dimensional phase space (q,p):
///   Delta_n(f,g) = (1/n!)(i/2)^n sum_j C(n,j)(-1)^j d_q^{n-j}d_p^j f * d_p^{n-j}d_q^j g.
/// The sum terminates on polynomial phase dependence, so exact-mode
/// arithmetic is closed.
struct MoyalProduct {
    template <class S>
    static RingElement<S> delta(int n, const RingElement<S>& f, const RingElement<S>& g) {
        using T = scalar_traits<S>;
        if (n == 0) return f * g;
        // (i/2)^n / n!
        S pref = T::one();
        for (int j = 0; j < n; ++j) pref *= T::i() * T::from_ratio(1, 2);
        for (int j = 2; j <= n; ++j) pref *= T::from_ratio(1, j);
        RingElement<S> acc;
        S binom = T::one();
        for (int j = 0; j <= n; ++j) {
            RingElement<S> df = f, dg = g;
            for (int a = 0; a < n - j; ++a) df = df.derivative(VQ);
            for (int a = 0; a < j; ++a) df = df.derivative(VP);
            for (int a = 0; a < n - j; ++a) dg = dg.derivative(VP);
            for (int a = 0; a < j; ++a) dg = dg.derivative(VQ);
            S sign = (j % 2 == 0) ? binom : -binom;
            acc += (df * dg).scaled(sign);
            binom *= T::from_ratio(n - j, j + 1);
        }
        return acc.scaled(pref);
    }

    template <class S>
    static int max_order(const RingElement<S>& f, const RingElement<S>& g) {
        return std::min(f.degree_in({VQ, VP}), g.degree_in({VQ, VP}));
    }
};

/// Element of the bigraded formal star-algebra: a finite map
/// (m,k) -> coefficient with 0 <= m <= t_max and -m <= k <= k_max.
template <class S>
class GradedSeries {
  public:
    using Coeff = RingElement<S>;
    using Terms = std::map<Grade, Coeff>;

    GradedSeries() = default;
    GradedSeries(int t_max, int k_max) : t_max_(t_max), k_max_(k_max) {}

    static GradedSeries unit(int t_max, int k_max) {
        GradedSeries s(t_max, k_max);
        s.set({0, 0}, Coeff::one());
        return s;
    }

    int t_max() const { return t_max_; }
    int k_max() const { return k_max_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool degraded() const { return degraded_; }
    void mark_degraded() { degraded_ = true; }

    Coeff at(Grade g) const {
        auto it = terms_.find(g);
        return it == terms_.end() ? Coeff::zero() : it->second;
    }

    /// Insert/accumulate respecting the grading constraint and the k_max
    /// storage ceiling.
    void add(Grade g, const Coeff& c) {
        if (c.is_zero()) return;
        if (g.m < 0 || g.m > t_max_) return;  // t-truncation
        if (g.k < -g.m) throw GradingViolation("term below the k >= -m grading line");
        if (g.k > k_max_) {
            degraded_ = true;  // storage ceiling, not a mathematical truncation
            return;
        }
        auto [it, inserted] = terms_.emplace(g, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    void set(Grade g, const Coeff& c) {
        terms_.erase(g);
        add(g, c);
    }

    friend bool operator==(const GradedSeries& a, const GradedSeries& b) {
        return a.t_max_ == b.t_max_ && a.k_max_ == b.k_max_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const GradedSeries& a, const GradedSeries& b) { return !(a == b); }

    friend GradedSeries operator+(const GradedSeries& a, const GradedSeries& b) {
        check_compatible(a, b);
        GradedSeries r = a;
        r.degraded_ = a.degraded_ || b.degraded_;
        for (auto& [g, c] : b.terms_) r.add(g, c);
        return r;
    }
    friend GradedSeries operator-(const GradedSeries& a, const GradedSeries& b) {
        check_compatible(a, b);
        GradedSeries r = a;
        r.degraded_ = a.degraded_ || b.degraded_;
        for (auto& [g, c] : b.terms_) r.add(g, -c);
        return r;
    }
    friend GradedSeries operator-(const GradedSeries& a) {
        GradedSeries r(a.t_max_, a.k_max_);
        r.degraded_ = a.degraded_;
        for (auto& [g, c] : a.terms_) r.terms_[g] = -c;
        return r;
    }
    GradedSeries& operator+=(const GradedSeries& o) { return *this = *this + o; }
    GradedSeries& operator-=(const GradedSeries& o) { return *this = *this - o; }

    GradedSeries scaled(const S& c) const {
        GradedSeries r(t_max_, k_max_);
        r.degraded_ = degraded_;
        if (scalar_traits<S>::is_zero(c)) return r;
        for (auto& [g, cc] : terms_) {
            auto v = cc.scaled(c);
            if (!v.is_zero()) r.terms_[g] = v;
        }
        return r;
    }

    /// Multiply every coefficient by a phase-free ring element (pointwise;
    /// equals the star product for base-only factors).
    GradedSeries ring_scaled(const Coeff& r0) const {
        GradedSeries r(t_max_, k_max_);
        r.degraded_ = degraded_;
        for (auto& [g, cc] : terms_) {
            auto v = cc * r0;
            if (!v.is_zero()) r.terms_[g] = v;
        }
        return r;
    }

    /// Shift grading by t^dm hbar^dk (truncating in m, guarding k).
    GradedSeries shifted(int dm, int dk) const {
        GradedSeries r(t_max_, k_max_);
        r.degraded_ = degraded_;
        for (auto& [g, c] : terms_) r.add({g.m + dm, g.k + dk}, c);
        return r;
    }

    GradedSeries derivative(Var v) const {
        GradedSeries r(t_max_, k_max_);
        r.degraded_ = degraded_;
        for (auto& [g, c] : terms_) {
            auto d = c.derivative(v);
            if (!d.is_zero()) r.terms_[g] = d;
        }
        return r;
    }

    GradedSeries truncated(int new_t_max) const {
        GradedSeries r(new_t_max, k_max_);
        r.degraded_ = degraded_;
        for (auto& [g, c] : terms_)
            if (g.m <= new_t_max) r.terms_[g] = c;
        return r;
    }

    /// Re-home the series to new truncation parameters (used to align
    /// operands produced with different defaults).
    GradedSeries rehomed(int new_t_max, int new_k_max) const {
        GradedSeries r(new_t_max, new_k_max);
        for (auto& [g, c] : terms_) r.add(g, c);
        r.degraded_ = degraded_;
        return r;
    }

    double max_abs() const {
        double m = 0.0;
        for (auto& [g, c] : terms_) m = std::max(m, c.max_abs());
        return m;
    }

    GradedSeries chopped(double eps) const {
        GradedSeries r(t_max_, k_max_);
        r.degraded_ = degraded_;
        for (auto& [g, c] : terms_) {
            auto v = c.chopped(eps);
            if (!v.is_zero()) r.terms_[g] = v;
        }
        return r;
    }

    template <class T, class Fn>
    GradedSeries<T> map_scalars(Fn&& fn) const {
        GradedSeries<T> r(t_max_, k_max_);
        for (auto& [g, c] : terms_) {
            auto v = c.template map_scalars<T>(fn);
            if (!v.is_zero()) r.set(g, v);
        }
        return r;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::string s;
        for (auto& [g, c] : terms_) {
            if (!s.empty()) s += "  +  ";
            s += "t^" + std::to_string(g.m) + " h^" + std::to_string(g.k) + " [" + c.str() + "]";
        }
        return s;
    }

    static void check_compatible(const GradedSeries& a, const GradedSeries& b) {
        if (a.t_max_ != b.t_max_ || a.k_max_ != b.k_max_)
            throw TruncationMismatch("series truncation parameters differ");
    }

  private:
    Terms terms_;
    int t_max_ = 0;
    int k_max_ = 0;
    bool degraded_ = false;
};

// ---------------------------------------------------------------------------
// Star-algebra operations
// ---------------------------------------------------------------------------

template <class S, class Product = MoyalProduct>
GradedSeries<S> star_multiply(const GradedSeries<S>& a, const GradedSeries<S>& b) {
    GradedSeries<S>::check_compatible(a, b);
    GradedSeries<S> r(a.t_max(), a.k_max());
    if (a.degraded() || b.degraded()) r.mark_degraded();
    for (auto& [g1, c1] : a.terms()) {
        for (auto& [g2, c2] : b.terms()) {
            int m = g1.m + g2.m;
            if (m > a.t_max()) continue;
            int nmax = Product::max_order(c1, c2);
            for (int n = 0; n <= nmax; ++n) {
                auto d = Product::delta(n, c1, c2);
                if (!d.is_zero()) r.add({m, g1.k + g2.k + n}, d);
            }
        }
    }
    return r;
}

template <class S>
GradedSeries<S> free_element(const GradedSeries<S>& a) {
    GradedSeries<S> r(a.t_max(), a.k_max());
    for (auto& [g, c] : a.terms())
        if (g.m == 0) r.set(g, c);
    return r;
}

template <class S>
bool is_unit_free_element(const GradedSeries<S>& a) {
    auto f = free_element(a);
    return f == GradedSeries<S>::unit(a.t_max(), a.k_max());
}

/// Star-commutator divided by i*hbar: {a,b} = (1/ih)(a*b - b*a).
/// Computed by antisymmetrizing the bidifferentials; the n = 0 layer
/// cancels identically, so the hbar shift stays inside the grading.
template <class S, class Product = MoyalProduct>
GradedSeries<S> star_bracket(const GradedSeries<S>& a, const GradedSeries<S>& b) {
    GradedSeries<S>::check_compatible(a, b);
    GradedSeries<S> r(a.t_max(), a.k_max());
    if (a.degraded() || b.degraded()) r.mark_degraded();
    const S inv_i = -scalar_traits<S>::i();
    for (auto& [g1, c1] : a.terms()) {
        for (auto& [g2, c2] : b.terms()) {
            int m = g1.m + g2.m;
            if (m > a.t_max()) continue;
            int nmax = Product::max_order(c1, c2);
            for (int n = 1; n <= nmax; ++n) {
                auto d = Product::delta(n, c1, c2) - Product::delta(n, c2, c1);
                if (!d.is_zero()) r.add({m, g1.k + g2.k + n - 1}, d.scaled(inv_i));
            }
        }
    }
    return r;
}

template <class S>
RingElement<S> poisson_bracket(const RingElement<S>& f, const RingElement<S>& g) {
    return f.derivative(VQ) * g.derivative(VP) - f.derivative(VP) * g.derivative(VQ);
}

template <class S>
S factorial_scalar(int n) {
    S f = scalar_traits<S>::one();
    for (int j = 2; j <= n; ++j) f *= scalar_traits<S>::from_int(j);
    return f;
}

template <class S, class Product = MoyalProduct>
GradedSeries<S> series_exp(const GradedSeries<S>& a) {
    if (!free_element(a).is_zero()) throw NotInAlgebraQ("series_exp: free element must vanish");
    auto r = GradedSeries<S>::unit(a.t_max(), a.k_max());
    auto power = GradedSeries<S>::unit(a.t_max(), a.k_max());
    // {A^n} is t-locally finite: A^n vanishes past n = t_max
    for (int n = 1; n <= a.t_max(); ++n) {
        power = star_multiply<S, Product>(power, a);
        r += power.scaled(scalar_traits<S>::one() / factorial_scalar<S>(n));
    }
    return r;
}

template <class S, class Product = MoyalProduct>
GradedSeries<S> series_log(const GradedSeries<S>& a) {
    if (!is_unit_free_element(a)) throw NotInGroup("series_log: free element must equal 1");
    auto x = a - GradedSeries<S>::unit(a.t_max(), a.k_max());
    GradedSeries<S> r(a.t_max(), a.k_max());
    auto power = GradedSeries<S>::unit(a.t_max(), a.k_max());
    for (int n = 1; n <= a.t_max(); ++n) {
        power = star_multiply<S, Product>(power, x);
        S c = scalar_traits<S>::from_ratio(n % 2 == 1 ? 1 : -1, n);
        r += power.scaled(c);
    }
    return r;
}

template <class S, class Product = MoyalProduct>
GradedSeries<S> series_inverse(const GradedSeries<S>& a) {
    if (!is_unit_free_element(a)) throw NotInGroup("series_inverse: free element must equal 1");
    auto x = a - GradedSeries<S>::unit(a.t_max(), a.k_max());
    auto r = GradedSeries<S>::unit(a.t_max(), a.k_max());
    auto power = GradedSeries<S>::unit(a.t_max(), a.k_max());
    for (int n = 1; n <= a.t_max(); ++n) {
        power = star_multiply<S, Product>(power, x);
        r += power.scaled(scalar_traits<S>::from_int(n % 2 == 0 ? 1 : -1));
    }
    return r;
}

/// Ad(a) f = a * f * a^{-1}.
template <class S, class Product = MoyalProduct>
GradedSeries<S> adjoint_action(const GradedSeries<S>& a, const GradedSeries<S>& f) {
    if (!is_unit_free_element(a)) throw NotInGroup("adjoint_action: a must lie in the group");
    return star_multiply<S, Product>(star_multiply<S, Product>(a, f), series_inverse<S, Product>(a));
}

/// The nested-bracket form of the adjoint action for a = e^{(1/ih)A}:
///   Ad(a) f = f + sum_l (1/l!) {A, ... {A, f} ... }.
/// Evaluated from the caller-supplied exponent A (the traditional
/// convention divides the raw logarithm by i*hbar).
template <class S, class Product = MoyalProduct>
GradedSeries<S> adjoint_action_bracket(const GradedSeries<S>& exponent, const GradedSeries<S>& f) {
    auto r = f;
    auto nested = f;
    for (int l = 1; l <= f.t_max(); ++l) {
        nested = star_bracket<S, Product>(exponent, nested);
        r += nested.scaled(scalar_traits<S>::one() / factorial_scalar<S>(l));
    }
    return r;
}

/// Build a series from a single graded term.
template <class S>
GradedSeries<S> series_term(int t_max, int k_max, int m, int k, const RingElement<S>& c) {
    GradedSeries<S> s(t_max, k_max);
    s.add({m, k}, c);
    return s;
}

template <class S>
GradedSeries<Complex> to_float(const GradedSeries<S>& s) {
    return s.template map_scalars<Complex>([](const S& c) { return scalar_traits<S>::to_complex(c); });
}

}  // namespace heavenly
