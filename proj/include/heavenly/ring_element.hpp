#pragma once

#include <utility>

#include "heavenly/polynomial.hpp"

namespace heavenly {

/// Rational function in the six canonical variables.  Denominators are
/// restricted to the base variables (w, z, wt, zt); this keeps the Moyal
/// sum terminating and partial derivatives closed in the type.
template <class S>
class RingElement {
  public:
    RingElement() : num_(), den_(Polynomial<S>::one()) {}
    RingElement(Polynomial<S> n) : num_(std::move(n)), den_(Polynomial<S>::one()) {}
    RingElement(Polynomial<S> n, Polynomial<S> d) : num_(std::move(n)), den_(std::move(d)) {
        if (den_.is_zero()) throw Error("RingElement: zero denominator");
        check_base_only(den_);
        reduce();
    }
    explicit RingElement(const S& c) : num_(Polynomial<S>(c)), den_(Polynomial<S>::one()) {}

    static RingElement zero() { return RingElement(); }
    static RingElement one() { return RingElement(Polynomial<S>::one()); }
    static RingElement constant(const S& c) { return RingElement(c); }
    static RingElement variable(Var v) { return RingElement(Polynomial<S>::variable(v)); }

    const Polynomial<S>& num() const { return num_; }
    const Polynomial<S>& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_ == Polynomial<S>::one(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    S constant_value() const { return num_.constant_value() / den_.constant_value(); }

    friend RingElement operator+(const RingElement& a, const RingElement& b) {
        if (a.den_ == b.den_) return RingElement::make(a.num_ + b.num_, a.den_);
        return RingElement::make(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RingElement operator-(const RingElement& a, const RingElement& b) {
        if (a.den_ == b.den_) return RingElement::make(a.num_ - b.num_, a.den_);
        return RingElement::make(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RingElement operator-(const RingElement& a) {
        RingElement r = a;
        r.num_ = -r.num_;
        return r;
    }
    friend RingElement operator*(const RingElement& a, const RingElement& b) {
        return RingElement::make(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend RingElement operator/(const RingElement& a, const RingElement& b) {
        if (b.is_zero()) throw Error("RingElement: division by zero");
        check_base_only(b.num_);  // divisor numerator becomes a denominator
        return RingElement::make(a.num_ * b.den_, a.den_ * b.num_);
    }
    RingElement& operator+=(const RingElement& o) { return *this = *this + o; }
    RingElement& operator-=(const RingElement& o) { return *this = *this - o; }
    RingElement& operator*=(const RingElement& o) { return *this = *this * o; }
    RingElement& operator/=(const RingElement& o) { return *this = *this / o; }

    RingElement scaled(const S& c) const { return RingElement::make(num_.scaled(c), den_); }

    friend bool operator==(const RingElement& a, const RingElement& b) {
        if constexpr (scalar_traits<S>::exact) {
            return a.num_ == b.num_ && a.den_ == b.den_;  // canonical form
        } else {
            return (a.num_ * b.den_ - b.num_ * a.den_).is_zero();
        }
    }
    friend bool operator!=(const RingElement& a, const RingElement& b) { return !(a == b); }

    RingElement derivative(Var v) const {
        if (!den_.depends_on(v)) return RingElement::make(num_.derivative(v), den_);
        return RingElement::make(num_.derivative(v) * den_ - num_ * den_.derivative(v), den_ * den_);
    }

    int degree_in(std::initializer_list<Var> vars) const { return num_.degree_in(vars); }
    bool depends_on(Var v) const { return num_.depends_on(v) || den_.depends_on(v); }

    /// Antiderivative in a base variable v (w or z).  Exact when the
    /// denominator does not involve v, or when the numerator is exactly
    /// divisible by the v-dependent denominator.
    RingElement antiderivative(Var v) const {
        if (!den_.depends_on(v)) return RingElement::make(num_.antiderivative(v), den_);
        Polynomial<S> q;
        if (num_.try_divide(den_, q)) return RingElement(q.antiderivative(v));
        throw NonPolynomialIntegrand("antiderivative: denominator depends on integration variable");
    }

    Complex eval(const std::array<Complex, kNumVars>& x) const {
        return num_.eval(x) / den_.eval(x);
    }

    double max_abs() const { return num_.max_abs(); }

    RingElement chopped(double eps) const {
        RingElement r;
        r.num_ = num_.chopped(eps);
        r.den_ = den_;
        return r;
    }

    std::string str() const {
        if (is_polynomial()) return num_.str();
        return "(" + num_.str() + ") / (" + den_.str() + ")";
    }

    template <class T, class Fn>
    RingElement<T> map_scalars(Fn&& fn) const {
        Polynomial<T> n, d;
        for (auto& [m, c] : num_.terms()) n.add_term(m, fn(c));
        for (auto& [m, c] : den_.terms()) d.add_term(m, fn(c));
        return RingElement<T>(std::move(n), std::move(d));
    }

  private:
    static RingElement make(Polynomial<S> n, Polynomial<S> d) {
        RingElement r;
        r.num_ = std::move(n);
        r.den_ = std::move(d);
        r.reduce();
        return r;
    }

    static void check_base_only(const Polynomial<S>& d) {
        if (d.depends_on(VQ) || d.depends_on(VP))
            throw Error("RingElement: denominator must not involve phase variables");
    }

    void reduce() {
        if (num_.is_zero()) {
            den_ = Polynomial<S>::one();
            return;
        }
        if constexpr (scalar_traits<S>::exact) {
            if (!den_.is_constant()) {
                auto g = gcd(num_, den_);
                if (!g.is_constant()) {
                    Polynomial<S> qn, qd;
                    bool ok = num_.try_divide(g, qn) && den_.try_divide(g, qd);
                    assert(ok);
                    (void)ok;
                    num_ = std::move(qn);
                    den_ = std::move(qd);
                }
            }
        }
        // normalize: denominator leading coefficient 1
        S lc = den_.leading().second;
        if (!(lc == scalar_traits<S>::one())) {
            Polynomial<S> qn, qd;
            bool ok = den_.try_divide(Polynomial<S>::constant(lc), qd);
            assert(ok);
            (void)ok;
            den_ = std::move(qd);
            num_ = num_.scaled(scalar_traits<S>::one() / lc);
        }
        if constexpr (!scalar_traits<S>::exact) {
            if (den_.is_constant()) {
                // constant already normalized to 1 above
                den_ = Polynomial<S>::one();
            }
        }
    }

    Polynomial<S> num_;
    Polynomial<S> den_;
};

template <class S>
RingElement<Complex> to_float(const RingElement<S>& r) {
    return r.template map_scalars<Complex>([](const S& c) { return scalar_traits<S>::to_complex(c); });
}

}  // namespace heavenly
