#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "heavenly/errors.hpp"
#include "heavenly/scalar.hpp"

namespace heavenly {

/// Canonical variable order: phase variables first, then base variables.
enum Var : int { VQ = 0, VP = 1, VW = 2, VZ = 3, VWT = 4, VZT = 5 };
inline constexpr int kNumVars = 6;
inline constexpr const char* kVarNames[kNumVars] = {"q", "p", "w", "z", "wt", "zt"};

using Mono = std::array<int, kNumVars>;

inline int total_degree(const Mono& m) { return std::accumulate(m.begin(), m.end(), 0); }

/// Graded lexicographic order on exponent vectors (q,p,w,z,wt,zt).
struct GradedLex {
    bool operator()(const Mono& a, const Mono& b) const {
        int da = total_degree(a), db = total_degree(b);
        if (da != db) return da < db;
        return a < b;  // lexicographic tie-break
    }
};

inline Mono mono_one() { return Mono{0, 0, 0, 0, 0, 0}; }
inline Mono mono_var(Var v, int e = 1) {
    Mono m = mono_one();
    m[v] = e;
    return m;
}
inline Mono mono_mul(const Mono& a, const Mono& b) {
    Mono r;
    for (int i = 0; i < kNumVars; ++i) r[i] = a[i] + b[i];
    return r;
}
inline bool mono_divides(const Mono& a, const Mono& b) {  // a | b
    for (int i = 0; i < kNumVars; ++i)
        if (a[i] > b[i]) return false;
    return true;
}
inline Mono mono_div(const Mono& b, const Mono& a) {
    Mono r;
    for (int i = 0; i < kNumVars; ++i) r[i] = b[i] - a[i];
    return r;
}

/// Multivariate polynomial in the six canonical variables, sparse map
/// representation with the graded-lex term order.
template <class S>
class Polynomial {
  public:
    using Terms = std::map<Mono, S, GradedLex>;

    Polynomial() = default;
    explicit Polynomial(const S& c) {
        if (!scalar_traits<S>::is_zero(c)) terms_[mono_one()] = c;
    }
    Polynomial(const Mono& m, const S& c) {
        if (!scalar_traits<S>::is_zero(c)) terms_[m] = c;
    }

    static Polynomial zero() { return Polynomial(); }
    static Polynomial one() { return Polynomial(scalar_traits<S>::one()); }
    static Polynomial constant(const S& c) { return Polynomial(c); }
    static Polynomial variable(Var v) { return Polynomial(mono_var(v), scalar_traits<S>::one()); }

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == mono_one());
    }
    S constant_value() const {
        if (terms_.empty()) return scalar_traits<S>::zero();
        auto it = terms_.find(mono_one());
        return it == terms_.end() ? scalar_traits<S>::zero() : it->second;
    }

    void add_term(const Mono& m, const S& c) {
        if (scalar_traits<S>::is_zero(c)) return;
        auto [it, inserted] = terms_.emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (scalar_traits<S>::is_zero(it->second)) terms_.erase(it);
        }
    }

    int degree() const {  // total degree, -1 for zero
        if (terms_.empty()) return -1;
        return total_degree(terms_.rbegin()->first);
    }
    int degree_in(Var v) const {
        int d = -1;
        for (auto& [m, c] : terms_) d = std::max(d, m[v]);
        return d;
    }
    /// Combined degree in a subset of variables (used for Moyal termination).
    int degree_in(std::initializer_list<Var> vars) const {
        int d = terms_.empty() ? -1 : 0;
        for (auto& [m, c] : terms_) {
            int s = 0;
            for (Var v : vars) s += m[v];
            d = std::max(d, s);
        }
        return d;
    }
    bool depends_on(Var v) const { return degree_in(v) > 0; }

    /// Leading term under graded lex.
    const std::pair<const Mono, S>& leading() const {
        assert(!terms_.empty());
        return *terms_.rbegin();
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        Polynomial r = a;
        for (auto& [m, c] : b.terms_) r.add_term(m, c);
        return r;
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
        Polynomial r = a;
        for (auto& [m, c] : b.terms_) r.add_term(m, -c);
        return r;
    }
    friend Polynomial operator-(const Polynomial& a) {
        Polynomial r;
        for (auto& [m, c] : a.terms_) r.terms_[m] = -c;
        return r;
    }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        Polynomial r;
        for (auto& [ma, ca] : a.terms_)
            for (auto& [mb, cb] : b.terms_) r.add_term(mono_mul(ma, mb), ca * cb);
        return r;
    }
    Polynomial& operator+=(const Polynomial& o) { return *this = *this + o; }
    Polynomial& operator-=(const Polynomial& o) { return *this = *this - o; }
    Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

    Polynomial scaled(const S& c) const {
        Polynomial r;
        if (scalar_traits<S>::is_zero(c)) return r;
        for (auto& [m, cc] : terms_) r.terms_[m] = cc * c;
        return r;
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

    Polynomial derivative(Var v) const {
        Polynomial r;
        for (auto& [m, c] : terms_) {
            if (m[v] == 0) continue;
            Mono mm = m;
            mm[v] -= 1;
            r.add_term(mm, c * scalar_traits<S>::from_int(m[v]));
        }
        return r;
    }

    /// Termwise antiderivative in v; every monomial gains a factor of v.
    Polynomial antiderivative(Var v) const {
        Polynomial r;
        for (auto& [m, c] : terms_) {
            Mono mm = m;
            mm[v] += 1;
            r.add_term(mm, c * scalar_traits<S>::from_ratio(1, mm[v]));
        }
        return r;
    }

    /// Exact division: sets q with *this == q * d, returns false if no
    /// exact quotient exists.
    bool try_divide(const Polynomial& d, Polynomial& q) const {
        assert(!d.is_zero());
        q = Polynomial();
        Polynomial rem = *this;
        const auto& [dm, dc] = d.leading();
        while (!rem.is_zero()) {
            const auto& [rm, rc] = rem.leading();
            if (!mono_divides(dm, rm)) return false;
            S c = rc / dc;
            Mono qm = mono_div(rm, dm);
            q.add_term(qm, c);
            rem -= d.shifted_scaled(qm, c);
        }
        return true;
    }

    Polynomial shifted_scaled(const Mono& m, const S& c) const {
        Polynomial r;
        if (scalar_traits<S>::is_zero(c)) return r;
        for (auto& [mm, cc] : terms_) r.terms_[mono_mul(mm, m)] = cc * c;
        return r;
    }

    /// Substitute complex values for all variables (float evaluation).
    Complex eval(const std::array<Complex, kNumVars>& x) const {
        Complex acc = 0.0;
        for (auto& [m, c] : terms_) {
            Complex t = scalar_traits<S>::to_complex(c);
            for (int i = 0; i < kNumVars; ++i)
                for (int e = 0; e < m[i]; ++e) t *= x[i];
            acc += t;
        }
        return acc;
    }

    double max_abs() const {
        double r = 0.0;
        for (auto& [m, c] : terms_) r = std::max(r, scalar_traits<S>::abs(c));
        return r;
    }

    /// Drop terms with |coeff| <= eps (float-mode housekeeping only).
    Polynomial chopped(double eps) const {
        Polynomial r;
        for (auto& [m, c] : terms_)
            if (scalar_traits<S>::abs(c) > eps) r.terms_[m] = c;
        return r;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::string s;
        for (auto& [m, c] : terms_) {
            if (!s.empty()) s += " + ";
            s += "(" + coeff_str(c) + ")";
            for (int i = 0; i < kNumVars; ++i) {
                if (m[i] == 0) continue;
                s += std::string("*") + kVarNames[i];
                if (m[i] != 1) s += "^" + std::to_string(m[i]);
            }
        }
        return s;
    }

  private:
    static std::string coeff_str(const GaussianRational& c) {
        return c.re.str() + (c.im == 0 ? "" : "+" + c.im.str() + "i");
    }
    static std::string coeff_str(const Complex& c) {
        return std::to_string(c.real()) + (c.imag() == 0 ? "" : "+" + std::to_string(c.imag()) + "i");
    }

    Terms terms_;
};

// ---------------------------------------------------------------------------
// Multivariate gcd over the Gaussian rationals (primitive PRS).  Only the
// exact scalar mode supports gcd; float mode never calls into this.
// ---------------------------------------------------------------------------

namespace detail {

using XPoly = Polynomial<GaussianRational>;

/// View of a polynomial as univariate in `v` with XPoly coefficients.
inline std::vector<XPoly> univariate_coeffs(const XPoly& f, Var v) {
    std::vector<XPoly> out(static_cast<size_t>(std::max(0, f.degree_in(v)) + 1));
    for (auto& [m, c] : f.terms()) {
        Mono mm = m;
        int e = mm[v];
        mm[v] = 0;
        out[e].add_term(mm, c);
    }
    while (out.size() > 1 && out.back().is_zero()) out.pop_back();
    return out;
}

inline XPoly from_univariate(const std::vector<XPoly>& cs, Var v) {
    XPoly r;
    for (size_t e = 0; e < cs.size(); ++e)
        for (auto& [m, c] : cs[e].terms()) {
            Mono mm = m;
            mm[v] += static_cast<int>(e);
            r.add_term(mm, c);
        }
    return r;
}

XPoly poly_gcd(const XPoly& a, const XPoly& b);

inline XPoly content(const std::vector<XPoly>& cs) {
    XPoly g;
    for (const auto& c : cs) g = poly_gcd(g, c);
    return g;
}

/// Pseudo-remainder of univariate polynomial sequences.
inline std::vector<XPoly> pseudo_rem(std::vector<XPoly> f, const std::vector<XPoly>& g) {
    assert(!g.empty());
    const XPoly& lg = g.back();
    while (f.size() >= g.size() && !(f.size() == 1 && f[0].is_zero())) {
        while (!f.empty() && f.back().is_zero()) f.pop_back();
        if (f.size() < g.size()) break;
        size_t shift = f.size() - g.size();
        XPoly lf = f.back();
        for (auto& c : f) c *= lg;
        for (size_t i = 0; i < g.size(); ++i) f[i + shift] -= g[i] * lf;
        while (!f.empty() && f.back().is_zero()) f.pop_back();
    }
    if (f.empty()) f.push_back(XPoly());
    return f;
}

inline XPoly monic(const XPoly& f) {
    if (f.is_zero()) return f;
    XPoly q;
    bool ok = f.try_divide(XPoly::constant(f.leading().second), q);
    assert(ok);
    (void)ok;
    return q;
}

inline XPoly poly_gcd(const XPoly& a, const XPoly& b) {
    if (a.is_zero()) return monic(b);
    if (b.is_zero()) return monic(a);
    if (a.is_constant() || b.is_constant()) return XPoly::one();
    // main variable: first canonical variable either polynomial depends on
    Var v = VQ;
    for (int i = 0; i < kNumVars; ++i)
        if (a.degree_in(static_cast<Var>(i)) > 0 || b.degree_in(static_cast<Var>(i)) > 0) {
            v = static_cast<Var>(i);
            break;
        }
    auto fa = univariate_coeffs(a, v);
    auto fb = univariate_coeffs(b, v);
    XPoly ca = content(fa), cb = content(fb);
    XPoly cg = poly_gcd(ca, cb);
    auto primitive = [&](std::vector<XPoly>& f, const XPoly& c) {
        for (auto& x : f) {
            XPoly q;
            bool ok = x.try_divide(c, q);
            assert(ok);
            (void)ok;
            x = q;
        }
    };
    primitive(fa, ca);
    primitive(fb, cb);
    if (fa.size() < fb.size()) std::swap(fa, fb);
    while (true) {
        auto r = pseudo_rem(fa, fb);
        if (r.size() == 1 && r[0].is_zero()) break;
        XPoly cr = content(r);
        primitive(r, cr);
        fa = std::move(fb);
        fb = std::move(r);
    }
    XPoly g = from_univariate(fb, v);
    return monic(cg * g);
}

}  // namespace detail

inline Polynomial<GaussianRational> gcd(const Polynomial<GaussianRational>& a,
                                        const Polynomial<GaussianRational>& b) {
    return detail::poly_gcd(a, b);
}

}  // namespace heavenly
