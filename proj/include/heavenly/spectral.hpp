#pragma once

#include "heavenly/contour.hpp"
#include "heavenly/hierarchy.hpp"

namespace heavenly {

/// Where a Laurent object in the spectral parameter lives: Taylor at the
/// origin, Taylor in 1/lambda at infinity, or a two-sided annulus series.
enum class Chart { Origin, Infinity, Annulus };

/// Finite Laurent series in the spectral parameter with graded-series
/// coefficients.  Powers are stored with their sign: the infinity chart
/// holds non-positive powers of lambda.
template <class S>
class SpectralSeries {
  public:
    using Coeff = GradedSeries<S>;
    using Terms = std::map<int, Coeff>;

    SpectralSeries() = default;
    SpectralSeries(int t_max, int k_max, Chart chart)
        : t_max_(t_max), k_max_(k_max), chart_(chart) {}

    static SpectralSeries unit(int t_max, int k_max, Chart chart) {
        SpectralSeries s(t_max, k_max, chart);
        s.set(0, Coeff::unit(t_max, k_max));
        return s;
    }

    int t_max() const { return t_max_; }
    int k_max() const { return k_max_; }
    Chart chart() const { return chart_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    int min_power() const { return terms_.empty() ? 0 : terms_.begin()->first; }
    int max_power() const { return terms_.empty() ? 0 : terms_.rbegin()->first; }

    Coeff at(int j) const {
        auto it = terms_.find(j);
        return it == terms_.end() ? Coeff(t_max_, k_max_) : it->second;
    }

    void add(int j, const Coeff& c) {
        if (c.is_zero()) return;
        if ((chart_ == Chart::Origin && j < 0) || (chart_ == Chart::Infinity && j > 0))
            throw ChartMismatch("lambda power " + std::to_string(j) + " outside the chart");
        auto [it, inserted] = terms_.emplace(j, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }
    void set(int j, const Coeff& c) {
        terms_.erase(j);
        add(j, c);
    }

    friend bool operator==(const SpectralSeries& a, const SpectralSeries& b) {
        return a.t_max_ == b.t_max_ && a.k_max_ == b.k_max_ && a.terms_ == b.terms_;
    }

    friend SpectralSeries operator+(const SpectralSeries& a, const SpectralSeries& b) {
        SpectralSeries r(a.t_max_, a.k_max_, join_chart(a.chart_, b.chart_));
        r.terms_ = a.terms_;
        for (auto& [j, c] : b.terms_) r.add(j, c);
        return r;
    }
    friend SpectralSeries operator-(const SpectralSeries& a, const SpectralSeries& b) {
        return a + (-b);
    }
    friend SpectralSeries operator-(const SpectralSeries& a) {
        SpectralSeries r(a.t_max_, a.k_max_, a.chart_);
        for (auto& [j, c] : a.terms_) r.terms_[j] = -c;
        return r;
    }
    SpectralSeries& operator+=(const SpectralSeries& o) { return *this = *this + o; }
    SpectralSeries& operator-=(const SpectralSeries& o) { return *this = *this - o; }

    SpectralSeries scaled(const S& c) const {
        SpectralSeries r(t_max_, k_max_, chart_);
        for (auto& [j, cc] : terms_) {
            auto v = cc.scaled(c);
            if (!v.is_zero()) r.terms_[j] = v;
        }
        return r;
    }
    SpectralSeries ring_scaled(const RingElement<S>& c) const {
        SpectralSeries r(t_max_, k_max_, chart_);
        for (auto& [j, cc] : terms_) {
            auto v = cc.ring_scaled(c);
            if (!v.is_zero()) r.terms_[j] = v;
        }
        return r;
    }
    /// Shift every hbar/t grade (not the lambda power).
    SpectralSeries grade_shifted(int dm, int dk) const {
        SpectralSeries r(t_max_, k_max_, chart_);
        for (auto& [j, cc] : terms_) {
            auto v = cc.shifted(dm, dk);
            if (!v.is_zero()) r.terms_[j] = v;
        }
        return r;
    }
    /// Multiply by lambda^d (widening to the annulus chart if needed).
    SpectralSeries lambda_shifted(int d) const {
        Chart ch = chart_;
        if (d != 0 && ch != Chart::Annulus) {
            if ((ch == Chart::Origin && min_power() + d < 0) ||
                (ch == Chart::Infinity && max_power() + d > 0))
                ch = Chart::Annulus;
        }
        SpectralSeries r(t_max_, k_max_, ch);
        for (auto& [j, cc] : terms_) r.terms_[j + d] = cc;
        return r;
    }

    SpectralSeries derivative(Var v) const {
        SpectralSeries r(t_max_, k_max_, chart_);
        for (auto& [j, cc] : terms_) {
            auto d = cc.derivative(v);
            if (!d.is_zero()) r.terms_[j] = d;
        }
        return r;
    }

    double max_abs() const {
        double m = 0.0;
        for (auto& [j, c] : terms_) m = std::max(m, c.max_abs());
        return m;
    }

    SpectralSeries chopped(double eps) const {
        SpectralSeries r(t_max_, k_max_, chart_);
        for (auto& [j, c] : terms_) {
            auto v = c.chopped(eps);
            if (!v.is_zero()) r.terms_[j] = v;
        }
        return r;
    }

    static Chart join_chart(Chart a, Chart b) { return a == b ? a : Chart::Annulus; }

  private:
    Terms terms_;
    int t_max_ = 0;
    int k_max_ = 0;
    Chart chart_ = Chart::Annulus;
};

template <class S>
SpectralSeries<S> spectral_multiply(const SpectralSeries<S>& a, const SpectralSeries<S>& b) {
    SpectralSeries<S> r(a.t_max(), a.k_max(),
                        SpectralSeries<S>::join_chart(a.chart(), b.chart()));
    for (auto& [j1, c1] : a.terms())
        for (auto& [j2, c2] : b.terms()) r.add(j1 + j2, star_multiply(c1, c2));
    return r;
}

/// Lambda-powerwise star bracket {a,b}(lambda) = sum {a_j1, b_j2} lambda^{j1+j2}.
template <class S>
SpectralSeries<S> spectral_bracket(const SpectralSeries<S>& a, const SpectralSeries<S>& b) {
    SpectralSeries<S> r(a.t_max(), a.k_max(),
                        SpectralSeries<S>::join_chart(a.chart(), b.chart()));
    for (auto& [j1, c1] : a.terms())
        for (auto& [j2, c2] : b.terms()) r.add(j1 + j2, star_bracket(c1, c2));
    return r;
}

/// Neumann inverse: requires free element 1 at lambda^0 and vanishing free
/// elements elsewhere, so the correction is t-nilpotent and the series
/// terminates.
template <class S>
SpectralSeries<S> spectral_inverse(const SpectralSeries<S>& a) {
    for (auto& [j, c] : a.terms()) {
        if (j == 0) continue;
        if (!free_element(c).is_zero())
            throw NotInGroup("spectral_inverse: free element at lambda^" + std::to_string(j));
    }
    if (!is_unit_free_element(a.at(0)))
        throw NotInGroup("spectral_inverse: lambda^0 free element must equal 1");
    auto x = a - SpectralSeries<S>::unit(a.t_max(), a.k_max(), a.chart());
    auto r = SpectralSeries<S>::unit(a.t_max(), a.k_max(), a.chart());
    auto power = r;
    for (int n = 1; n <= a.t_max(); ++n) {
        power = spectral_multiply(power, x);
        r += power.scaled(scalar_traits<S>::from_int(n % 2 == 0 ? 1 : -1));
    }
    if constexpr (!scalar_traits<S>::exact) {
        double scale = std::max(1.0, r.max_abs());
        r = r.chopped(1e-14 * scale);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Twistor-line derivations and the Lax pair
// ---------------------------------------------------------------------------

/// ell_alpha f = d_alpha f - lambda eps_{alpha beta} G g^{s~ beta} d_{s~} f,
/// with the formal spectral parameter carried as an explicit power.
template <class S>
SpectralSeries<S> ell_apply(const KahlerBackground<S>& bg, int alpha,
                            const SpectralSeries<S>& f) {
    auto r = f.derivative(kUnbarred[alpha]);
    for (int b = 0; b < 2; ++b) {
        int e = eps2(alpha, b);
        if (e == 0) continue;
        for (int st = 0; st < 2; ++st) {
            auto term = f.derivative(kBarred[st]).ring_scaled(bg.G * bg.ginv(st, b)).lambda_shifted(1);
            r -= (e > 0) ? term : -term;
        }
    }
    return r;
}

template <class S>
SpectralSeries<S> ell_apply(const KahlerBackground<S>& bg, int alpha, const GradedSeries<S>& f,
                            Chart chart = Chart::Origin) {
    SpectralSeries<S> s(f.t_max(), f.k_max(), chart);
    s.set(0, f);
    return ell_apply(bg, alpha, s);
}

/// Numeric-lambda variant acting on plain graded series.
template <class S>
GradedSeries<S> ell_apply_at(const KahlerBackground<S>& bg, int alpha, const GradedSeries<S>& f,
                             const S& lambda) {
    auto r = f.derivative(kUnbarred[alpha]);
    for (int b = 0; b < 2; ++b) {
        int e = eps2(alpha, b);
        if (e == 0) continue;
        for (int st = 0; st < 2; ++st) {
            auto term = f.derivative(kBarred[st]).ring_scaled(bg.G * bg.ginv(st, b)).scaled(lambda);
            r -= (e > 0) ? term : -term;
        }
    }
    return r;
}

/// Lax operator M_alpha X = ell_alpha X - (lambda/ih) d_alpha Theta * X.
template <class S>
SpectralSeries<S> lax_apply(const ThetaField<S>& th, int alpha, const SpectralSeries<S>& X) {
    auto r = ell_apply(th.bg, alpha, X);
    auto dth = th.theta.derivative(kUnbarred[alpha]);
    const S inv_i = -scalar_traits<S>::i();
    Chart pc = X.chart() == Chart::Origin ? Chart::Origin : Chart::Annulus;
    SpectralSeries<S> pot(X.t_max(), X.k_max(), pc);
    for (auto& [j, c] : X.terms())
        pot.add(j + 1, star_multiply(dth, c).shifted(0, -1).scaled(inv_i));
    return r - pot;
}

template <class S>
struct LaxReport {
    SpectralSeries<S> Mw_psi, Mz_psi;
    SpectralSeries<S> contraction_lhs, contraction_rhs;
    bool contraction_ok = false;
};

/// Apply the Lax pair to a candidate wavefunction and verify the operator
/// contraction eps^{ab} M_a M_b = (lambda^2/ih) G [master operator] on a
/// probe element.
template <class S>
LaxReport<S> lax_defect(const ThetaField<S>& th, const SpectralSeries<S>& psi,
                        const SpectralSeries<S>& probe) {
    LaxReport<S> rep;
    rep.Mw_psi = lax_apply(th, 0, psi);
    rep.Mz_psi = lax_apply(th, 1, psi);
    rep.contraction_lhs =
        lax_apply(th, 0, lax_apply(th, 1, probe)) - lax_apply(th, 1, lax_apply(th, 0, probe));
    // (lambda^2/ih) G [me residual] * probe
    auto inner = me_residual(th);
    const S inv_i = -scalar_traits<S>::i();
    Chart rc = probe.chart() == Chart::Origin ? Chart::Origin : Chart::Annulus;
    SpectralSeries<S> rhs(probe.t_max(), probe.k_max(), rc);
    for (auto& [j, c] : probe.terms())
        rhs.add(j + 2, star_multiply(inner, c).ring_scaled(th.bg.G).shifted(0, -1).scaled(inv_i));
    rep.contraction_rhs = rhs;
    if constexpr (scalar_traits<S>::exact) {
        rep.contraction_ok = (rep.contraction_lhs == rep.contraction_rhs);
    } else {
        rep.contraction_ok =
            (rep.contraction_lhs - rep.contraction_rhs).max_abs() <=
            1e-10 * std::max(1.0, rep.contraction_rhs.max_abs());
    }
    return rep;
}

/// Wrap a charge tower as a wavefunction: sum_j lambda^j c_j at the origin,
/// sum_j lambda^{-j} c_j at infinity.
template <class S>
SpectralSeries<S> assemble_wavefunction(const std::vector<GradedSeries<S>>& members, Chart chart) {
    if (chart == Chart::Annulus || members.empty())
        throw ChartMismatch("assemble_wavefunction: chart must be Origin or Infinity");
    SpectralSeries<S> psi(members[0].t_max(), members[0].k_max(), chart);
    for (size_t j = 0; j < members.size(); ++j)
        psi.add(chart == Chart::Origin ? static_cast<int>(j) : -static_cast<int>(j), members[j]);
    return psi;
}

/// Transition element H = Psi_under^{-1} * Psi on the annulus.
template <class S>
SpectralSeries<S> transition_function(const SpectralSeries<S>& psi,
                                      const SpectralSeries<S>& psi_under) {
    return spectral_multiply(spectral_inverse(psi_under), psi);
}

/// Both twistor-line derivatives of a spectral element; a transition
/// function or dressed generator must be annihilated by them.
template <class S>
std::array<SpectralSeries<S>, 2> twistor_defect(const KahlerBackground<S>& bg,
                                                const SpectralSeries<S>& F) {
    return {ell_apply(bg, 0, F), ell_apply(bg, 1, F)};
}

template <class S>
struct DressingReport {
    SpectralSeries<S> F;
    std::array<SpectralSeries<S>, 2> defect;
    bool ok = false;
};

/// Undress a symmetry generator: F = Psi^{-1} * Phi * Psi, checking
/// ell_alpha F = 0 through lambda^order (truncation pushes the defect to
/// higher powers only).
template <class S>
DressingReport<S> dressing_extract(const ThetaField<S>& th, const SpectralSeries<S>& psi,
                                   const SpectralSeries<S>& phi, int order) {
    DressingReport<S> rep;
    rep.F = spectral_multiply(spectral_inverse(psi), spectral_multiply(phi, psi));
    rep.defect = twistor_defect(th.bg, rep.F);
    rep.ok = true;
    for (auto& d : rep.defect)
        for (auto& [j, c] : d.terms())
            if (j <= order && !c.is_zero()) rep.ok = false;
    return rep;
}

// ---------------------------------------------------------------------------
// Numeric evaluation
// ---------------------------------------------------------------------------

template <class S>
SpectralSeries<Complex> to_float(const SpectralSeries<S>& s) {
    SpectralSeries<Complex> r(s.t_max(), s.k_max(), s.chart());
    for (auto& [j, c] : s.terms()) r.set(j, to_float(c));
    return r;
}

inline GradedSeries<Complex> evaluate_at(const SpectralSeries<Complex>& s, Complex lambda) {
    GradedSeries<Complex> r(s.t_max(), s.k_max());
    for (auto& [j, c] : s.terms()) r += c.scaled(std::pow(lambda, j));
    return r;
}

/// Sample a spectral element on the unit-circle grid.
inline ContourSeries contour_samples(const SpectralSeries<Complex>& s, const Contour& contour,
                                     Side side = Side::Off) {
    ContourSeries cs;
    cs.side = side;
    cs.values.reserve(static_cast<size_t>(contour.N));
    for (int j = 0; j < contour.N; ++j) cs.values.push_back(evaluate_at(s, contour.node(j)));
    return cs;
}

}  // namespace heavenly
