#pragma once

#include <vector>

#include "heavenly/gauge.hpp"

namespace heavenly {

/// Scalar field of the master equation over a heavenly background.
template <class S>
struct ThetaField {
    GradedSeries<S> theta;
    KahlerBackground<S> bg;

    ThetaField() = default;
    ThetaField(GradedSeries<S> th, KahlerBackground<S> b) : theta(std::move(th)), bg(std::move(b)) {
        if (!free_element(theta).is_zero())
            throw NotInAlgebraQ("ThetaField: free element must vanish");
        if (!bg.heavenly) throw SingularBackground("ThetaField: background must be heavenly");
    }
};

template <class S>
GradedSeries<S> series_antiderivative(const GradedSeries<S>& s, Var v) {
    GradedSeries<S> r(s.t_max(), s.k_max());
    if (s.degraded()) r.mark_degraded();
    for (auto& [g, c] : s.terms()) r.add(g, c.antiderivative(v));
    return r;
}

/// Wave part g^{b~ a} d_{b~} d_a f.
template <class S>
GradedSeries<S> wave_part(const KahlerBackground<S>& bg, const GradedSeries<S>& f) {
    GradedSeries<S> r(f.t_max(), f.k_max());
    for (int bt = 0; bt < 2; ++bt)
        for (int a = 0; a < 2; ++a)
            r += f.derivative(kBarred[bt]).derivative(kUnbarred[a]).ring_scaled(bg.ginv(bt, a));
    return r;
}

/// Master equation residual:
///   g^{b~ a} d_{b~} d_a Theta + (1/2G) eps^{ab} {d_a Theta, d_b Theta}.
template <class S>
GradedSeries<S> me_residual(const ThetaField<S>& th) {
    auto r = wave_part(th.bg, th.theta);
    auto br = star_bracket(th.theta.derivative(VW), th.theta.derivative(VZ));
    return r + br.ring_scaled(RingElement<S>::one() / th.bg.G);
}

/// Linearized residual: g^{b~ a} d_{b~} d_a phi + (1/G) eps^{ab} {d_a Theta, d_b phi}.
template <class S>
GradedSeries<S> lme_residual(const ThetaField<S>& th, const GradedSeries<S>& phi) {
    auto r = wave_part(th.bg, phi);
    auto br = star_bracket(th.theta.derivative(VW), phi.derivative(VZ)) -
              star_bracket(th.theta.derivative(VZ), phi.derivative(VW));
    return r + br.ring_scaled(RingElement<S>::one() / th.bg.G);
}

/// L^a f = g^{b~ a} d_{b~} f + (eps^{ba}/G) {d_b Theta, f}.
template <class S>
GradedSeries<S> apply_L(const ThetaField<S>& th, int alpha, const GradedSeries<S>& f) {
    GradedSeries<S> r(f.t_max(), f.k_max());
    for (int bt = 0; bt < 2; ++bt) r += f.derivative(kBarred[bt]).ring_scaled(th.bg.ginv(bt, alpha));
    auto inv_g = RingElement<S>::one() / th.bg.G;
    for (int b = 0; b < 2; ++b) {
        int e = eps2(b, alpha);
        if (e == 0) continue;
        auto br = star_bracket(th.theta.derivative(kUnbarred[b]), f).ring_scaled(inv_g);
        r += (e > 0) ? br : -br;
    }
    return r;
}

/// D^a f = g^{b~ a} d_{b~} f + (1/ih)(eps^{ba}/G) d_b Theta * f.
template <class S>
GradedSeries<S> apply_D(const ThetaField<S>& th, int alpha, const GradedSeries<S>& f) {
    GradedSeries<S> r(f.t_max(), f.k_max());
    for (int bt = 0; bt < 2; ++bt) r += f.derivative(kBarred[bt]).ring_scaled(th.bg.ginv(bt, alpha));
    auto inv_g = RingElement<S>::one() / th.bg.G;
    const S inv_i = -scalar_traits<S>::i();
    for (int b = 0; b < 2; ++b) {
        int e = eps2(b, alpha);
        if (e == 0) continue;
        auto prod = star_multiply(th.theta.derivative(kUnbarred[b]), f)
                        .shifted(0, -1)
                        .scaled(e > 0 ? inv_i : -inv_i)
                        .ring_scaled(inv_g);
        r += prod;
    }
    return r;
}

/// Potential of the closed unbarred 1-form (V_w, V_z): returns phi with
/// d_w phi = V_w and d_z phi = V_z, normalized so monomials free of both
/// w and z have zero coefficient.
template <class S>
GradedSeries<S> integrate_alpha(const GradedSeries<S>& Vw, const GradedSeries<S>& Vz,
                                double tol = 0.0) {
    GradedSeries<S>::check_compatible(Vw, Vz);
    auto curl = Vz.derivative(VW) - Vw.derivative(VZ);
    bool flat = scalar_traits<S>::exact ? curl.is_zero() : curl.max_abs() <= tol;
    if (!flat) throw NonCompatibleOneForm("integrate_alpha: nonzero curl: " + curl.str());
    auto W = series_antiderivative(Vw, VW);
    auto rest = Vz - W.derivative(VZ);
    if constexpr (!scalar_traits<S>::exact) rest = rest.chopped(tol);
    if (rest.derivative(VW).max_abs() > tol)
        throw NonCompatibleOneForm("integrate_alpha: residual depends on w");
    return W + series_antiderivative(rest, VZ);
}

enum class TowerKind { L, D };

template <class S>
struct ChargeTower {
    TowerKind kind = TowerKind::D;
    std::vector<GradedSeries<S>> members;
    std::string convention = "zero-wz-free-part";
};

/// Defining linear equation of a D-tower member: D^a d_a c = 0.
template <class S>
GradedSeries<S> d_seed_residual(const ThetaField<S>& th, const GradedSeries<S>& c) {
    GradedSeries<S> r(c.t_max(), c.k_max());
    for (int a = 0; a < 2; ++a) r += apply_D(th, a, c.derivative(kUnbarred[a]));
    return r;
}

/// Generate a charge tower by the recursion d_a c_{n+1} = G eps_{ab} Op^b c_n.
template <class S>
ChargeTower<S> hierarchy_generate(const ThetaField<S>& th, TowerKind kind,
                                  const GradedSeries<S>& seed, int depth) {
    if (!me_residual(th).is_zero())
        throw NonCompatibleOneForm("hierarchy_generate: Theta does not solve the master equation");
    if (kind == TowerKind::L) {
        if (!lme_residual(th, seed).is_zero())
            throw SeedRejected("hierarchy_generate: seed fails the linearized equation");
    } else {
        if (!d_seed_residual(th, seed).is_zero())
            throw SeedRejected("hierarchy_generate: seed fails D^a d_a = 0");
    }
    ChargeTower<S> tower;
    tower.kind = kind;
    tower.members.push_back(seed);
    for (int n = 0; n < depth; ++n) {
        const auto& c = tower.members.back();
        auto op = [&](int a) { return kind == TowerKind::L ? apply_L(th, a, c) : apply_D(th, a, c); };
        // eps_{wz} = 1: RHS_w = G Op^z, RHS_z = -G Op^w
        auto Vw = op(1).ring_scaled(th.bg.G);
        auto Vz = -op(0).ring_scaled(th.bg.G);
        auto next = integrate_alpha(Vw, Vz);
        auto resid = (kind == TowerKind::L) ? lme_residual(th, next) : d_seed_residual(th, next);
        if (!resid.is_zero())
            throw Error("hierarchy_generate: member " + std::to_string(n + 1) +
                        " fails its defining equation: " + resid.str());
        tower.members.push_back(std::move(next));
    }
    return tower;
}

/// Density-form divergence d_a (G J^a) with J^a the hierarchy current of c.
template <class S>
GradedSeries<S> current_divergence(const ThetaField<S>& th, TowerKind kind,
                                   const GradedSeries<S>& c) {
    GradedSeries<S> r(c.t_max(), c.k_max());
    for (int a = 0; a < 2; ++a) {
        auto J = kind == TowerKind::L ? apply_L(th, a, c) : apply_D(th, a, c);
        r += J.ring_scaled(th.bg.G).derivative(kUnbarred[a]);
    }
    return r;
}

/// Density-weighted master residual on a general Kaehler background:
///   g^{a~ b} grad_{a~} grad_b Xi + (1/2g) eps^{ab} {grad_a Xi, grad_b Xi}
/// with grad_{a~} Xi = d_{a~} Xi - (g,_{a~}/g) Xi and grad_b Xi = d_b Xi.
template <class S>
GradedSeries<S> master_residual_density(const GradedSeries<S>& Xi, const KahlerBackground<S>& bg) {
    GradedSeries<S> r(Xi.t_max(), Xi.k_max());
    for (int bt = 0; bt < 2; ++bt)
        for (int a = 0; a < 2; ++a) {
            auto db = Xi.derivative(kUnbarred[a]);
            auto cov = db.derivative(kBarred[bt]) -
                       db.ring_scaled(bg.det.derivative(kBarred[bt]) / bg.det);
            r += cov.ring_scaled(bg.ginv(bt, a));
        }
    auto br = star_bracket(Xi.derivative(VW), Xi.derivative(VZ));
    return r + br.ring_scaled(RingElement<S>::one() / bg.det);
}

}  // namespace heavenly
