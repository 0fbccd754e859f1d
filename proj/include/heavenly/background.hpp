#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "heavenly/series.hpp"

namespace heavenly {

/// Coordinate indexing on the base manifold: w, z are the unbarred pair,
/// wt, zt the barred pair.
inline constexpr std::array<Var, 4> kBaseCoords = {VW, VZ, VWT, VZT};
inline constexpr std::array<Var, 2> kUnbarred = {VW, VZ};
inline constexpr std::array<Var, 2> kBarred = {VWT, VZT};

/// eps_{ab} = eps^{ab} = [[0,1],[-1,0]] for both index families.
inline int eps2(int a, int b) { return (a == 0 && b == 1) ? 1 : (a == 1 && b == 0) ? -1 : 0; }

/// Complexified Kaehler background: metric block from the potential,
/// inverse, determinant, and the heavenly factorization data.
template <class S>
struct KahlerBackground {
    using R = RingElement<S>;

    R potential;
    R metric[2][2];   // g_{alpha beta~}: rows w,z; cols wt,zt
    R inverse[2][2];  // g^{beta~ alpha}: rows wt,zt; cols w,z
    R det;            // g
    R G;              // factor in (w,z)
    R Gt;             // factor in (wt,zt)
    bool heavenly = false;

    const R& ginv(int bt, int a) const { return inverse[bt][a]; }
};

template <class S>
KahlerBackground<S> build_background(const RingElement<S>& potential, const RingElement<S>& G,
                                     const RingElement<S>& Gt) {
    using R = RingElement<S>;
    if (potential.depends_on(VQ) || potential.depends_on(VP))
        throw Error("build_background: potential must depend on base variables only");
    if (G.is_zero() || G.depends_on(VQ) || G.depends_on(VP) || G.depends_on(VWT) || G.depends_on(VZT))
        throw Error("build_background: G must be nonzero and depend on (w,z) only");
    if (Gt.is_zero() || Gt.depends_on(VQ) || Gt.depends_on(VP) || Gt.depends_on(VW) || Gt.depends_on(VZ))
        throw Error("build_background: Gt must be nonzero and depend on (wt,zt) only");

    KahlerBackground<S> bg;
    bg.potential = potential;
    bg.G = G;
    bg.Gt = Gt;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            bg.metric[a][b] = potential.derivative(kUnbarred[a]).derivative(kBarred[b]);
    bg.det = bg.metric[0][0] * bg.metric[1][1] - bg.metric[0][1] * bg.metric[1][0];
    if (bg.det.is_zero()) throw SingularBackground("metric block has identically vanishing determinant");
    // adjugate over determinant; verified below
    bg.inverse[0][0] = bg.metric[1][1] / bg.det;
    bg.inverse[0][1] = -bg.metric[0][1] / bg.det;
    bg.inverse[1][0] = -bg.metric[1][0] / bg.det;
    bg.inverse[1][1] = bg.metric[0][0] / bg.det;
    for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c) {
            R s;
            for (int bt = 0; bt < 2; ++bt) s += bg.metric[a][bt] * bg.inverse[bt][c];
            if (!(s == (a == c ? R::one() : R::zero()))) throw Error("metric inverse check failed");
        }
    bg.heavenly = (bg.det == G * Gt);
    return bg;
}

template <class S>
KahlerBackground<Complex> to_float(const KahlerBackground<S>& bg) {
    KahlerBackground<Complex> r;
    r.potential = to_float(bg.potential);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            r.metric[a][b] = to_float(bg.metric[a][b]);
            r.inverse[a][b] = to_float(bg.inverse[a][b]);
        }
    r.det = to_float(bg.det);
    r.G = to_float(bg.G);
    r.Gt = to_float(bg.Gt);
    r.heavenly = bg.heavenly;
    return r;
}

template <class S>
KahlerBackground<S> flat_background() {
    using R = RingElement<S>;
    auto pot = R::variable(VW) * R::variable(VWT) + R::variable(VZ) * R::variable(VZT);
    return build_background(pot, R::one(), R::one());
}

/// The shipped curved example: K = (w + w^3) wt + z zt, G = 1 + 3 w^2.
template <class S>
KahlerBackground<S> cubic_background() {
    using R = RingElement<S>;
    auto w = R::variable(VW);
    auto pot = (w + w * w * w) * R::variable(VWT) + R::variable(VZ) * R::variable(VZT);
    auto G = R::one() + R::constant(scalar_traits<S>::from_int(3)) * w * w;
    return build_background(pot, G, R::one());
}

// ---------------------------------------------------------------------------
// Anti-self-dual basis and the lambda-family Sigma(lambda)
// ---------------------------------------------------------------------------

/// Antisymmetric 2-form on the base, stored as the upper triangle over
/// the coordinate order (w, z, wt, zt).
template <class S>
struct TwoForm {
    using R = RingElement<S>;
    R comp[4][4];  // comp[i][j] = -comp[j][i], only i<j stored meaningfully

    void set(int i, int j, const R& v) {
        comp[i][j] = v;
        comp[j][i] = -v;
    }
    friend TwoForm operator+(const TwoForm& a, const TwoForm& b) {
        TwoForm r;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) r.comp[i][j] = a.comp[i][j] + b.comp[i][j];
        return r;
    }
    TwoForm scaled(const R& c) const {
        TwoForm r;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) r.comp[i][j] = comp[i][j] * c;
        return r;
    }
    /// 4-form component (A wedge B)_{w z wt zt}.
    R wedge_top(const TwoForm& b) const {
        return comp[0][1] * b.comp[2][3] - comp[0][2] * b.comp[1][3] + comp[0][3] * b.comp[1][2] +
               comp[1][2] * b.comp[0][3] - comp[1][3] * b.comp[0][2] + comp[2][3] * b.comp[0][1];
    }
};

/// Sigma(lambda) = Gt dwt^dzt - lambda Omega + lambda^2 G dw^dz, stored as
/// coefficients of lambda^0..2.
template <class S>
struct AsdBasis {
    std::array<TwoForm<S>, 3> sigma;
};

template <class S>
AsdBasis<S> asd_basis(const KahlerBackground<S>& bg) {
    AsdBasis<S> basis;
    basis.sigma[0].set(2, 3, bg.Gt);  // Gt dwt ^ dzt
    TwoForm<S> omega;                 // Omega = g_{a b~} dz^a ^ dz^{b~}
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) omega.set(a, 2 + b, bg.metric[a][b]);
    basis.sigma[1] = omega.scaled(-RingElement<S>::one());
    basis.sigma[2].set(0, 1, bg.G);  // G dw ^ dz
    return basis;
}

struct AsdReport {
    bool closed = true;      // d Sigma(lambda) = 0, every lambda power
    bool degenerate = true;  // Sigma ^ Sigma = 0 identically in lambda
    std::vector<std::string> witnesses;
    bool ok() const { return closed && degenerate; }
};

template <class S>
AsdReport verify_asd_basis(const AsdBasis<S>& basis) {
    AsdReport rep;
    // closure: for each lambda power, each coordinate triple
    for (int l = 0; l < 3; ++l) {
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
                for (int k = j + 1; k < 4; ++k) {
                    auto d = basis.sigma[l].comp[j][k].derivative(kBaseCoords[i]) -
                             basis.sigma[l].comp[i][k].derivative(kBaseCoords[j]) +
                             basis.sigma[l].comp[i][j].derivative(kBaseCoords[k]);
                    if (!d.is_zero()) {
                        rep.closed = false;
                        rep.witnesses.push_back("dSigma lambda^" + std::to_string(l) + " (" +
                                                std::to_string(i) + std::to_string(j) +
                                                std::to_string(k) + "): " + d.str());
                    }
                }
    }
    // degeneracy: lambda powers 0..4 of Sigma ^ Sigma
    for (int l = 0; l <= 4; ++l) {
        RingElement<S> acc;
        for (int a = 0; a < 3; ++a) {
            int b = l - a;
            if (b < 0 || b > 2) continue;
            acc += basis.sigma[a].wedge_top(basis.sigma[b]);
        }
        if (!acc.is_zero()) {
            rep.degenerate = false;
            rep.witnesses.push_back("Sigma^Sigma lambda^" + std::to_string(l) + ": " + acc.str());
        }
    }
    return rep;
}

template <class S>
AsdReport verify_asd_basis(const KahlerBackground<S>& bg) {
    return verify_asd_basis(asd_basis(bg));
}

}  // namespace heavenly
