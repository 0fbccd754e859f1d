#pragma once

#include "heavenly/background.hpp"

namespace heavenly {

/// Connection potentials indexed by base coordinate, each valued in the
/// algebra (free element 0).
template <class S>
struct ConnectionData {
    std::array<GradedSeries<S>, 4> A;  // order w, z, wt, zt

    static ConnectionData zero(int t_max, int k_max) {
        ConnectionData c;
        for (auto& a : c.A) a = GradedSeries<S>(t_max, k_max);
        return c;
    }
    const GradedSeries<S>& operator[](int i) const { return A[i]; }
    GradedSeries<S>& operator[](int i) { return A[i]; }
    int t_max() const { return A[0].t_max(); }
    int k_max() const { return A[0].k_max(); }

    void validate() const {
        for (int i = 1; i < 4; ++i) GradedSeries<S>::check_compatible(A[0], A[i]);
        for (auto& a : A)
            if (!free_element(a).is_zero())
                throw NotInAlgebraQ("connection potential has nonvanishing free element");
    }
};

/// Curvature components, upper triangle over (w, z, wt, zt).
template <class S>
struct CurvatureData {
    GradedSeries<S> F[4][4];

    const GradedSeries<S>& at(int i, int j) const { return F[i][j]; }
};

/// F_{ij} = d_i A_j - d_j A_i + {A_i, A_j}.
template <class S>
CurvatureData<S> curvature(const ConnectionData<S>& A) {
    CurvatureData<S> c;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (i < j) {
                c.F[i][j] = A[j].derivative(kBaseCoords[i]) - A[i].derivative(kBaseCoords[j]) +
                            star_bracket(A[i], A[j]);
            } else if (i == j) {
                c.F[i][j] = GradedSeries<S>(A.t_max(), A.k_max());
            } else {
                c.F[i][j] = -c.F[j][i];
            }
        }
    return c;
}

/// The three self-duality residuals: F_{wz}, F_{wt zt}, and the mixed
/// trace g^{b~ a}(d_a A_{b~} - d_{b~} A_a + {A_a, A_{b~}}).
template <class S>
std::array<GradedSeries<S>, 3> sdym_residual(const ConnectionData<S>& A,
                                             const KahlerBackground<S>& bg) {
    auto F = curvature(A);
    GradedSeries<S> mixed(A.t_max(), A.k_max());
    for (int a = 0; a < 2; ++a)
        for (int bt = 0; bt < 2; ++bt) mixed += F.at(a, 2 + bt).ring_scaled(bg.ginv(bt, a));
    return {F.at(0, 1), F.at(2, 3), mixed};
}

/// Gauge law: A'_i = c * A_i * c^{-1} + ih c * d_i(c^{-1}).
template <class S>
ConnectionData<S> gauge_transform(const ConnectionData<S>& A, const GradedSeries<S>& c) {
    if (!is_unit_free_element(c)) throw NotInGroup("gauge_transform: c must lie in the group");
    auto cinv = series_inverse(c);
    const S i_unit = scalar_traits<S>::i();
    ConnectionData<S> r;
    for (int idx = 0; idx < 4; ++idx) {
        auto hom = star_multiply(star_multiply(c, A[idx]), cinv);
        auto inhom = star_multiply(c, cinv.derivative(kBaseCoords[idx]));
        r[idx] = hom + inhom.shifted(0, 1).scaled(i_unit);
    }
    return r;
}

/// Yang residual g^{b~ a} d_a (J^{-1} * d_{b~} J).
template <class S>
GradedSeries<S> yang_residual(const GradedSeries<S>& J, const KahlerBackground<S>& bg) {
    if (!is_unit_free_element(J)) throw NotInGroup("yang_residual: J must lie in the group");
    auto Jinv = series_inverse(J);
    GradedSeries<S> r(J.t_max(), J.k_max());
    for (int bt = 0; bt < 2; ++bt) {
        auto cur = star_multiply(Jinv, J.derivative(kBarred[bt]));
        for (int a = 0; a < 2; ++a) r += cur.derivative(kUnbarred[a]).ring_scaled(bg.ginv(bt, a));
    }
    return r;
}

}  // namespace heavenly
