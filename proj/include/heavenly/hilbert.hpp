#pragma once

#include "heavenly/parallel.hpp"
#include "heavenly/spectral.hpp"

namespace heavenly {

namespace detail {

inline GradedSeries<Complex> t_slice(const GradedSeries<Complex>& s, int m) {
    GradedSeries<Complex> r(s.t_max(), s.k_max());
    for (auto& [g, c] : s.terms())
        if (g.m == m) r.set(g, c);
    return r;
}

inline GradedSeries<Complex> chop_rel(const GradedSeries<Complex>& s, double eps) {
    return s.chopped(eps * std::max(1.0, s.max_abs()));
}

/// Trigonometric interpolation to the staggered targets keeping only the
/// non-negative frequencies (the interior-chart boundary values).
inline std::vector<Complex> interp_nonneg_to_targets(const std::vector<Complex>& samples) {
    const int N = static_cast<int>(samples.size());
    auto c = fourier_coeffs(samples);
    for (int k = 0; k < N; ++k) {
        int sk = signed_wavenumber(k, N);
        if (sk < 0) {
            c[static_cast<size_t>(k)] = 0.0;
            continue;
        }
        c[static_cast<size_t>(k)] *= std::polar(1.0, std::numbers::pi * static_cast<double>(sk) / N);
    }
    fft_inplace(c, true);
    for (auto& x : c) x *= static_cast<double>(N);
    return c;
}

}  // namespace detail

struct HilbertResult {
    ContourSeries phi_minus;           // boundary values of the minus solution
    SpectralSeries<Complex> interior;  // plus-side chart (Taylor at the origin)
    SpectralSeries<Complex> exterior;  // minus-side chart (gamma + negative powers)
    double boundary_residual = 0.0;
    double accompanying_max = 0.0;
    double leakage = 0.0;
};

namespace detail {

/// One full t-graded sweep of the regularized singular-integral equation
///   Phi^-(xi) = gamma(xi) + PV[Phi^- G](xi) G^{-1}(xi) - PV[Phi^-](xi),
/// whose kernel mixes t-orders strictly upward, so each order is read off
/// from the previous ones.
inline std::vector<GradedSeries<Complex>> hilbert_sweep(
    const std::vector<GradedSeries<Complex>>& Gv, const std::vector<GradedSeries<Complex>>& Ginv,
    const SpectralSeries<Complex>& gamma, const Contour& contour) {
    const int N = contour.N;
    const int t_max = Gv[0].t_max();
    const int k_max = Gv[0].k_max();

    std::vector<GradedSeries<Complex>> gamma_nodes(static_cast<size_t>(N));
    for (int j = 0; j < N; ++j) gamma_nodes[static_cast<size_t>(j)] = evaluate_at(gamma, contour.node(j));

    std::vector<GradedSeries<Complex>> phi(static_cast<size_t>(N),
                                           GradedSeries<Complex>(t_max, k_max));
    for (int m = 0; m <= t_max; ++m) {
        std::vector<GradedSeries<Complex>> prod(static_cast<size_t>(N));
        parallel_for(N, [&](int j) {
            prod[static_cast<size_t>(j)] =
                star_multiply(phi[static_cast<size_t>(j)], Gv[static_cast<size_t>(j)]);
        });
        // node-grid PV transforms, stream by stream
        auto pv_of = [&](const std::vector<GradedSeries<Complex>>& vals) {
            ContourSeries cs;
            cs.side = Side::Minus;
            cs.values = vals;
            StreamMap pvs;
            for (auto& [key, stream] : build_streams(cs)) pvs[key] = pv_at_nodes(stream);
            return from_streams(pvs, N, t_max, k_max, Side::Minus).values;
        };
        auto pv_prod = pv_of(prod);
        auto pv_phi = pv_of(phi);
        parallel_for(N, [&](int j) {
            auto s = static_cast<size_t>(j);
            auto integral = star_multiply(pv_prod[s], Ginv[s]) - pv_phi[s];
            phi[s] += detail::chop_rel(
                detail::t_slice(gamma_nodes[s], m) + detail::t_slice(integral, m), 1e-14);
        });
    }
    return phi;
}

}  // namespace detail

/// Solve the boundary problem Phi^+ = Phi^- G on the unit circle with the
/// principal part gamma, via the t-graded regularized integral equation.
/// The homogeneous (gamma = 0) accompanying problem is run alongside and
/// must vanish identically.
inline HilbertResult hilbert_solve(const ContourSeries& Gdat, const SpectralSeries<Complex>& gamma,
                                   const Contour& contour, double tol) {
    const int N = contour.N;
    if (Gdat.size() != N) throw Error("hilbert_solve: node count mismatch");
    if (gamma.chart() != Chart::Origin)
        throw ChartMismatch("hilbert_solve: principal part must be an origin-chart polynomial");
    const int t_max = Gdat.t_max();
    const int k_max = Gdat.k_max();

    std::vector<GradedSeries<Complex>> Gv = Gdat.values;
    for (auto& g : Gv)
        if (!is_unit_free_element(g))
            throw NotInGroup("hilbert_solve: boundary datum must be group-valued at every node");
    std::vector<GradedSeries<Complex>> Ginv(static_cast<size_t>(N));
    parallel_for(N, [&](int j) {
        Ginv[static_cast<size_t>(j)] = series_inverse(Gv[static_cast<size_t>(j)]);
    });

    HilbertResult res;
    auto phi = detail::hilbert_sweep(Gv, Ginv, gamma, contour);
    res.phi_minus.side = Side::Minus;
    res.phi_minus.values = phi;

    // accompanying homogeneous problem
    {
        SpectralSeries<Complex> zero_gamma(t_max, k_max, Chart::Origin);
        auto acc = detail::hilbert_sweep(Gv, Ginv, zero_gamma, contour);
        for (auto& v : acc) res.accompanying_max = std::max(res.accompanying_max, v.max_abs());
        if (res.accompanying_max > tol)
            throw ResidualExceeded("hilbert_solve: accompanying problem is not identically zero");
    }

    // plus-side boundary data and the two charts
    std::vector<GradedSeries<Complex>> prod(static_cast<size_t>(N));
    parallel_for(N, [&](int j) {
        prod[static_cast<size_t>(j)] =
            star_multiply(phi[static_cast<size_t>(j)], Gv[static_cast<size_t>(j)]);
    });
    ContourSeries prod_cs;
    prod_cs.side = Side::Plus;
    prod_cs.values = prod;

    const double scale = std::max(1.0, Gdat.max_abs());
    res.interior = SpectralSeries<Complex>(t_max, k_max, Chart::Origin);
    for (auto& [key, stream] : build_streams(prod_cs)) {
        auto c = fourier_coeffs(stream);
        for (int k = 0; k < N; ++k) {
            int sk = signed_wavenumber(k, N);
            Complex ck = c[static_cast<size_t>(k)];
            if (sk < 0)
                res.leakage = std::max(res.leakage, std::abs(ck));
            else if (std::abs(ck) > 1e-13 * scale)
                res.interior.add(sk, series_term(t_max, k_max, key.g.m, key.g.k,
                                                 RingElement<Complex>(Polynomial<Complex>(key.mono, ck))));
        }
    }
    res.exterior = SpectralSeries<Complex>(t_max, k_max, Chart::Annulus);
    for (auto& [j, c] : gamma.terms()) res.exterior.add(j, c);
    for (auto& [key, stream] : build_streams(res.phi_minus)) {
        auto c = fourier_coeffs(stream);
        for (int k = 0; k < N; ++k) {
            int sk = signed_wavenumber(k, N);
            Complex ck = c[static_cast<size_t>(k)];
            if (sk < 0) {
                if (std::abs(ck) > 1e-13 * scale)
                    res.exterior.add(sk, series_term(t_max, k_max, key.g.m, key.g.k,
                                                     RingElement<Complex>(Polynomial<Complex>(key.mono, ck))));
            } else {
                // non-negative frequencies must reproduce gamma exactly
                auto gc = gamma.at(sk).at(key.g);
                Complex expect = 0.0;
                if (gc.is_polynomial()) {
                    auto it = gc.num().terms().find(key.mono);
                    if (it != gc.num().terms().end()) expect = it->second;
                }
                res.leakage = std::max(res.leakage, std::abs(ck - expect));
            }
        }
    }

    // boundary verification at the staggered targets
    auto phi_streams = build_streams(res.phi_minus);
    auto g_streams = build_streams(Gdat);
    StreamMap phi_t, g_t, plus_t;
    for (auto& [key, stream] : phi_streams) {
        check_fourier_decay(fourier_coeffs(stream), N);
        phi_t[key] = interp_to_targets(stream);
    }
    for (auto& [key, stream] : g_streams) {
        check_fourier_decay(fourier_coeffs(stream), N);
        g_t[key] = interp_to_targets(stream);
    }
    for (auto& [key, stream] : build_streams(prod_cs))
        plus_t[key] = detail::interp_nonneg_to_targets(stream);
    auto phi_at = from_streams(phi_t, N, t_max, k_max, Side::Minus).values;
    auto g_at = from_streams(g_t, N, t_max, k_max, Side::Off).values;
    auto plus_at = from_streams(plus_t, N, t_max, k_max, Side::Plus).values;
    std::vector<double> worst(static_cast<size_t>(N), 0.0);
    parallel_for(N, [&](int j) {
        auto s = static_cast<size_t>(j);
        worst[s] = (plus_at[s] - star_multiply(phi_at[s], g_at[s])).max_abs();
    });
    for (double wv : worst) res.boundary_residual = std::max(res.boundary_residual, wv);
    if (res.boundary_residual > tol)
        throw ResidualExceeded("hilbert_solve: boundary residual " +
                               std::to_string(res.boundary_residual) + " exceeds tolerance");
    return res;
}

// ---------------------------------------------------------------------------
// Birkhoff factorization and the inverse transform
// ---------------------------------------------------------------------------

struct BirkhoffResult {
    SpectralSeries<Complex> psi;        // origin chart, Psi(0) invertible
    SpectralSeries<Complex> psi_under;  // infinity chart, Psi_under(inf) = 1
    HilbertResult hilbert;
    double factor_residual = 0.0;
};

/// Snap a float spectral element onto the group slice: the free element
/// must be 1 at lambda^0 and 0 elsewhere up to tol.
inline SpectralSeries<Complex> snap_group(const SpectralSeries<Complex>& s, double tol) {
    SpectralSeries<Complex> r(s.t_max(), s.k_max(), s.chart());
    for (auto& [j, c] : s.terms()) {
        GradedSeries<Complex> cc(s.t_max(), s.k_max());
        for (auto& [g, v] : c.terms()) {
            if (g.m == 0) {
                auto dev = (j == 0) ? v - RingElement<Complex>::one() : v;
                if (dev.max_abs() > tol)
                    throw NotInGroup("snap_group: free element off the group slice");
                if (j == 0) cc.set(g, RingElement<Complex>::one());
            } else {
                cc.set(g, v);
            }
        }
        if (j == 0 && cc.at({0, 0}).is_zero())
            throw NotInGroup("snap_group: missing unit free element");
        r.set(j, cc);
    }
    return r;
}

/// Factor node data H on the unit circle as Psi = Psi_under * H with Psi
/// holomorphic inside and Psi_under holomorphic outside, normalized to 1
/// at infinity (principal part gamma = 1).
inline BirkhoffResult birkhoff_factorize(const ContourSeries& H, const Contour& contour,
                                         double tol) {
    const int t_max = H.t_max();
    const int k_max = H.k_max();
    BirkhoffResult res;
    res.hilbert = hilbert_solve(H, SpectralSeries<Complex>::unit(t_max, k_max, Chart::Origin),
                                contour, tol);
    res.psi = snap_group(res.hilbert.interior, tol);
    SpectralSeries<Complex> under(t_max, k_max, Chart::Infinity);
    for (auto& [j, c] : res.hilbert.exterior.terms()) under.add(j, c);
    res.psi_under = snap_group(under, tol);
    // nodewise factorization check Psi = Psi_under * H
    const int N = contour.N;
    std::vector<double> worst(static_cast<size_t>(N), 0.0);
    parallel_for(N, [&](int j) {
        Complex tau = contour.node(j);
        auto lhs = evaluate_at(res.psi, tau);
        auto rhs = star_multiply(evaluate_at(res.psi_under, tau), H.values[static_cast<size_t>(j)]);
        worst[static_cast<size_t>(j)] = (lhs - rhs).max_abs();
    });
    for (double wv : worst) res.factor_residual = std::max(res.factor_residual, wv);
    if (res.factor_residual > tol)
        throw ResidualExceeded("birkhoff_factorize: factorization residual " +
                               std::to_string(res.factor_residual) + " exceeds tolerance");
    return res;
}

// ---------------------------------------------------------------------------
// Connection and potential extraction from an origin-chart wavefunction
// ---------------------------------------------------------------------------

struct ConnectionExtract {
    ConnectionData<Complex> A;
    double liouville_defect = 0.0;
    std::array<double, 3> sdym_norms = {0.0, 0.0, 0.0};
};

namespace detail {

/// E_alpha = ell_alpha Psi * Psi^{-1}; for a wavefunction of the linear
/// system this is linear in lambda.
inline std::array<SpectralSeries<Complex>, 2> log_derivatives(const KahlerBackground<Complex>& bg,
                                                              const SpectralSeries<Complex>& psi) {
    auto inv = spectral_inverse(psi);
    std::array<SpectralSeries<Complex>, 2> E;
    for (int alpha = 0; alpha < 2; ++alpha) {
        E[alpha] = spectral_multiply(ell_apply(bg, alpha, psi), inv);
        E[alpha] = E[alpha].chopped(1e-13 * std::max(1.0, E[alpha].max_abs()));
    }
    return E;
}

inline double off_linear_defect(const SpectralSeries<Complex>& E) {
    double d = 0.0;
    for (auto& [j, c] : E.terms())
        if (j != 0 && j != 1) d = std::max(d, c.max_abs());
    return d;
}

}  // namespace detail

/// Read the gauge connection off a factorized wavefunction:
///   A_alpha = -ih E_alpha[lambda^0],
///   eps_{alpha beta} G g^{s~ beta} A_{s~} = ih E_alpha[lambda^1],
/// then verify the self-duality residuals.
template <class SB>
ConnectionExtract extract_connection(const SpectralSeries<Complex>& psi,
                                     const KahlerBackground<SB>& bg_in, double tol) {
    auto bg = to_float(bg_in);
    auto E = detail::log_derivatives(bg, psi);
    ConnectionExtract out;
    out.liouville_defect = std::max(detail::off_linear_defect(E[0]), detail::off_linear_defect(E[1]));
    if (out.liouville_defect > tol)
        throw LiouvilleViolation("extract_connection: lambda powers outside {0,1}: defect " +
                                 std::to_string(out.liouville_defect));
    const Complex mi{0.0, -1.0}, pi_{0.0, 1.0};
    const int t_max = psi.t_max(), k_max = psi.k_max();
    out.A = ConnectionData<Complex>::zero(t_max, k_max);
    out.A[0] = E[0].at(0).shifted(0, 1).scaled(mi);
    out.A[1] = E[1].at(0).shifted(0, 1).scaled(mi);
    // 2x2 ring solve for the barred components
    auto B0 = E[0].at(1).shifted(0, 1).scaled(pi_);
    auto B1 = E[1].at(1).shifted(0, 1).scaled(pi_);
    RingElement<Complex> M[2][2];  // M[alpha][st]
    for (int alpha = 0; alpha < 2; ++alpha)
        for (int st = 0; st < 2; ++st) {
            RingElement<Complex> c;
            for (int b = 0; b < 2; ++b) {
                int e = eps2(alpha, b);
                if (e == 0) continue;
                auto term = bg.G * bg.ginv(st, b);
                c += (e > 0) ? term : -term;
            }
            M[alpha][st] = c;
        }
    auto detM = M[0][0] * M[1][1] - M[0][1] * M[1][0];
    if (detM.is_zero()) throw SingularBackground("extract_connection: singular lambda^1 system");
    auto inv_det = RingElement<Complex>::one() / detM;
    out.A[2] = (B0.ring_scaled(M[1][1]) - B1.ring_scaled(M[0][1])).ring_scaled(inv_det);
    out.A[3] = (B1.ring_scaled(M[0][0]) - B0.ring_scaled(M[1][0])).ring_scaled(inv_det);
    for (int i = 0; i < 4; ++i) out.A[i] = detail::chop_rel(out.A[i], 1e-13);

    auto res = sdym_residual(out.A, bg);
    for (int i = 0; i < 3; ++i) out.sdym_norms[static_cast<size_t>(i)] = res[static_cast<size_t>(i)].max_abs();
    for (double r : out.sdym_norms)
        if (r > tol)
            throw ResidualExceeded("extract_connection: self-duality residual exceeds tolerance");
    return out;
}

struct ThetaExtract {
    GradedSeries<Complex> theta;
    double me_norm = 0.0;
    double gauge_defect = 0.0;
};

/// Normalize to the gauge with vanishing unbarred connection by
/// left-multiplying with Psi(0)^{-1}, then read d_alpha Theta off the
/// lambda^1 coefficient of the logarithmic derivative and integrate.
template <class SB>
ThetaExtract extract_theta(const SpectralSeries<Complex>& psi, const KahlerBackground<SB>& bg_in,
                           double tol) {
    auto bg = to_float(bg_in);
    const int t_max = psi.t_max(), k_max = psi.k_max();
    auto a = series_inverse(psi.at(0));
    SpectralSeries<Complex> psi_n(t_max, k_max, psi.chart());
    for (auto& [j, c] : psi.terms()) psi_n.add(j, star_multiply(a, c));
    auto E = detail::log_derivatives(bg, psi_n);

    ThetaExtract out;
    for (auto& Ea : E) {
        out.gauge_defect = std::max(out.gauge_defect, detail::off_linear_defect(Ea));
        out.gauge_defect = std::max(out.gauge_defect, Ea.at(0).max_abs());
    }
    if (out.gauge_defect > tol)
        throw LiouvilleViolation("extract_theta: logarithmic derivative is not lambda^1 pure");

    const Complex pi_{0.0, 1.0};
    auto Vw = detail::chop_rel(E[0].at(1).shifted(0, 1).scaled(pi_), 1e-13);
    auto Vz = detail::chop_rel(E[1].at(1).shifted(0, 1).scaled(pi_), 1e-13);
    out.theta = integrate_alpha(Vw, Vz, tol);
    out.theta = detail::chop_rel(out.theta, 1e-14);

    auto resid = me_residual(ThetaField<Complex>{out.theta, bg});
    out.me_norm = resid.max_abs();
    if (out.me_norm > tol)
        throw ResidualExceeded("extract_theta: master-equation residual " +
                               std::to_string(out.me_norm) + " exceeds tolerance");
    return out;
}

}  // namespace heavenly
