// End-to-end acceptance gate: one pass/fail line per criterion, exit
// nonzero if any fails.  Tolerances are pinned here, not configurable.

#include <chrono>
#include <iostream>
#include <random>
#include <vector>

#include "heavenly/heavenly.hpp"

using namespace heavenly;

using X = GaussianRational;
using R = RingElement<X>;
using GS = GradedSeries<X>;
using SS = SpectralSeries<X>;

namespace {

std::mt19937 rng(909151);
int failures = 0;

void report(int n, bool ok, const std::string& what) {
    std::cout << "criterion " << n << ": " << (ok ? "PASS" : "FAIL") << " - " << what << "\n";
    if (!ok) ++failures;
}

R rand_coeff(int max_deg) {
    std::uniform_int_distribution<int> ed(0, max_deg);
    std::uniform_int_distribution<int> cd(-4, 4);
    std::uniform_int_distribution<int> nt(1, 3);
    Polynomial<X> p;
    for (int t = 0, n = nt(rng); t < n; ++t) {
        Mono m = mono_one();
        m[VQ] = ed(rng);
        m[VP] = ed(rng);
        m[VW] = ed(rng) % 2;
        m[VZT] = ed(rng) % 2;
        int c = cd(rng);
        if (c != 0) p.add_term(m, X(c));
    }
    return R(p);
}

GS rand_series(int t_max, int k_max, bool algebra, int k_min = 0) {
    GS s(t_max, k_max);
    std::uniform_int_distribution<int> kd(k_min, k_min + 2);
    for (int m = algebra ? 1 : 0; m <= t_max; ++m) {
        auto c = rand_coeff(3);
        if (!c.is_zero()) s.add({m, kd(rng)}, c);
    }
    return s;
}

/// Random Theta candidate kept one hbar level above the grading line so
/// the Lax potential term stays inside the algebra.
GS rand_q_series(int t_max, int k_max) {
    GS s(t_max, k_max);
    for (int m = 1; m <= t_max; ++m) {
        std::uniform_int_distribution<int> kd(1 - m, 1);
        auto c = rand_coeff(2);
        if (!c.is_zero()) s.add({m, kd(rng)}, c);
    }
    return s;
}

bool in_grading(const GS& s) {
    for (auto& [g, c] : s.terms())
        if (g.m < 0 || g.m > s.t_max() || g.k < -g.m || g.k > s.k_max()) return false;
    return true;
}

ThetaField<X> theta_star() {
    GS th(3, 6);
    th.add({1, 0}, R::variable(VQ) * R::variable(VW) + R::variable(VP) * R::variable(VZ));
    th.add({2, 0}, -R::variable(VW) * R::variable(VWT));
    return {th, flat_background<X>()};
}

ContourSeries exp_datum(const SpectralSeries<Complex>& f, const Contour& contour) {
    ContourSeries cs;
    cs.side = Side::Off;
    for (int j = 0; j < contour.N; ++j)
        cs.values.push_back(series_exp(evaluate_at(f, contour.node(j))));
    return cs;
}

SpectralSeries<Complex> float_spec(const char* text, int t_max, int k_max) {
    return to_float(evaluate_spec<X>(text, t_max, k_max));
}

// ---------------------------------------------------------------------------

void criterion_1() {
    const int t_max = 3, k_max = 6;
    const auto u = GS::unit(t_max, k_max);
    int trials = 0, bad = 0;
    for (int it = 0; it < 100; ++it, ++trials) {
        auto a = rand_series(t_max, k_max, false);
        auto b = rand_series(t_max, k_max, false);
        auto c = rand_series(t_max, k_max, false);
        bool ok = true;
        auto ab_c = star_multiply(star_multiply(a, b), c);
        ok = ok && ab_c == star_multiply(a, star_multiply(b, c));
        ok = ok && star_multiply(u, a) == a && star_multiply(a, u) == a;
        ok = ok && (star_bracket(a, star_bracket(b, c)) + star_bracket(b, star_bracket(c, a)) +
                    star_bracket(c, star_bracket(a, b)))
                       .is_zero();
        ok = ok && in_grading(ab_c) && in_grading(star_bracket(a, b));
        auto q = rand_series(t_max, k_max, true);
        auto e = series_exp(q);
        ok = ok && series_log(e) == q;
        ok = ok && star_multiply(e, series_inverse(e)) == u;
        if (!ok) ++bad;
    }
    report(1, bad == 0, "star-algebra property suite, " + std::to_string(trials) +
                            " randomized exact trials, " + std::to_string(bad) + " failures");
}

void criterion_2() {
    bool ok = true;
    for (int it = 0; it < 50; ++it) {
        auto f = rand_coeff(3);
        auto g = rand_coeff(3);
        auto anti = MoyalProduct::delta(1, f, g) - MoyalProduct::delta(1, g, f);
        auto pois = (f.derivative(VQ) * g.derivative(VP) - f.derivative(VP) * g.derivative(VQ))
                        .scaled(scalar_traits<X>::i());
        ok = ok && (anti - pois).is_zero();
    }
    report(2, ok, "Delta_1 antisymmetrization equals i * Poisson on 50 pairs");
}

void criterion_3() {
    bool ok = true;
    for (auto& bg : {flat_background<X>(), cubic_background<X>()}) {
        for (int it = 0; it < 25; ++it) {
            ThetaField<X> th{rand_q_series(3, 8), bg};
            auto f = rand_series(3, 8, false);
            auto lhs = apply_L(th, 0, apply_L(th, 1, f)) - apply_L(th, 1, apply_L(th, 0, f));
            auto rhs = star_bracket(me_residual(th), f).ring_scaled(R::one() / bg.G);
            ok = ok && lhs == rhs;
            SS probe(3, 8, Chart::Origin);
            probe.add(0, rand_series(3, 8, false, 1));
            ok = ok && lax_defect(th, SS::unit(3, 8, Chart::Origin), probe).contraction_ok;
        }
    }
    report(3, ok, "L-commutator and Lax contraction identities, 25 pairs per background");
}

void criterion_4() {
    auto th = theta_star();
    bool ok = me_residual(th).is_zero();
    auto tower = hierarchy_generate(th, TowerKind::D, GS::unit(3, 6), 3);
    // first member is Theta / ih
    ok = ok && tower.members[1] == th.theta.shifted(0, -1).scaled(-scalar_traits<X>::i());
    for (auto& member : tower.members)
        ok = ok && current_divergence(th, TowerKind::D, member).is_zero();
    report(4, ok, "canonical solution: exact master equation, anchored depth-3 tower, "
                  "vanishing divergences");
}

void criterion_5() {
    auto th = theta_star();
    auto tower = hierarchy_generate(th, TowerKind::D, GS::unit(3, 6), 3);
    auto psi = assemble_wavefunction(tower.members, Chart::Origin);
    bool ok = true;
    for (int alpha = 0; alpha < 2; ++alpha)
        for (auto& [j, c] : lax_apply(th, alpha, psi).terms()) ok = ok && (j > 3 || c.is_zero());
    report(5, ok, "depth-3 wavefunction annihilates the Lax pair through lambda^3");
}

void criterion_6() {
    const int t_max = 3, k_max = 6;
    ThetaField<X> th0{GS(t_max, k_max), flat_background<X>()};
    auto F = evaluate_spec<X>("t*Pw^2*lam^-1", t_max, k_max);
    auto delta = symmetry_delta(th0, F, SS(t_max, k_max, Chart::Annulus));
    GS expect(t_max, k_max);
    expect.add({1, 0}, -R::variable(VZ) * R::variable(VZ));
    bool ok = delta == expect && lme_residual(th0, delta).is_zero();

    const char* pairs[5][2] = {
        {"t*q*lam", "t*p"},
        {"t*q*Pw*lam^-1", "t*p*Pz"},
        {"t*Pw^2*lam^-1", "t*p"},
        {"t*Pw*lam^-1", "t*Pz*lam^-1"},
        {"t*Pw^2*lam^-1", "t*Pz^2*lam^-1"},
    };
    SS none(t_max, k_max, Chart::Annulus);
    for (auto& pair : pairs) {
        auto F1 = evaluate_spec<X>(pair[0], t_max, k_max);
        auto F2 = evaluate_spec<X>(pair[1], t_max, k_max);
        auto rep = symmetry_bracket_check(th0, F1, none, F2, none, 2);
        ok = ok && rep.ok;
    }
    report(6, ok, "residue oracle delta = -z^2 and bracket closure on 5 generator pairs");
}

void criterion_7() {
    Contour contour(256);
    const Complex inside{0.31, 0.12}, outside{1.7, -0.6};
    double worst = 0.0;
    for (int k = -64; k <= 64; ++k) {
        std::vector<Complex> vals(256);
        for (int j = 0; j < 256; ++j) vals[static_cast<size_t>(j)] = std::pow(contour.node(j), k);
        ContourSeries f;
        for (auto v : vals) {
            GradedSeries<Complex> s(0, 0);
            s.add({0, 0}, RingElement<Complex>::constant(v));
            f.values.push_back(s);
        }
        Complex in_expect = k >= 0 ? std::pow(inside, k) : Complex{0.0, 0.0};
        Complex out_expect = k < 0 ? -std::pow(outside, k) : Complex{0.0, 0.0};
        worst = std::max(worst,
                         (cauchy_transform(f, inside, contour).at({0, 0}) -
                          RingElement<Complex>::constant(in_expect))
                             .max_abs());
        worst = std::max(worst,
                         (cauchy_transform(f, outside, contour).at({0, 0}) -
                          RingElement<Complex>::constant(out_expect))
                             .max_abs());
    }
    bool ok = worst <= 1e-13;

    // Plemelj pair on a random Laurent sample
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::map<int, Complex> coeffs;
    for (int k = -20; k <= 20; k += 3) coeffs[k] = Complex{d(rng), d(rng)};
    ContourSeries f;
    for (int j = 0; j < 256; ++j) {
        Complex acc = 0.0;
        for (auto& [k, c] : coeffs) acc += c * std::pow(contour.node(j), k);
        GradedSeries<Complex> s(0, 0);
        s.add({0, 0}, RingElement<Complex>::constant(acc));
        f.values.push_back(s);
    }
    auto pv = plemelj_boundary(f, contour);
    double worst_pair = 0.0;
    for (int l = 0; l < 256; ++l) {
        Complex xi = contour.target(l);
        Complex pv_expect = 0.0, fxi = 0.0, plus = 0.0;
        for (auto& [k, c] : coeffs) {
            Complex mono = c * std::pow(xi, k);
            fxi += mono;
            pv_expect += (k >= 0 ? 0.5 : -0.5) * mono;
            if (k >= 0) plus += mono;
        }
        Complex got = pv.values[static_cast<size_t>(l)].at({0, 0}).num().constant_value();
        worst_pair = std::max(worst_pair, std::abs(got - pv_expect));
        worst_pair = std::max(worst_pair, std::abs(got + 0.5 * fxi - plus));
    }
    ok = ok && worst_pair <= 1e-10;
    report(7, ok, "Cauchy transform exact to 1e-13 on tau^j, |j| <= 64; Plemelj pair to 1e-10");
}

void criterion_8() {
    const int t_max = 3, k_max = 6;
    Contour contour(256);
    auto f = float_spec("- i*t*hbar^-1*q*lam - i*t*hbar^-1*q*lam^-1", t_max, k_max);
    auto res = birkhoff_factorize(exp_datum(f, contour), contour, 1e-10);
    SpectralSeries<Complex> psi_expect(t_max, k_max, Chart::Origin);
    SpectralSeries<Complex> under_expect(t_max, k_max, Chart::Infinity);
    double fact = 1.0;
    for (int n = 0; n <= t_max; ++n) {
        if (n > 0) fact *= n;
        RingElement<Complex> qn{Polynomial<Complex>(mono_var(VQ, n), Complex{1.0, 0.0})};
        psi_expect.add(n, series_term(t_max, k_max, n, -n,
                                      qn.scaled(std::pow(Complex{0.0, -1.0}, n) / fact)));
        under_expect.add(-n, series_term(t_max, k_max, n, -n,
                                         qn.scaled(std::pow(Complex{0.0, 1.0}, n) / fact)));
    }
    bool ok = (res.psi - psi_expect).max_abs() <= 1e-10 &&
              (res.psi_under - under_expect).max_abs() <= 1e-10 &&
              res.factor_residual <= 1e-10 && res.hilbert.accompanying_max <= 1e-10;
    report(8, ok, "abelian splitting matches the exponential-halves oracle at 1e-10");
}

void criterion_9() {
    const int t_max = 3, k_max = 6;
    Contour contour(256);
    auto f = float_spec("- i*t*hbar^-1*q*lam - i*t*hbar^-1*p*lam^-1", t_max, k_max);
    auto res = birkhoff_factorize(exp_datum(f, contour), contour, 1e-8);
    bool ok = res.factor_residual <= 1e-8 && res.hilbert.leakage <= 1e-8;
    report(9, ok, "noncommuting datum: factorization residual and leakage below 1e-8");
}

void criterion_10() {
    const int t_max = 3, k_max = 6;
    Contour contour(256);
    auto bg = flat_background<X>();
    bool ok = true;

    // pinned headline datum; its exponent has no positive lambda powers,
    // so the potential degenerates to zero while the connection and the
    // master-equation residuals stay fully asserted
    auto fh = float_spec("- i*t*hbar^-1*q*Pw*lam^-1 - i*t*hbar^-1*p*Pz*lam^-1", t_max, k_max);
    auto res = birkhoff_factorize(exp_datum(fh, contour), contour, 1e-8);
    auto conn = extract_connection(res.psi, bg, 1e-8);
    ok = ok && conn.liouville_defect <= 1e-8;
    for (double r : conn.sdym_norms) ok = ok && r <= 1e-8;
    auto ext = extract_theta(res.psi, bg, 1e-8);
    ok = ok && ext.me_norm <= 1e-8;

    // quadratic-charge companion: the t^1 potential t(q z^2 + p w^2) has a
    // nonvanishing star bracket -4 t^2 w z, so the t^2 slice genuinely
    // exercises the nonlinearity
    auto fq = float_spec("- i*t*hbar^-1*q*Pw^2*lam^-1 - i*t*hbar^-1*p*Pz^2*lam^-1", t_max, k_max);
    auto resq = birkhoff_factorize(exp_datum(fq, contour), contour, 1e-8);
    auto extq = extract_theta(resq.psi, bg, 1e-8);
    ok = ok && extq.me_norm <= 1e-8;
    GradedSeries<Complex> lin(t_max, k_max);
    for (auto& [g, c] : extq.theta.terms())
        if (g.m == 1) lin.add(g, c);
    auto br = star_bracket(lin.derivative(VW), lin.derivative(VZ));
    double br2 = 0.0, t2 = 0.0;
    for (auto& [g, c] : br.terms())
        if (g.m == 2) br2 = std::max(br2, c.max_abs());
    for (auto& [g, c] : extq.theta.terms())
        if (g.m == 2) t2 = std::max(t2, c.max_abs());
    ok = ok && br2 > 1e-6 && t2 > 1e-6;

    // abelian sub-case against the residue pipeline
    const char* text = "- i*t*hbar^-1*q*Pw^2*lam^-1";
    auto resa = birkhoff_factorize(exp_datum(float_spec(text, t_max, k_max), contour), contour,
                                   1e-8);
    auto exta = extract_theta(resa.psi, bg, 1e-8);
    ThetaField<X> th0{GS(t_max, k_max), bg};
    auto delta = symmetry_delta(th0, evaluate_spec<X>(text, t_max, k_max),
                                SS(t_max, k_max, Chart::Annulus));
    auto theta_sym = to_float(delta.shifted(0, 1).scaled(X(Rational(0), Rational(-1))));
    ok = ok && (exta.theta - theta_sym).max_abs() <= 1e-8;

    report(10, ok, "inverse transform headline: SDYM, Liouville and master-equation residuals "
                   "at 1e-8, nonlinearity certified on the quadratic companion, abelian "
                   "cross-check");
}

}  // namespace

int main() {
    auto start = std::chrono::steady_clock::now();
    void (*checks[])() = {criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                          criterion_6, criterion_7, criterion_8, criterion_9, criterion_10};
    for (int n = 0; n < 10; ++n) {
        try {
            checks[n]();
        } catch (const std::exception& e) {
            report(n + 1, false, std::string("exception: ") + e.what());
        }
    }
    auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (failures == 0 ? "all criteria passed" : "FAILURES: " + std::to_string(failures))
              << " (" << secs << " s)\n";
    return failures == 0 ? 0 : 1;
}
