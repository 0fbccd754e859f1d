#pragma once

#include <optional>
#include <set>

#include "heavenly/spectral.hpp"

namespace heavenly {

/// Sparse exact linear system over the Gaussian rationals.  Free variables
/// are fixed to zero; an inconsistent system reports failure.
class ExactLinearSystem {
  public:
    using X = GaussianRational;
    using Row = std::map<int, X>;

    void add_row(Row coeffs, X rhs) {
        for (auto it = coeffs.begin(); it != coeffs.end();)
            it = scalar_traits<X>::is_zero(it->second) ? coeffs.erase(it) : std::next(it);
        if (coeffs.empty() && scalar_traits<X>::is_zero(rhs)) return;
        rows_.push_back({std::move(coeffs), std::move(rhs)});
    }

    std::optional<std::vector<X>> solve(int nvars) {
        std::vector<int> pivot_row(static_cast<size_t>(nvars), -1);
        std::vector<bool> used(rows_.size(), false);
        for (int col = 0; col < nvars; ++col) {
            int chosen = -1;
            size_t best = 0;
            for (size_t r = 0; r < rows_.size(); ++r) {
                if (used[r]) continue;
                auto it = rows_[r].coeffs.find(col);
                if (it == rows_[r].coeffs.end()) continue;
                if (chosen < 0 || rows_[r].coeffs.size() < best) {
                    chosen = static_cast<int>(r);
                    best = rows_[r].coeffs.size();
                }
            }
            if (chosen < 0) continue;
            used[static_cast<size_t>(chosen)] = true;
            pivot_row[static_cast<size_t>(col)] = chosen;
            auto& prow = rows_[static_cast<size_t>(chosen)];
            X inv = scalar_traits<X>::one() / prow.coeffs.at(col);
            for (auto& [c, v] : prow.coeffs) v *= inv;
            prow.rhs *= inv;
            for (size_t r = 0; r < rows_.size(); ++r) {
                if (r == static_cast<size_t>(chosen)) continue;
                auto it = rows_[r].coeffs.find(col);
                if (it == rows_[r].coeffs.end()) continue;
                X f = it->second;
                for (auto& [c, v] : prow.coeffs) {
                    auto [jt, ins] = rows_[r].coeffs.emplace(c, -f * v);
                    if (!ins) jt->second -= f * v;
                }
                for (auto jt = rows_[r].coeffs.begin(); jt != rows_[r].coeffs.end();)
                    jt = scalar_traits<X>::is_zero(jt->second) ? rows_[r].coeffs.erase(jt)
                                                               : std::next(jt);
                rows_[r].rhs -= f * prow.rhs;
            }
        }
        // unused rows must have reduced to 0 = 0
        for (size_t r = 0; r < rows_.size(); ++r)
            if (!used[r] && !(rows_[r].coeffs.empty() && scalar_traits<X>::is_zero(rows_[r].rhs)))
                return std::nullopt;
        std::vector<X> sol(static_cast<size_t>(nvars), scalar_traits<X>::zero());
        for (int col = 0; col < nvars; ++col)
            if (pivot_row[static_cast<size_t>(col)] >= 0)
                sol[static_cast<size_t>(col)] =
                    rows_[static_cast<size_t>(pivot_row[static_cast<size_t>(col)])].rhs;
        return sol;
    }

  private:
    struct RowData {
        Row coeffs;
        X rhs;
    };
    std::vector<RowData> rows_;
};

namespace detail {

inline void enumerate_monomials(const std::vector<Var>& vars, int max_deg, size_t idx, Mono cur,
                                int used, std::vector<Mono>& out) {
    if (idx == vars.size()) {
        out.push_back(cur);
        return;
    }
    for (int e = 0; e + used <= max_deg; ++e) {
        cur[vars[idx]] = e;
        enumerate_monomials(vars, max_deg, idx + 1, cur, used + e, out);
    }
    cur[vars[idx]] = 0;
}

}  // namespace detail

/// Solve the infinity-chart Lax system M_alpha Psi_under = 0 order by
/// order in t, with Psi_under = sum_{k=0}^{depth} lambda^{-k} eta_k and
/// eta_0 normalized to unit free element.  Unknown coefficients at t-order
/// m range over monomials of total degree <= degree_budget * m in the
/// variables the system actually involves; leftover freedom is fixed to
/// zero.  Throws AnsatzExhausted when no solution fits the ansatz.
inline SpectralSeries<GaussianRational> solve_underline_wavefunction(
    const ThetaField<GaussianRational>& th, int depth, int degree_budget) {
    using S = GaussianRational;
    using R = RingElement<S>;
    const int t_max = th.theta.t_max();
    const int k_max = th.theta.k_max();
    if (!me_residual(th).is_zero())
        throw NonCompatibleOneForm("solve_underline_wavefunction: Theta fails the master equation");

    // metric part of the twistor-line operator: D0_alpha = sum_b
    // eps2(alpha,b) G g^{s~ b} d_{s~}; coefficients must stay polynomial.
    R d0[2][2];  // d0[alpha][st]
    for (int alpha = 0; alpha < 2; ++alpha)
        for (int st = 0; st < 2; ++st) {
            R c;
            for (int b = 0; b < 2; ++b) {
                int e = eps2(alpha, b);
                if (e == 0) continue;
                auto term = th.bg.G * th.bg.ginv(st, b);
                c += (e > 0) ? term : -term;
            }
            if (!c.is_polynomial())
                throw AnsatzExhausted(
                    "solve_underline_wavefunction: non-polynomial twistor-line coefficients");
            d0[alpha][st] = c;
        }

    std::array<GradedSeries<S>, 2> dtheta = {th.theta.derivative(VW), th.theta.derivative(VZ)};
    // variables the iteration can generate
    std::set<Var> varset = {VW, VZ, VWT, VZT};
    for (int alpha = 0; alpha < 2; ++alpha) {
        for (auto& [g, c] : dtheta[alpha].terms())
            for (auto& [mono, cc] : c.num().terms())
                for (int v = 0; v < kNumVars; ++v)
                    if (mono[static_cast<size_t>(v)] > 0) varset.insert(static_cast<Var>(v));
        for (int st = 0; st < 2; ++st)
            for (auto& [mono, cc] : d0[alpha][st].num().terms())
                for (int v = 0; v < kNumVars; ++v)
                    if (mono[static_cast<size_t>(v)] > 0) varset.insert(static_cast<Var>(v));
    }
    std::vector<Var> vars(varset.begin(), varset.end());

    std::vector<GradedSeries<S>> eta(static_cast<size_t>(depth) + 1,
                                     GradedSeries<S>(t_max, k_max));
    eta[0] = GradedSeries<S>::unit(t_max, k_max);

    const S inv_i = -scalar_traits<S>::i();
    for (int m = 1; m <= t_max; ++m) {
        // known nonlinear sources (1/ih) d_alpha Theta * eta_{k}, whose
        // t-order-m slice only involves eta below order m
        std::vector<std::array<GradedSeries<S>, 2>> src(static_cast<size_t>(depth) + 1);
        for (int k = 0; k <= depth; ++k)
            for (int alpha = 0; alpha < 2; ++alpha)
                src[static_cast<size_t>(k)][alpha] =
                    star_multiply(dtheta[alpha], eta[static_cast<size_t>(k)])
                        .shifted(0, -1)
                        .scaled(inv_i);

        // hbar levels appearing in the sources at this order
        std::set<int> levels;
        for (auto& pair : src)
            for (auto& s : pair)
                for (auto& [g, c] : s.terms())
                    if (g.m == m) levels.insert(g.k);

        std::vector<Mono> basis;
        detail::enumerate_monomials(vars, degree_budget * m, 0, mono_one(), 0, basis);

        for (int kh : levels) {
            auto col = [&](int k, int b) { return k * static_cast<int>(basis.size()) + b; };
            const int nvars = (depth + 1) * static_cast<int>(basis.size());
            ExactLinearSystem sys;
            // one polynomial identity per alpha and lambda level -k,
            // k = -1..depth:  d_alpha eta_k - D0_alpha eta_{k+1} = src_{k+1}
            for (int alpha = 0; alpha < 2; ++alpha) {
                for (int k = -1; k <= depth; ++k) {
                    std::map<Mono, ExactLinearSystem::Row, GradedLex> rows;
                    std::map<Mono, S, GradedLex> rhs;
                    auto accum = [&](const Polynomial<S>& poly, int column) {
                        for (auto& [mono, c] : poly.terms()) rows[mono][column] += c;
                    };
                    if (k >= 0)
                        for (size_t b = 0; b < basis.size(); ++b)
                            accum(Polynomial<S>(basis[b], scalar_traits<S>::one())
                                      .derivative(kUnbarred[alpha]),
                                  col(k, static_cast<int>(b)));
                    if (k + 1 <= depth) {
                        for (size_t b = 0; b < basis.size(); ++b) {
                            Polynomial<S> img;
                            for (int st = 0; st < 2; ++st)
                                img += d0[alpha][st].num() *
                                       Polynomial<S>(basis[b], scalar_traits<S>::one())
                                           .derivative(kBarred[st]);
                            accum(-img, col(k + 1, static_cast<int>(b)));
                        }
                        auto s = src[static_cast<size_t>(k + 1)][alpha].at({m, kh});
                        if (!s.is_polynomial())
                            throw AnsatzExhausted(
                                "solve_underline_wavefunction: non-polynomial source");
                        for (auto& [mono, c] : s.num().terms()) rhs[mono] += c;
                    }
                    for (auto& [mono, row] : rows) {
                        auto it = rhs.find(mono);
                        sys.add_row(std::move(row),
                                    it == rhs.end() ? scalar_traits<S>::zero() : it->second);
                        if (it != rhs.end()) rhs.erase(it);
                    }
                    for (auto& [mono, c] : rhs)
                        if (!scalar_traits<S>::is_zero(c))
                            throw AnsatzExhausted(
                                "solve_underline_wavefunction: source monomial unreachable at "
                                "t-order " +
                                std::to_string(m));
                }
            }
            auto sol = sys.solve(nvars);
            if (!sol)
                throw AnsatzExhausted("solve_underline_wavefunction: inconsistent system at t-order " +
                                      std::to_string(m));
            for (int k = 0; k <= depth; ++k) {
                Polynomial<S> poly;
                for (size_t b = 0; b < basis.size(); ++b)
                    poly.add_term(basis[b], (*sol)[static_cast<size_t>(col(k, static_cast<int>(b)))]);
                if (!poly.is_zero()) eta[static_cast<size_t>(k)].add({m, kh}, R(poly));
            }
        }
    }

    auto psi = assemble_wavefunction(eta, Chart::Infinity);
    for (int alpha = 0; alpha < 2; ++alpha)
        if (!lax_apply(th, alpha, psi).is_zero())
            throw AnsatzExhausted("solve_underline_wavefunction: residual after solve");
    return psi;
}

}  // namespace heavenly
