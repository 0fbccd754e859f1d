#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "heavenly/spectral.hpp"

namespace heavenly {

/// Parsed Laurent monomial expression in the twistor coordinates: a sum of
/// '*'-joined factors drawn from t, hbar, q, p, w, z, wt, zt, Pw, Pz, lam,
/// i and rational literals, each with an optional signed '^' exponent.
struct TwistorFunctionSpec {
    struct Term {
        GaussianRational coeff = GaussianRational(1);
        int e_t = 0;
        int e_hbar = 0;
        int e_lam = 0;
        int e_pw = 0;
        int e_pz = 0;
        Mono mono = mono_one();
    };
    std::string source;
    std::vector<Term> terms;
};

namespace detail {

struct SpecLexer {
    const std::string& s;
    size_t pos = 0;

    explicit SpecLexer(const std::string& src) : s(src) {}

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= s.size();
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }
    bool eat(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) {
        throw ParseError("twistor spec: " + what + " at position " + std::to_string(pos) + " in '" +
                         s + "'");
    }

    long integer() {
        skip_ws();
        bool neg = eat('-');
        if (!neg) eat('+');
        skip_ws();
        if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
            fail("expected integer");
        long v = 0;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
            v = v * 10 + (s[pos++] - '0');
        return neg ? -v : v;
    }

    std::string word() {
        skip_ws();
        std::string w;
        while (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos]))) w += s[pos++];
        return w;
    }
};

}  // namespace detail

inline TwistorFunctionSpec parse_twistor_spec(const std::string& src) {
    TwistorFunctionSpec spec;
    spec.source = src;
    detail::SpecLexer lex(src);
    bool first = true;
    while (!lex.done()) {
        GaussianRational sign(1);
        if (lex.eat('-'))
            sign = GaussianRational(-1);
        else if (!lex.eat('+') && !first)
            lex.fail("expected '+' or '-' between terms");
        first = false;

        TwistorFunctionSpec::Term term;
        term.coeff = sign;
        bool want_factor = true;
        while (want_factor) {
            GaussianRational base_num;
            bool numeric = false;
            std::string name;
            if (std::isdigit(static_cast<unsigned char>(lex.peek()))) {
                long n = lex.integer();
                long d = 1;
                if (lex.eat('/')) d = lex.integer();
                if (d == 0) lex.fail("zero denominator");
                base_num = GaussianRational(Rational(n) / Rational(d));
                numeric = true;
            } else {
                name = lex.word();
                if (name.empty()) lex.fail("expected factor");
            }
            int e = 1;
            if (lex.eat('^')) e = static_cast<int>(lex.integer());

            if (numeric) {
                if (e < 0) {
                    base_num = GaussianRational(1) / base_num;
                    e = -e;
                }
                for (int j = 0; j < e; ++j) term.coeff *= base_num;
            } else if (name == "i") {
                int r = ((e % 4) + 4) % 4;
                static const GaussianRational table[4] = {
                    GaussianRational(1), GaussianRational::i(), GaussianRational(-1),
                    GaussianRational(Rational(0), Rational(-1))};
                term.coeff *= table[r];
            } else if (name == "t") {
                term.e_t += e;
            } else if (name == "hbar") {
                term.e_hbar += e;
            } else if (name == "lam") {
                term.e_lam += e;
            } else if (name == "Pw") {
                term.e_pw += e;
            } else if (name == "Pz") {
                term.e_pz += e;
            } else if (name == "q") {
                term.mono[VQ] += e;
            } else if (name == "p") {
                term.mono[VP] += e;
            } else if (name == "w") {
                term.mono[VW] += e;
            } else if (name == "z") {
                term.mono[VZ] += e;
            } else if (name == "wt") {
                term.mono[VWT] += e;
            } else if (name == "zt") {
                term.mono[VZT] += e;
            } else {
                lex.fail("unknown factor '" + name + "'");
            }
            want_factor = lex.eat('*');
        }
        if (term.e_t < 0) lex.fail("negative power of t");
        if (term.e_pw < 0 || term.e_pz < 0) lex.fail("negative power of Pw/Pz");
        for (int v = 0; v < kNumVars; ++v)
            if (term.mono[static_cast<size_t>(v)] < 0) lex.fail("negative variable exponent");
        spec.terms.push_back(term);
    }
    if (spec.terms.empty()) throw ParseError("twistor spec: empty expression");
    return spec;
}

namespace detail {

template <class S>
S convert_scalar(const GaussianRational& c) {
    if constexpr (scalar_traits<S>::exact)
        return c;
    else
        return scalar_traits<GaussianRational>::to_complex(c);
}

}  // namespace detail

/// Evaluate a spec over the flat incidence coordinates Pw = wt - lam z,
/// Pz = zt + lam w, expanding the binomials into explicit lambda powers.
template <class S>
SpectralSeries<S> evaluate_spec(const TwistorFunctionSpec& spec, int t_max, int k_max) {
    using T = scalar_traits<S>;
    SpectralSeries<S> out(t_max, k_max, Chart::Annulus);
    for (const auto& term : spec.terms) {
        const S coeff = detail::convert_scalar<S>(term.coeff);
        // binomial rows of Pw^a and Pz^b
        for (int r = 0; r <= term.e_pw; ++r) {
            for (int s = 0; s <= term.e_pz; ++s) {
                S c = coeff;
                // C(a,r) (-1)^r and C(b,s)
                S binom = T::one();
                for (int j = 0; j < r; ++j) binom *= T::from_ratio(term.e_pw - j, j + 1);
                if (r % 2 == 1) binom = -binom;
                for (int j = 0; j < s; ++j) binom *= T::from_ratio(term.e_pz - j, j + 1);
                c *= binom;
                Mono m = term.mono;
                m[VWT] += term.e_pw - r;
                m[VZ] += r;
                m[VZT] += term.e_pz - s;
                m[VW] += s;
                auto coeff_ring = RingElement<S>(Polynomial<S>(m, c));
                out.add(term.e_lam + r + s,
                        series_term(t_max, k_max, term.e_t, term.e_hbar, coeff_ring));
            }
        }
    }
    return out;
}

template <class S>
SpectralSeries<S> evaluate_spec(const std::string& src, int t_max, int k_max) {
    return evaluate_spec<S>(parse_twistor_spec(src), t_max, k_max);
}

}  // namespace heavenly
