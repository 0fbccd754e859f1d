#pragma once

#include <json.hpp>

#include "heavenly/background.hpp"
#include "heavenly/gauge.hpp"
#include "heavenly/hierarchy.hpp"
#include "heavenly/spectral.hpp"

namespace heavenly {

using Json = nlohmann::ordered_json;

namespace detail {

inline long long to_ll(const BigInt& v) {
    if (v > std::numeric_limits<long long>::max() || v < std::numeric_limits<long long>::min())
        throw Error("json: rational component exceeds 64-bit range");
    return static_cast<long long>(v);
}

inline Json coeff_json(const GaussianRational& c) {
    return Json::array({to_ll(numerator(c.re)), to_ll(denominator(c.re)), to_ll(numerator(c.im)),
                        to_ll(denominator(c.im))});
}
inline Json coeff_json(const Complex& c) { return Json::array({c.real(), c.imag()}); }

template <class S>
S coeff_from_json(const Json& j);

template <>
inline GaussianRational coeff_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 4) throw ParseError("json: exact coefficient needs 4 entries");
    Rational re(BigInt(j[0].get<long long>()), BigInt(j[1].get<long long>()));
    Rational im(BigInt(j[2].get<long long>()), BigInt(j[3].get<long long>()));
    return {re, im};
}
template <>
inline Complex coeff_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 2) throw ParseError("json: float coefficient needs 2 entries");
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

template <class S>
Json polynomial_to_json(const Polynomial<S>& p) {
    Json arr = Json::array();
    for (auto& [m, c] : p.terms()) {
        Json mono;
        mono["e"] = m;
        mono["c"] = detail::coeff_json(c);
        arr.push_back(mono);
    }
    return arr;
}

template <class S>
Polynomial<S> polynomial_from_json(const Json& j) {
    Polynomial<S> p;
    for (auto& mono : j) {
        Mono m{};
        auto e = mono.at("e");
        if (!e.is_array() || e.size() != kNumVars) throw ParseError("json: monomial needs 6 exponents");
        for (int i = 0; i < kNumVars; ++i) m[static_cast<size_t>(i)] = e[static_cast<size_t>(i)].get<int>();
        p.add_term(m, detail::coeff_from_json<S>(mono.at("c")));
    }
    return p;
}

template <class S>
Json series_to_json(const GradedSeries<S>& s) {
    Json j;
    j["t_max"] = s.t_max();
    j["k_max"] = s.k_max();
    j["terms"] = Json::array();
    for (auto& [g, c] : s.terms()) {
        Json term;
        term["m"] = g.m;
        term["k"] = g.k;
        term["num"] = polynomial_to_json(c.num());
        term["den"] = polynomial_to_json(c.den());
        j["terms"].push_back(term);
    }
    return j;
}

template <class S>
GradedSeries<S> series_from_json(const Json& j) {
    GradedSeries<S> s(j.at("t_max").get<int>(), j.at("k_max").get<int>());
    for (auto& term : j.at("terms")) {
        auto num = polynomial_from_json<S>(term.at("num"));
        auto den = term.contains("den") ? polynomial_from_json<S>(term.at("den"))
                                        : Polynomial<S>::one();
        s.add({term.at("m").get<int>(), term.at("k").get<int>()}, RingElement<S>(num, den));
    }
    return s;
}

template <class S>
Json spectral_to_json(const SpectralSeries<S>& s) {
    Json j;
    j["t_max"] = s.t_max();
    j["k_max"] = s.k_max();
    j["chart"] = s.chart() == Chart::Origin     ? "origin"
                 : s.chart() == Chart::Infinity ? "infinity"
                                                : "annulus";
    j["powers"] = Json::array();
    for (auto& [p, c] : s.terms()) {
        Json entry;
        entry["j"] = p;
        entry["series"] = series_to_json(c);
        j["powers"].push_back(entry);
    }
    return j;
}

template <class S>
SpectralSeries<S> spectral_from_json(const Json& j) {
    std::string ch = j.at("chart").get<std::string>();
    Chart chart = ch == "origin" ? Chart::Origin : ch == "infinity" ? Chart::Infinity : Chart::Annulus;
    SpectralSeries<S> s(j.at("t_max").get<int>(), j.at("k_max").get<int>(), chart);
    for (auto& entry : j.at("powers"))
        s.add(entry.at("j").get<int>(), series_from_json<S>(entry.at("series")));
    return s;
}

/// Background config: {"ref": "flat"|"cubic"} or inline
/// {"potential": poly, "G": poly, "Gt": poly}.
template <class S>
KahlerBackground<S> background_from_json(const Json& j) {
    if (j.contains("ref")) {
        auto name = j.at("ref").get<std::string>();
        if (name == "flat") return flat_background<S>();
        if (name == "cubic") return cubic_background<S>();
        throw ParseError("json: unknown background ref '" + name + "'");
    }
    return build_background<S>(RingElement<S>(polynomial_from_json<S>(j.at("potential"))),
                               RingElement<S>(polynomial_from_json<S>(j.at("G"))),
                               RingElement<S>(polynomial_from_json<S>(j.at("Gt"))));
}

template <class S>
Json background_to_json(const KahlerBackground<S>& bg) {
    Json j;
    j["potential"] = polynomial_to_json(bg.potential.num());
    j["G"] = polynomial_to_json(bg.G.num());
    j["Gt"] = polynomial_to_json(bg.Gt.num());
    return j;
}

template <class S>
Json connection_to_json(const ConnectionData<S>& A) {
    Json j;
    const char* names[4] = {"A_w", "A_z", "A_wt", "A_zt"};
    for (int i = 0; i < 4; ++i) j[names[i]] = series_to_json(A[i]);
    return j;
}

template <class S>
ConnectionData<S> connection_from_json(const Json& j) {
    ConnectionData<S> A;
    const char* names[4] = {"A_w", "A_z", "A_wt", "A_zt"};
    for (int i = 0; i < 4; ++i) A[i] = series_from_json<S>(j.at(names[i]));
    return A;
}

template <class S>
Json tower_to_json(const ChargeTower<S>& tower, const ThetaField<S>& th, const Json& bg_ref) {
    Json j;
    j["kind"] = tower.kind == TowerKind::L ? "L" : "D";
    j["members"] = Json::array();
    for (auto& m : tower.members) j["members"].push_back(series_to_json(m));
    j["theta"] = series_to_json(th.theta);
    j["background"] = bg_ref;
    j["convention"] = tower.convention;
    return j;
}

}  // namespace heavenly
