#pragma once

#include <cmath>
#include <numbers>

#include "heavenly/series.hpp"

namespace heavenly {

/// In-place radix-2 FFT; size must be a power of two.
inline void fft_inplace(std::vector<Complex>& a, bool inverse) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        Complex wl = std::polar(1.0, ang);
        for (size_t i = 0; i < n; i += len) {
            Complex w = 1.0;
            for (size_t j = 0; j < len / 2; ++j) {
                Complex u = a[i + j], v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

/// Unit-circle quadrature grid: nodes tau_j = exp(2 pi i j / N) and
/// staggered targets xi_j = exp(2 pi i (j + 1/2) / N).
struct Contour {
    int N;

    explicit Contour(int n) : N(n) {
        if (n < 64 || (n & (n - 1)) != 0)
            throw Error("Contour: node count must be a power of two >= 64");
    }

    Complex node(int j) const {
        return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / N);
    }
    Complex target(int j) const {
        return std::polar(1.0, 2.0 * std::numbers::pi * (static_cast<double>(j) + 0.5) / N);
    }
    std::vector<Complex> nodes() const {
        std::vector<Complex> v(static_cast<size_t>(N));
        for (int j = 0; j < N; ++j) v[static_cast<size_t>(j)] = node(j);
        return v;
    }
};

/// Fourier coefficients c_k (k stored mod N; k > N/2 means k - N) of
/// node samples: f(tau) = sum_k c_k tau^k.
inline std::vector<Complex> fourier_coeffs(std::vector<Complex> samples) {
    fft_inplace(samples, false);
    for (auto& c : samples) c /= static_cast<double>(samples.size());
    return samples;
}

inline int signed_wavenumber(int k, int N) { return k <= N / 2 ? k : k - N; }

/// Evaluate the trigonometric interpolant at the staggered targets.
inline std::vector<Complex> interp_to_targets(const std::vector<Complex>& samples) {
    const int N = static_cast<int>(samples.size());
    auto c = fourier_coeffs(samples);
    // phase twist exp(pi i k / N) then inverse transform
    for (int k = 0; k < N; ++k) {
        int sk = signed_wavenumber(k, N);
        c[static_cast<size_t>(k)] *= std::polar(1.0, std::numbers::pi * static_cast<double>(sk) / N);
    }
    fft_inplace(c, true);
    for (auto& x : c) x *= static_cast<double>(N);
    return c;
}

enum class Side { Plus, Minus, Off };

/// Graded series sampled at the contour nodes (float scalar mode).
struct ContourSeries {
    std::vector<GradedSeries<Complex>> values;
    Side side = Side::Off;

    int size() const { return static_cast<int>(values.size()); }
    int t_max() const { return values.at(0).t_max(); }
    int k_max() const { return values.at(0).k_max(); }

    double max_abs() const {
        double m = 0.0;
        for (auto& v : values) m = std::max(m, v.max_abs());
        return m;
    }
};

/// Per-(grade, monomial) node-value streams of a ContourSeries.  Node
/// coefficients must be polynomial (denominator 1).
struct StreamKey {
    Grade g;
    Mono mono;
    friend bool operator<(const StreamKey& a, const StreamKey& b) {
        if (!(a.g == b.g)) return a.g < b.g;
        return GradedLex{}(a.mono, b.mono);
    }
};
using StreamMap = std::map<StreamKey, std::vector<Complex>>;

inline StreamMap build_streams(const ContourSeries& cs) {
    StreamMap out;
    const size_t N = cs.values.size();
    for (size_t j = 0; j < N; ++j) {
        for (auto& [g, coeff] : cs.values[j].terms()) {
            if (!coeff.is_polynomial())
                throw Error("contour streams require polynomial node coefficients");
            for (auto& [mono, c] : coeff.num().terms()) {
                auto& stream = out[{g, mono}];
                if (stream.empty()) stream.resize(N, Complex{0.0, 0.0});
                stream[j] = c;
            }
        }
    }
    return out;
}

inline ContourSeries from_streams(const StreamMap& streams, int N, int t_max, int k_max, Side side) {
    ContourSeries cs;
    cs.side = side;
    cs.values.assign(static_cast<size_t>(N), GradedSeries<Complex>(t_max, k_max));
    for (auto& [key, vals] : streams)
        for (int j = 0; j < N; ++j) {
            Complex c = vals[static_cast<size_t>(j)];
            if (c != Complex{0.0, 0.0})
                cs.values[static_cast<size_t>(j)].add(
                    key.g, RingElement<Complex>(Polynomial<Complex>(key.mono, c)));
        }
    return cs;
}

/// (1/2 pi i) oint f(tau)/(tau - lambda) dtau by the trapezoid rule,
/// spectrally accurate for analytic node data.
inline GradedSeries<Complex> cauchy_transform(const ContourSeries& f, Complex lambda,
                                              const Contour& contour) {
    if (std::abs(std::abs(lambda) - 1.0) < 1e-3)
        throw GuardBand("cauchy_transform: evaluation point within the contour guard band");
    auto streams = build_streams(f);
    auto taus = contour.nodes();
    GradedSeries<Complex> out(f.t_max(), f.k_max());
    for (auto& [key, vals] : streams) {
        Complex acc = 0.0;
        for (int j = 0; j < contour.N; ++j)
            acc += vals[static_cast<size_t>(j)] * taus[static_cast<size_t>(j)] /
                   (taus[static_cast<size_t>(j)] - lambda);
        acc /= static_cast<double>(contour.N);
        if (acc != Complex{0.0, 0.0})
            out.add(key.g, RingElement<Complex>(Polynomial<Complex>(key.mono, acc)));
    }
    return out;
}

/// Gate on Fourier decay of a stream: under-resolved node data is an
/// error, not a silent inaccuracy.
inline void check_fourier_decay(const std::vector<Complex>& coeffs, int N) {
    double scale = 1.0;
    for (auto& c : coeffs) scale = std::max(scale, std::abs(c));
    for (int k = 0; k < N; ++k)
        if (std::abs(signed_wavenumber(k, N)) >= N / 4 &&
            std::abs(coeffs[static_cast<size_t>(k)]) > 1e-12 * scale)
            throw InterpolationOverflow("node data has not decayed below 1e-12 by wavenumber N/4");
}

/// Principal-value transform (1/2 pi i) PV oint f(tau)/(tau - xi) dtau
/// at the staggered targets, via the subtraction technique plus the
/// half-residue PV oint dtau/(tau - xi) = pi i.
inline ContourSeries plemelj_boundary(const ContourSeries& f, const Contour& contour) {
    auto streams = build_streams(f);
    auto taus = contour.nodes();
    const int N = contour.N;
    StreamMap out;
    for (auto& [key, vals] : streams) {
        check_fourier_decay(fourier_coeffs(vals), N);
        auto at_targets = interp_to_targets(vals);
        std::vector<Complex> pv(static_cast<size_t>(N));
        for (int l = 0; l < N; ++l) {
            Complex xi = contour.target(l);
            Complex fxi = at_targets[static_cast<size_t>(l)];
            Complex acc = 0.0;
            for (int j = 0; j < N; ++j)
                acc += (vals[static_cast<size_t>(j)] - fxi) * taus[static_cast<size_t>(j)] /
                       (taus[static_cast<size_t>(j)] - xi);
            pv[static_cast<size_t>(l)] = acc / static_cast<double>(N) + 0.5 * fxi;
        }
        out[key] = std::move(pv);
    }
    return from_streams(out, N, f.t_max(), f.k_max(), Side::Off);
}

/// Node-grid PV transform computed spectrally: the PV of tau^k is
/// +tau^k/2 for k >= 0 and -tau^k/2 for k < 0.
inline std::vector<Complex> pv_at_nodes(const std::vector<Complex>& vals) {
    const int N = static_cast<int>(vals.size());
    auto c = fourier_coeffs(vals);
    for (int k = 0; k < N; ++k) {
        double s = signed_wavenumber(k, N) >= 0 ? 0.5 : -0.5;
        c[static_cast<size_t>(k)] *= s;
    }
    fft_inplace(c, true);
    for (auto& x : c) x *= static_cast<double>(N);
    return c;
}

}  // namespace heavenly
