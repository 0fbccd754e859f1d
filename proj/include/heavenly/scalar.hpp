#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <complex>
#include <cstdint>
#include <string>

namespace heavenly {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Gaussian rational: exact complex number with rational real and
/// imaginary parts.  Arithmetic never rounds.
struct GaussianRational {
    Rational re;
    Rational im;

    GaussianRational() = default;
    GaussianRational(long r) : re(r), im(0) {}
    GaussianRational(Rational r) : re(std::move(r)), im(0) {}
    GaussianRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

    static GaussianRational i() { return {Rational(0), Rational(1)}; }

    friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend GaussianRational operator-(const GaussianRational& a) { return {-a.re, -a.im}; }
    friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
        Rational n = b.re * b.re + b.im * b.im;
        return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
    }
    GaussianRational& operator+=(const GaussianRational& o) { return *this = *this + o; }
    GaussianRational& operator-=(const GaussianRational& o) { return *this = *this - o; }
    GaussianRational& operator*=(const GaussianRational& o) { return *this = *this * o; }
    GaussianRational& operator/=(const GaussianRational& o) { return *this = *this / o; }

    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }
};

/// Scalar traits shared by the exact (GaussianRational) and float
/// (std::complex<double>) coefficient modes.
template <class S>
struct scalar_traits;

template <>
struct scalar_traits<GaussianRational> {
    static constexpr bool exact = true;
    static GaussianRational zero() { return GaussianRational(0); }
    static GaussianRational one() { return GaussianRational(1); }
    static GaussianRational i() { return GaussianRational::i(); }
    static GaussianRational from_int(long n) { return GaussianRational(n); }
    static GaussianRational from_ratio(long n, long d) {
        return GaussianRational(Rational(n) / Rational(d));
    }
    static bool is_zero(const GaussianRational& s) { return s.re == 0 && s.im == 0; }
    static double abs(const GaussianRational& s) {
        return std::abs(std::complex<double>(static_cast<double>(s.re), static_cast<double>(s.im)));
    }
    static std::complex<double> to_complex(const GaussianRational& s) {
        return {static_cast<double>(s.re), static_cast<double>(s.im)};
    }
};

template <>
struct scalar_traits<std::complex<double>> {
    static constexpr bool exact = false;
    static std::complex<double> zero() { return {0.0, 0.0}; }
    static std::complex<double> one() { return {1.0, 0.0}; }
    static std::complex<double> i() { return {0.0, 1.0}; }
    static std::complex<double> from_int(long n) { return {static_cast<double>(n), 0.0}; }
    static std::complex<double> from_ratio(long n, long d) {
        return {static_cast<double>(n) / static_cast<double>(d), 0.0};
    }
    static bool is_zero(const std::complex<double>& s) { return s.real() == 0.0 && s.imag() == 0.0; }
    static double abs(const std::complex<double>& s) { return std::abs(s); }
    static std::complex<double> to_complex(const std::complex<double>& s) { return s; }
};

using Complex = std::complex<double>;

inline Complex to_float(const GaussianRational& s) { return scalar_traits<GaussianRational>::to_complex(s); }

}  // namespace heavenly
