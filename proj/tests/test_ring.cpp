#include <catch2/catch_amalgamated.hpp>

#include "heavenly/ring_element.hpp"

using namespace heavenly;

using X = GaussianRational;
using P = Polynomial<X>;
using R = RingElement<X>;

static R var(Var v) { return R::variable(v); }

TEST_CASE("polynomial arithmetic basics") {
    auto q = P::variable(VQ), p = P::variable(VP);
    CHECK((q + p) - p == q);
    CHECK(q * p == p * q);
    CHECK((q + p) * (q - p) == q * q - p * p);
    CHECK(P::one().degree() == 0);
    CHECK(P::zero().degree() == -1);
}

TEST_CASE("derivative and antiderivative") {
    auto q = P::variable(VQ);
    auto f = q * q * q;
    CHECK(f.derivative(VQ) == q.scaled(X(3)) * q);
    CHECK(f.derivative(VP).is_zero());
    CHECK(f.antiderivative(VQ).derivative(VQ) == f);
}

TEST_CASE("exact division") {
    auto w = P::variable(VW), z = P::variable(VZ);
    auto f = (w + z) * (w - z);
    P quot;
    REQUIRE(f.try_divide(w + z, quot));
    CHECK(quot == w - z);
    CHECK_FALSE(f.try_divide(w + P::one(), quot));
}

TEST_CASE("multivariate gcd") {
    auto w = P::variable(VW), z = P::variable(VZ), q = P::variable(VQ);
    auto a = (w + z) * (w + z) * q;
    auto b = (w + z) * z;
    auto g = gcd(a, b);
    CHECK(g == w + z);
    CHECK(gcd(q, z) == P::one());
    CHECK(gcd(P::zero(), b) == b.scaled(X(1) / b.leading().second));
}

TEST_CASE("ring element reduction and normalization") {
    auto w = var(VW), z = var(VZ);
    auto r = (w * w - z * z) / (w + z);
    CHECK(r == w - z);
    // denominator normalized monic
    auto s = R::one() / (w.scaled(X(2)));
    CHECK(s.den() == P::variable(VW));
    CHECK(s.num() == P::constant(X(Rational(1, 2))));
}

TEST_CASE("ring element quotient-rule derivative") {
    auto w = var(VW);
    auto r = R::one() / w;
    auto d = r.derivative(VW);
    CHECK(d == -(R::one() / (w * w)));
}

TEST_CASE("phase variables rejected in denominators") {
    auto q = var(VQ), w = var(VW);
    CHECK_THROWS_AS(w / q, Error);
}

TEST_CASE("antiderivative restrictions") {
    auto w = var(VW), z = var(VZ);
    auto r = z / w;
    CHECK_THROWS_AS(r.antiderivative(VW), NonPolynomialIntegrand);
    CHECK(r.antiderivative(VZ) == z * z / (w.scaled(X(2))));
    auto divisible = (w * w * z) / w;
    CHECK(divisible.antiderivative(VW).derivative(VW) == divisible);
}

TEST_CASE("evaluation") {
    auto r = (var(VQ) + var(VP)) / var(VW);
    std::array<Complex, kNumVars> x{};
    x[VQ] = {1.0, 0.0};
    x[VP] = {2.0, 0.0};
    x[VW] = {2.0, 0.0};
    for (int i = VZ; i < kNumVars; ++i) x[i] = {1.0, 0.0};
    CHECK(std::abs(r.eval(x) - Complex{1.5, 0.0}) < 1e-14);
}
