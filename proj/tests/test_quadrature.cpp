#include <doctest.h>

#include <cmath>

#include <roughfou/errors.hpp>
#include <roughfou/quadrature.hpp>

using namespace roughfou;

namespace {
constexpr double kPi = 3.14159265358979323846264338327950;
}

TEST_SUITE("quadrature") {

// ---- adaptive Gauss-Kronrod ----

TEST_CASE("integrate reproduces smooth closed forms") {
    QuadratureSpec spec;
    double err = -1.0;

    const double i1 = integrate([](double x) { return x * x; }, 0.0, 1.0, spec, &err);
    CHECK(std::abs(i1 - 1.0 / 3.0) <= 1e-14);
    CHECK(err >= 0.0);
    CHECK(err <= 1e-10);

    const double i2 = integrate([](double x) { return std::sin(x); }, 0.0, kPi, spec);
    CHECK(std::abs(i2 - 2.0) <= 1e-12);

    const double i3 =
        integrate([](double x) { return std::exp(-x * x); }, -6.0, 6.0, spec);
    CHECK(std::abs(i3 - std::sqrt(kPi)) <= 1e-12);
}

TEST_CASE("integrate respects orientation and degenerate intervals") {
    QuadratureSpec spec;
    const double fwd = integrate([](double x) { return x; }, 0.0, 2.0, spec);
    const double rev = integrate([](double x) { return x; }, 2.0, 0.0, spec);
    CHECK(std::abs(fwd - 2.0) <= 1e-13);
    CHECK(std::abs(fwd + rev) <= 1e-13);
    CHECK(integrate([](double) { return 1.0; }, 1.5, 1.5, spec) == 0.0);
}

TEST_CASE("integrate throws ToleranceError when the budget cannot be met") {
    // x^{-1/2} is integrable but needs deep bisection near 0; two levels are
    // not enough for an absolute target of 1e-12
    QuadratureSpec tight;
    tight.abs_tol = 1e-12;
    tight.rel_tol = 1e-12;
    tight.max_subdivisions = 2;
    bool threw = false;
    try {
        integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, tight);
    } catch (const ToleranceError& e) {
        threw = true;
        CHECK(e.achieved > e.requested);
        CHECK(e.requested > 0.0);
    }
    CHECK(threw);
}

// ---- Gauss-Hermite ----

TEST_CASE("gauss_hermite nodes and weights match normal moments") {
    const GaussHermite& gh = gauss_hermite(8);
    REQUIRE(gh.node.size() == 8);
    REQUIRE(gh.weight.size() == 8);

    double w = 0.0, m1 = 0.0, m2 = 0.0, m4 = 0.0, m6 = 0.0;
    for (int i = 0; i < 8; ++i) {
        w += gh.weight[i];
        const double z = gh.node[i];
        m1 += gh.weight[i] * z;
        m2 += gh.weight[i] * z * z;
        m4 += gh.weight[i] * z * z * z * z;
        m6 += gh.weight[i] * std::pow(z, 6.0);
    }
    CHECK(std::abs(w - 1.0) <= 1e-14);
    CHECK(std::abs(m1) <= 1e-13);          // odd moments vanish by symmetry
    CHECK(std::abs(m2 - 1.0) <= 1e-12);    // E[Z^2]
    CHECK(std::abs(m4 - 3.0) <= 1e-11);    // E[Z^4]
    CHECK(std::abs(m6 - 15.0) <= 1e-10);   // E[Z^6], still exact at 8 nodes

    // nodes come out sorted and symmetric about zero
    for (std::size_t i = 1; i < gh.node.size(); ++i) CHECK(gh.node[i] > gh.node[i - 1]);
    for (std::size_t i = 0; i < gh.node.size(); ++i) {
        CHECK(std::abs(gh.node[i] + gh.node[gh.node.size() - 1 - i]) <= 1e-13);
    }
}

TEST_CASE("gauss_hermite rejects nonpositive node counts") {
    CHECK_THROWS_AS(gauss_hermite(0), DomainError);
    CHECK_THROWS_AS(gauss_hermite(-3), DomainError);
}

// ---- node-doubled normal expectation ----

TEST_CASE("expect_normal matches Gaussian closed forms") {
    QuadratureSpec spec;
    double err = -1.0;

    const double e_cos = expect_normal([](double z) { return std::cos(z); }, spec, 32, 512, &err);
    CHECK(std::abs(e_cos - std::exp(-0.5)) <= 1e-12);
    CHECK(err >= 0.0);

    const double e_sq = expect_normal([](double z) { return z * z; }, spec);
    CHECK(std::abs(e_sq - 1.0) <= 1e-12);

    const double e_exp = expect_normal([](double z) { return std::exp(z); }, spec);
    CHECK(std::abs(e_exp - std::exp(0.5)) <= 1e-11);
}

TEST_CASE("expect_normal reports non-convergence on a discontinuous integrand") {
    // an off-center indicator converges only algebraically in the node count,
    // far too slowly for an absolute target of 1e-10 by 512 nodes
    QuadratureSpec spec;
    spec.abs_tol = 1e-10;
    spec.rel_tol = 1e-10;
    CHECK_THROWS_AS(expect_normal([](double z) { return z > 1.0 ? 1.0 : 0.0; }, spec),
                    ToleranceError);
}

}  // TEST_SUITE
