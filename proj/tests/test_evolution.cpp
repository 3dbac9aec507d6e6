#include <catch2/catch_amalgamated.hpp>

#include <numbers>

#include "normext/evolution.hpp"
#include "normext/weights.hpp"

using namespace normext;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double kPi = std::numbers::pi;

Propagator scalar_propagator(std::function<double(double)> a, double step = 1e-3) {
    return Propagator(1, [a = std::move(a)](double t) { return MatrixXcd::Constant(1, 1, a(t)); },
                      step);
}

} // namespace

TEST_CASE("constant generator reproduces the matrix exponential") {
    // scalar B = 2pi over a full period returns to the identity
    auto p = scalar_propagator([](double) { return 2.0 * kPi; });
    CHECK_THAT(std::abs(p(0.0, 1.0)(0, 0) - 1.0), WithinAbs(0.0, 1e-12));

    // d = 2 constant Hermitian generator, checked against the eigendecomposition
    MatrixXcd b(2, 2);
    b << 1.0, complexd(0.0, -0.5), complexd(0.0, 0.5), 2.0;
    Propagator q(2, [b](double) { return b; });
    const MatrixXcd expected = unitary_exp_step(b, 0.7);
    CHECK((q(0.0, 0.7) - expected).norm() <= 1e-10);
}

TEST_CASE("linear-in-time scalar generator accumulates the phase integral") {
    // a_i(t) = 2 pi t: the phase over [0,1] is the integral 2 pi t dt = pi,
    // confirmed here by quadrature of the phase integral
    auto w = WeightFunction::constant(1.0);
    auto grid = QuadratureGrid::for_weight(w, 16);
    double phase = 0.0;
    for (std::size_t q = 0; q < grid.size(); ++q) phase += grid.weights[q] * 2.0 * kPi * grid.nodes[q];
    CHECK_THAT(phase, WithinAbs(kPi, 1e-12));

    auto p = scalar_propagator([](double t) { return 2.0 * kPi * t; });
    CHECK_THAT(std::abs(p(0.0, 1.0)(0, 0) - std::polar(1.0, -phase)), WithinAbs(0.0, 1e-8));
    CHECK_THAT(std::abs(p(0.0, 1.0)(0, 0) + 1.0), WithinAbs(0.0, 1e-8));
}

TEST_CASE("zero generator is the identity at all times") {
    Propagator p(2, nullptr, 1e-2);
    for (double s : {0.0, 0.3, 0.9})
        for (double t : {0.1, 0.5, 1.0})
            CHECK((p(s, t) - MatrixXcd::Identity(2, 2)).norm() <= 1e-14);
}

TEST_CASE("propagation rejects times outside [0,1]") {
    auto p = scalar_propagator([](double t) { return t; }, 1e-2);
    CHECK_THROWS_AS(p(-0.1, 0.5), DomainError);
    CHECK_THROWS_AS(p(0.0, 1.5), DomainError);
}

TEST_CASE("unitarity and cocycle defects stay at roundoff scale") {
    SECTION("constant generator") {
        auto p = scalar_propagator([](double) { return 2.0 * kPi; });
        auto rep = p.unitarity_report();
        CHECK(rep.max_unitarity_defect <= 1e-12);
        CHECK(rep.max_cocycle_defect <= 1e-12);
    }
    SECTION("linear scalar generator") {
        auto p = scalar_propagator([](double t) { return 2.0 * kPi * t; });
        auto rep = p.unitarity_report();
        CHECK(rep.max_unitarity_defect <= 1e-8);
        CHECK(rep.max_cocycle_defect <= 1e-8);
    }
    SECTION("commuting 2x2 family") {
        MatrixXcd d0(2, 2);
        d0 << 1.0, 0.0, 0.0, 2.0;
        Propagator p(2, [d0](double t) { return ((1.0 + t) * d0).eval(); });
        auto rep = p.unitarity_report();
        CHECK(rep.max_unitarity_defect <= 1e-8);
        CHECK(rep.max_cocycle_defect <= 1e-8);
        // closed form U(t,s) = exp(-i diag(1,2) (t + t^2/2 - s - s^2/2))
        auto phase = [](double t) { return t + 0.5 * t * t; };
        const double ph = phase(0.8) - phase(0.25);
        MatrixXcd expected = MatrixXcd::Zero(2, 2);
        expected(0, 0) = std::polar(1.0, -ph);
        expected(1, 1) = std::polar(1.0, -2.0 * ph);
        CHECK((p(0.25, 0.8) - expected).norm() <= 1e-8);
    }
}

TEST_CASE("reversed arguments give the adjoint and the inverse") {
    auto p = scalar_propagator([](double t) { return std::sin(3.0 * t); });
    const MatrixXcd fwd = p(0.2, 0.9);
    const MatrixXcd bwd = p(0.9, 0.2);
    CHECK((fwd.adjoint() - bwd).norm() <= 1e-12);
    CHECK((fwd * bwd - MatrixXcd::Identity(1, 1)).norm() <= 1e-8);
}

TEST_CASE("halving the step shows second-order convergence") {
    // non-commuting 2x2 family so the midpoint error is genuinely O(h^2)
    MatrixXcd sx(2, 2), sz(2, 2);
    sx << 0.0, 1.0, 1.0, 0.0;
    sz << 1.0, 0.0, 0.0, -1.0;
    auto gen = [sx, sz](double t) { return (std::cos(2.0 * t) * sx + t * sz).eval(); };

    auto err = [&](double h) {
        Propagator p(2, gen, h);
        Propagator ref(2, gen, h / 8.0);
        return (p(0.0, 1.0) - ref(0.0, 1.0)).norm();
    };
    const double e1 = err(0.02), e2 = err(0.01);
    CHECK(e1 / e2 > 3.0);
    CHECK(e1 / e2 < 5.0);
}

TEST_CASE("cached endpoint queries agree with fresh marching") {
    auto p = scalar_propagator([](double t) { return std::exp(t); }, 1e-3);
    for (double t : {0.1, 0.377, 0.5, 0.9991, 1.0})
        CHECK((p.at(t) - p(0.0, t)).norm() <= 1e-9);
}
