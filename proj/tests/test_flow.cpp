#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "holocenter/flow.hpp"

using namespace holocenter;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const cxd kI(0.0, 1.0);

Monomial mono(cxd c, std::vector<int> e) { return Monomial{c, std::move(e)}; }

PolynomialMap rotation1d() { return PolynomialMap(1, {{mono(kI, {1})}}); }

PolynomialMap squaring1d() { return PolynomialMap(1, {{mono(cxd(1.0, 0.0), {2})}}); }

PolynomialMap spiral2d() {
    return PolynomialMap(
        2, {{mono(kI, {1, 0})}, {mono(cxd(-1.0, 0.0), {0, 1}), mono(cxd(1.0, 0.0), {2, 0})}});
}

CVec one(cxd z) {
    CVec x(1);
    x(0) = z;
    return x;
}

}  // namespace

TEST_CASE("flow_map: rotation, separable closed form, decoupled linear") {
    CHECK(std::abs(flow_map(rotation1d(), std::numbers::pi, one(cxd(1.0, 0.0)))(0) -
                   cxd(-1.0, 0.0)) <= 1e-10);

    // zdot = z^2 has phi(t, z0) = z0 / (1 - t z0)
    const cxd z0(0.1, 0.0);
    const cxd expected = z0 / (1.0 - 1.0 * z0);
    CHECK(std::abs(flow_map(squaring1d(), 1.0, one(z0))(0) - expected) <= 1e-9);

    PolynomialMap lin(2, {{mono(kI, {1, 0})}, {mono(cxd(-1.0, 0.0), {0, 1})}});
    CVec x0(2);
    x0(0) = cxd(1.0, 0.0);
    x0(1) = cxd(1.0, 0.0);
    const CVec xT = flow_map(lin, kTwoPi, x0);
    CHECK(std::abs(xT(0) - cxd(1.0, 0.0)) <= 1e-9);
    CHECK(std::abs(xT(1) - std::exp(-kTwoPi)) <= 1e-9);
}

TEST_CASE("flow_map: blowup detection and argument checks") {
    // zdot = z^2 from z0 = 0.5 has a pole at t = 2
    CHECK_THROWS_AS(flow_map(squaring1d(), 3.0, one(cxd(0.5, 0.0))), Blowup);
    CHECK_THROWS_AS(flow_map(rotation1d(), -1.0, one(cxd(0.5, 0.0))), InvalidInput);

    IntegratorConfig starved;
    starved.max_steps = 3;
    CVec x2(2);
    x2(0) = cxd(0.1, 0.0);
    x2(1) = cxd(0.1, 0.0);
    CHECK_THROWS_AS(flow_map(spiral2d(), kTwoPi, x2, starved), StepLimit);
}

TEST_CASE("flow property: phi(s+t, x) = phi(t, phi(s, x))") {
    const PolynomialMap f = spiral2d();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 6; ++trial) {
        const double s = unif(rng) * kTwoPi, t = unif(rng) * kTwoPi;
        CVec x(2);
        x(0) = 0.3 * cxd(unif(rng) - 0.5, unif(rng) - 0.5);
        x(1) = 0.3 * cxd(unif(rng) - 0.5, unif(rng) - 0.5);
        const CVec direct = flow_map(f, s + t, x);
        const CVec chained = flow_map(f, t, flow_map(f, s, x));
        CHECK((direct - chained).norm() <= 10.0 * 1e-9 * (1.0 + direct.norm()));
    }
}

TEST_CASE("flow_jacobian: matches the matrix exponential at the origin") {
    // triangular linear part of (iz, -w+z^2): Jacobian at 0 is diag(i, -1)
    const PolynomialMap f = spiral2d();
    const CMat jac = flow_jacobian(f, kTwoPi, CVec::Zero(2));
    CHECK(std::abs(jac(0, 0) - cxd(1.0, 0.0)) <= 1e-8);
    CHECK(std::abs(jac(1, 1) - std::exp(-kTwoPi)) <= 1e-8);
    CHECK(std::abs(jac(0, 1)) <= 1e-8);

    const CMat exact = expm(f.jacobian_at(CVec::Zero(2)), cxd(kTwoPi, 0.0));
    CHECK((jac - exact).norm() <= 1e-8 * std::max(1.0, exact.norm()));

    // F(z) = z^2 at 0: F'(0) = 0, so the flow Jacobian is 1
    CHECK(std::abs(flow_jacobian(squaring1d(), 1.0, CVec::Zero(1))(0, 0) - 1.0) <= 1e-9);
}

TEST_CASE("flow_jacobian: random linear fields reproduce expm, n <= 3") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unif(-0.3, 0.3);
    for (int trial = 0; trial < 6; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 3);
        CMat m(n, n);
        std::vector<std::vector<Monomial>> coords(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                m(i, j) = cxd(unif(rng), unif(rng));
                std::vector<int> e(static_cast<size_t>(n), 0);
                e[static_cast<size_t>(j)] = 1;
                coords[static_cast<size_t>(i)].push_back(mono(m(i, j), e));
            }
        PolynomialMap lin(n, coords);
        const double tau = 0.5 + unif(rng);
        // linear flow: Jacobian is expm everywhere, not only at 0
        CVec x0(n);
        for (int i = 0; i < n; ++i) x0(i) = cxd(unif(rng), unif(rng));
        const CMat jac = flow_jacobian(lin, tau, x0);
        const CMat exact = expm(m, cxd(tau, 0.0));
        CHECK((jac - exact).norm() <= 1e-8 * std::max(1.0, exact.norm()));
    }
}

TEST_CASE("flow_jacobian: complex finite differences, direction independent") {
    const PolynomialMap f = spiral2d();
    CVec x0(2);
    x0(0) = cxd(0.15, 0.05);
    x0(1) = cxd(-0.1, 0.02);
    const double tau = 1.3;
    const CMat jac = flow_jacobian(f, tau, x0);

    // holomorphy: (f(x + h e_j) - f(x - h e_j)) / 2h must agree for real and
    // imaginary step directions
    const double h = 1e-5;
    for (int j = 0; j < 2; ++j) {
        for (const cxd step : {cxd(h, 0.0), cxd(0.0, h), cxd(h / std::sqrt(2.0), h / std::sqrt(2.0))}) {
            CVec xp = x0, xm = x0;
            xp(j) += step;
            xm(j) -= step;
            const CVec col = (flow_map(f, tau, xp) - flow_map(f, tau, xm)) / (2.0 * step);
            for (int i = 0; i < 2; ++i)
                CHECK(std::abs(col(i) - jac(i, j)) <= 1e-6 * std::max(1.0, std::abs(jac(i, j))));
        }
    }
}

TEST_CASE("integrate_trajectory: sampling and endpoint accuracy") {
    const Trajectory tr = integrate_trajectory(rotation1d(), one(cxd(1.0, 0.0)), kTwoPi, 5);
    REQUIRE(tr.times.size() == 5);
    CHECK(tr.times.front() == 0.0);
    CHECK(tr.times.back() == kTwoPi);
    for (const CVec& s : tr.states) CHECK(std::abs(std::abs(s(0)) - 1.0) <= 1e-9);
    CHECK(std::abs(tr.states.back()(0) - cxd(1.0, 0.0)) <= 2e-9);
    for (size_t i = 1; i < tr.times.size(); ++i) CHECK(tr.times[i] > tr.times[i - 1]);

    CHECK_THROWS_AS(integrate_trajectory(rotation1d(), one(cxd(1.0, 0.0)), 0.0, 2),
                    InvalidInput);
    CHECK_THROWS_AS(integrate_trajectory(rotation1d(), one(cxd(1.0, 0.0)), 1.0, 1),
                    InvalidInput);

    // separable closed form along the way
    const Trajectory sq = integrate_trajectory(squaring1d(), one(cxd(0.1, 0.0)), 1.0, 9);
    for (size_t i = 0; i < sq.times.size(); ++i) {
        const cxd expected = cxd(0.1, 0.0) / (1.0 - sq.times[i] * 0.1);
        CHECK(std::abs(sq.states[i](0) - expected) <= 1e-8);
    }
}

TEST_CASE("map_iterate: full rotation in quarters") {
    TimeTMap quarter(rotation1d(), std::numbers::pi / 2.0);
    const CVec x = one(cxd(0.3, 0.1));
    CHECK((map_iterate(quarter, 4, x) - x).norm() <= 1e-9);
    CHECK((map_iterate(quarter, 1, x) - flow_map(rotation1d(), std::numbers::pi / 2.0, x))
              .norm() == 0.0);
    CHECK_THROWS_AS(map_iterate(quarter, 0, x), InvalidInput);
}

TEST_CASE("return_error: rotation closed form") {
    const PolynomialMap f = rotation1d();
    CHECK(return_error(f, kTwoPi, one(cxd(0.4, 0.2))) <= 1e-9);
    CHECK(std::abs(return_error(f, std::numbers::pi, one(cxd(1.0, 0.0))) - 2.0) <= 1e-9);
    for (const double t : {0.5, 1.0, 2.5}) {
        const cxd z(0.3, -0.25);
        const double expected = 2.0 * std::sin(t / 2.0) * std::abs(z);
        CHECK(std::abs(return_error(f, t, one(z)) - expected) <= 1e-9);
    }
}

TEST_CASE("determinism: identical configs give bit-identical flows") {
    const PolynomialMap f = spiral2d();
    CVec x0(2);
    x0(0) = cxd(0.21, -0.07);
    x0(1) = cxd(0.02, 0.13);
    const CVec a = flow_map(f, 3.7, x0);
    const CVec b = flow_map(f, 3.7, x0);
    CHECK(a(0).real() == b(0).real());
    CHECK(a(0).imag() == b(0).imag());
    CHECK(a(1).real() == b(1).real());
    CHECK(a(1).imag() == b(1).imag());
}

TEST_CASE("trajectory CSV: header and 17-digit payload") {
    Trajectory tr;
    tr.times = {0.0, 0.5};
    CVec a(2), b(2);
    a(0) = cxd(1.0 / 3.0, 0.0);
    a(1) = cxd(0.0, -2.0 / 7.0);
    b(0) = cxd(0.25, 0.5);
    b(1) = cxd(1.0, -1.0);
    tr.states = {a, b};
    std::ostringstream os;
    write_trajectory_csv(os, tr);
    const std::string csv = os.str();
    CHECK(csv.find("t,re_1,im_1,re_2,im_2\n") == 0);
    CHECK(csv.find("0.33333333333333331") != std::string::npos);
    CHECK(csv.find("-0.2857142857142857") != std::string::npos);
}
