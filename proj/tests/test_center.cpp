#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "holocenter/center.hpp"

using namespace holocenter;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const cxd kI(0.0, 1.0);

Monomial mono(cxd c, std::vector<int> e) { return Monomial{c, std::move(e)}; }

PolynomialMap spiral2d() {
    return PolynomialMap(
        2, {{mono(kI, {1, 0})}, {mono(cxd(-1.0, 0.0), {0, 1}), mono(cxd(1.0, 0.0), {2, 0})}});
}

PolynomialMap linear2d(cxd a, cxd b) {
    return PolynomialMap(2, {{mono(a, {1, 0})}, {mono(b, {0, 1})}});
}

PolynomialMap gregor() {
    return PolynomialMap(1, {{mono(kI, {1}), mono(cxd(1.0, 0.0), {2})}});
}

IntegratorConfig tight() {
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-14;
    return cfg;
}

}  // namespace

TEST_CASE("analyze_spectrum: omega selection and resonance verdicts") {
    // diag(i, -1): ratio is -1/i = i, not a real integer
    const SpectralReport a = analyze_spectrum(linear2d(kI, cxd(-1.0, 0.0)));
    REQUIRE(a.omega.has_value());
    CHECK(*a.omega == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.thm11_necessary);
    CHECK(a.thm12_ok);
    CHECK(a.thm13_ok);

    // diag(i, 2i): ratio 2 violates both conditions
    const SpectralReport b = analyze_spectrum(linear2d(kI, 2.0 * kI));
    REQUIRE(b.omega.has_value());
    CHECK(*b.omega == doctest::Approx(2.0));  // largest |Im| wins
    CHECK(!b.thm12_ok);
    CHECK(!b.thm13_ok);
    REQUIRE(!b.offending.empty());
    CHECK(b.offending.front().nearest_integer != 0);

    // diag(1, 2): no pure imaginary eigenvalue at all
    const SpectralReport c = analyze_spectrum(linear2d(cxd(1.0, 0.0), cxd(2.0, 0.0)));
    CHECK(!c.thm11_necessary);
    CHECK(!c.omega.has_value());
    CHECK(!c.thm12_ok);
    CHECK(!c.thm13_ok);

    // diag(i, -i): the ratio -1 is excluded by 1.3 but allowed by 1.2
    const SpectralReport d = analyze_spectrum(linear2d(kI, -kI));
    REQUIRE(d.omega.has_value());
    CHECK(d.thm12_ok);
    CHECK(!d.thm13_ok);

    // thm13 implies thm12 structurally on a small zoo
    for (const auto& rep : {a, b, c, d})
        if (rep.thm13_ok) CHECK(rep.thm12_ok);
}

TEST_CASE("analyze_spectrum: requires a singular origin") {
    PolynomialMap affine(1, {{mono(cxd(1.0, 0.0), {0}), mono(kI, {1})}});
    CHECK_THROWS_AS(analyze_spectrum(affine), InvalidInput);
}

TEST_CASE("accumulation_probe: center field hits at every scale") {
    const PolynomialMap f = spiral2d();
    const ProbeReport rep = accumulation_probe(f, 1.0, {1e-1, 1e-2, 1e-3, 1e-4});
    CHECK(rep.found_at_every_scale());
    for (const ProbeScale& s : rep.scales) {
        REQUIRE(s.found);
        CHECK(s.witness_norm > 0.0);
        CHECK(s.witness_norm <= s.scale);
    }
}

TEST_CASE("accumulation_probe: pure rotation finds fixed points trivially") {
    PolynomialMap rot(1, {{mono(kI, {1})}});
    const ProbeReport rep = accumulation_probe(rot, 1.0, {1e-1, 1e-3});
    CHECK(rep.found_at_every_scale());
}

TEST_CASE("accumulation_probe: linear growth field finds nothing") {
    PolynomialMap lin(1, {{mono(cxd(1.0, 0.0), {1})}});
    IntegratorConfig icfg;
    icfg.escape_radius = 1000.0;
    const ProbeReport rep = accumulation_probe(lin, 1.0, {1e-1, 1e-2, 1e-3, 1e-4}, icfg);
    CHECK(rep.found_at_no_scale());
}

TEST_CASE("build_disk: closed-form quadratic disk of (iz, -w+z^2)") {
    const PolynomialMap f = spiral2d();
    const SpectralReport spec = analyze_spectrum(f);
    REQUIRE(spec.thm13_ok);
    const DiskModel disk = build_disk(f, spec, 0.05, 6, tight());
    CHECK(disk.period == doctest::Approx(kTwoPi));
    REQUIRE(disk.coeffs.size() == 1);
    REQUIRE(disk.coeffs[0].size() == 6);

    const cxd expected = cxd(1.0, 0.0) / cxd(1.0, 2.0);
    CHECK(std::abs(disk.coeffs[0][1] - expected) <= 1e-6);
    for (size_t k = 0; k < 6; ++k)
        if (k != 1) CHECK(std::abs(disk.coeffs[0][k]) <= 1e-6);
    CHECK(disk.residual_max <= 1e-8);
}

TEST_CASE("build_disk: invariant axis of (iz, -w) has a zero-coefficient model") {
    const PolynomialMap f = linear2d(kI, cxd(-1.0, 0.0));
    const SpectralReport spec = analyze_spectrum(f);
    const DiskModel disk = build_disk(f, spec, 0.05, 6, tight());
    for (const auto& row : disk.coeffs)
        for (const cxd& c : row) CHECK(std::abs(c) <= 1e-9);
}

TEST_CASE("build_disk: 1-D field gives the parameter disk itself") {
    const PolynomialMap f = gregor();
    const SpectralReport spec = analyze_spectrum(f);
    const DiskModel disk = build_disk(f, spec, 0.1, 6, tight());
    CHECK(disk.coeffs.empty());
    CHECK(disk.dim() == 1);
}

TEST_CASE("build_disk: uniqueness witness, degree d vs d+2") {
    const PolynomialMap f = spiral2d();
    const SpectralReport spec = analyze_spectrum(f);
    const DiskModel d6 = build_disk(f, spec, 0.05, 6, tight());
    const DiskModel d8 = build_disk(f, spec, 0.05, 8, tight());
    for (size_t k = 0; k < 6; ++k)
        CHECK(std::abs(d6.coeffs[0][k] - d8.coeffs[0][k]) <= 1e-6);
}

TEST_CASE("build_disk: structural absence of constant terms (x_l(0) = 0)") {
    // the model stores coefficients for k = 1..degree only; evaluating the
    // disk at x1 = 0 must give the origin
    const PolynomialMap f = spiral2d();
    const DiskModel disk = build_disk(f, analyze_spectrum(f), 0.05, 6, tight());
    CHECK(disk.point(cxd(0.0, 0.0)).norm() == 0.0);
}

TEST_CASE("verify_disk: period 2pi passes, shorter candidates fail loudly") {
    const PolynomialMap f = spiral2d();
    const DiskModel disk = build_disk(f, analyze_spectrum(f), 0.05, 6, tight());
    const PeriodicityReport rep = verify_disk(f, disk, 2.0, tight());
    CHECK(rep.mstar == 3);
    REQUIRE(rep.minimality.size() == 2);  // k = 2, 3
    CHECK(rep.max_return_error <= 1e-7);
    for (double v : rep.minimality) CHECK(v >= 1e-3);
    CHECK(rep.pass);
    CHECK(rep.samples.size() >= 16);
}

TEST_CASE("verify_disk: invariant axis disk w = 0") {
    const PolynomialMap f = linear2d(kI, cxd(-1.0, 0.0));
    const DiskModel disk = build_disk(f, analyze_spectrum(f), 0.05, 6, tight());
    const PeriodicityReport rep = verify_disk(f, disk, 2.0, tight());
    CHECK(rep.max_return_error <= 1e-8);
    // at period/2 the first coordinate is antipodal: error ~ 2|x1| >= delta/2
    for (double v : rep.minimality) CHECK(v >= 1e-3);
    CHECK(rep.pass);
}

TEST_CASE("verify_disk: Gregor parameter disk is isochronous") {
    const PolynomialMap f = gregor();
    const DiskModel disk = build_disk(f, analyze_spectrum(f), 0.1, 6, tight());
    const PeriodicityReport rep = verify_disk(f, disk, 2.0, tight());
    CHECK(rep.max_return_error <= 1e-8);
    CHECK(rep.pass);
}

TEST_CASE("corollary consistency: disk success implies probe success below delta") {
    const PolynomialMap f = spiral2d();
    const DiskModel disk = build_disk(f, analyze_spectrum(f), 0.05, 6, tight());
    REQUIRE(disk.residual_max <= 1e-8);
    const ProbeReport probe =
        accumulation_probe(f, disk.omega, {disk.delta, disk.delta / 4.0});
    CHECK(probe.found_at_every_scale());
}

TEST_CASE("min_period_scan: rotation closed form") {
    PolynomialMap rot(1, {{mono(kI, {1})}});
    const ScanReport rep = min_period_scan(rot, 0.5, std::numbers::pi, 64);
    CHECK(rep.boundary_min_f == doctest::Approx(0.5).epsilon(1e-9));
    for (const auto& g : rep.grid) {
        const double expected = 2.0 * std::sin(g.t / 2.0) * 0.5 / g.t;
        CHECK(g.ratio == doctest::Approx(expected).epsilon(1e-6));
    }
    CHECK(rep.min_ratio >= 0.318);
    CHECK(rep.pass);
}

TEST_CASE("min_period_scan: T0 must exclude the known period") {
    PolynomialMap rot(1, {{mono(kI, {1})}});
    CHECK_THROWS_AS(min_period_scan(rot, 0.5, kTwoPi, 16), InvalidInput);
}

TEST_CASE("min_period_scan: gregor field stays above the threshold") {
    const ScanReport rep = min_period_scan(gregor(), 0.5, 1.0, 64);
    CHECK(rep.min_ratio >= 0.1);
    CHECK(rep.pass);
}

TEST_CASE("min_period_scan: singularity on the sphere is rejected") {
    // F(z) = z(z - 0.5) vanishes at 0.5, which lies on the sphere rho = 0.5
    PolynomialMap f(1, {{mono(cxd(-0.5, 0.0), {1}), mono(cxd(1.0, 0.0), {2})}});
    CHECK_THROWS_AS(min_period_scan(f, 0.5, 0.5, 256), PreconditionFailed);
}

TEST_CASE("theorem 1.1 necessity witness: no omega, no accumulation") {
    const PolynomialMap f = linear2d(cxd(1.0, 0.0), cxd(-1.0, 0.0));
    const SpectralReport spec = analyze_spectrum(f);
    CHECK(!spec.omega.has_value());
    IntegratorConfig icfg;
    icfg.escape_radius = 1000.0;
    const ProbeReport probe = accumulation_probe(f, 1.0, {1e-2, 1e-3, 1e-4}, icfg);
    CHECK(probe.found_at_no_scale());
}

TEST_CASE("theorem 1.3 witness: build + verify succeed on the test fields") {
    for (const PolynomialMap& f : {spiral2d(), linear2d(kI, cxd(-1.0, 0.0))}) {
        const SpectralReport spec = analyze_spectrum(f);
        REQUIRE(spec.thm13_ok);
        const DiskModel disk = build_disk(f, spec, 0.05, 6, tight());
        const PeriodicityReport rep = verify_disk(f, disk, 2.0, tight());
        CHECK(rep.pass);
    }
}
