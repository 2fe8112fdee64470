#include "holocenter/acceptance.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "holocenter/center.hpp"
#include "holocenter/field.hpp"
#include "holocenter/flow.hpp"
#include "holocenter/index.hpp"
#include "holocenter/linalg.hpp"

namespace holocenter::acceptance {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const cxd kI(0.0, 1.0);

Monomial mono(cxd c, std::vector<int> e) { return Monomial{c, std::move(e)}; }

// F(z, w) = (i z, -w + z^2): the workhorse field with the closed-form disk
// w = z^2 / (1 + 2i).
PolynomialMap field_spiral2d() {
    return PolynomialMap(
        2,
        {{mono(kI, {1, 0})}, {mono(cxd(-1.0, 0.0), {0, 1}), mono(cxd(1.0, 0.0), {2, 0})}},
        "spiral2d");
}

// P(z) = i z + z^2 (planar isochronous center).
PolynomialMap field_gregor() {
    return PolynomialMap(1, {{mono(kI, {1}), mono(cxd(1.0, 0.0), {2})}}, "gregor");
}

PolynomialMap map_1d(std::vector<Monomial> monos) { return PolynomialMap(1, {std::move(monos)}); }

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (detail.tellp() > 0) detail << "; ";
            detail << what;
        }
    }
};

CriterionResult finish(const std::string& name, Check& c, const std::string& ok_note = "") {
    CriterionResult r;
    r.name = name;
    r.pass = c.ok;
    r.detail = c.ok ? ok_note : c.detail.str();
    return r;
}

IntegratorConfig tight_integrator() {
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-14;
    return cfg;
}

// ---- criterion 1: Phi_tau'(0) = e^{tau F'(0)} ----------------------------

CriterionResult criterion1() {
    Check c;
    const IntegratorConfig icfg = tight_integrator();

    const PolynomialMap f = field_spiral2d();
    const CMat jac = flow_jacobian(f, kTwoPi, CVec::Zero(2), icfg);
    CMat expected = CMat::Zero(2, 2);
    expected(0, 0) = cxd(1.0, 0.0);
    expected(1, 1) = cxd(std::exp(-kTwoPi), 0.0);
    c.expect((jac - expected).norm() <= 1e-8,
             "flow Jacobian of (iz, -w+z^2) at 0 deviates from diag(1, e^{-2pi})");

    // Five random linear fields, n <= 3: the flow Jacobian must match the
    // matrix exponential of the coefficient matrix.
    std::mt19937_64 rng(20260809ull);
    std::uniform_real_distribution<double> unif(-0.25, 0.25);
    std::uniform_int_distribution<int> dims(1, 3);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = dims(rng);
        CMat m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = cxd(unif(rng), unif(rng));
        std::vector<std::vector<Monomial>> coords(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                std::vector<int> e(static_cast<size_t>(n), 0);
                e[static_cast<size_t>(j)] = 1;
                coords[static_cast<size_t>(i)].push_back(mono(m(i, j), e));
            }
        const PolynomialMap lin(n, coords);
        const CMat numeric = flow_jacobian(lin, kTwoPi, CVec::Zero(n), icfg);
        const CMat exact = expm(m, cxd(kTwoPi, 0.0));
        std::ostringstream msg;
        msg << "random linear field trial " << trial << " exceeds 1e-8 relative error";
        c.expect((numeric - exact).norm() <= 1e-8 * std::max(1.0, exact.norm()), msg.str());
    }
    return finish("C1 flow Jacobian equals matrix exponential of the linear part", c);
}

// ---- criterion 2: isochronous period of iz + z^2 -------------------------

CriterionResult criterion2() {
    Check c;
    const PolynomialMap p = field_gregor();
    const std::vector<cxd> points = {cxd(0.02, 0.0), cxd(0.05, 0.0),
                                     0.1 * std::exp(kI * (std::numbers::pi / 3.0))};
    for (const cxd& z0 : points) {
        CVec x(1);
        x(0) = z0;
        std::ostringstream at;
        at << "z0=(" << z0.real() << "," << z0.imag() << ")";
        c.expect(return_error(p, kTwoPi, x) <= 1e-8, "full period fails at " + at.str());
        for (int k = 2; k <= 3; ++k)
            c.expect(return_error(p, kTwoPi / k, x) >= 1e-3,
                     "period/" + std::to_string(k) + " not excluded at " + at.str());
    }
    return finish("C2 Gregor isochronicity: period 2pi, no period 2pi/k", c);
}

// ---- criterion 3: index suite vs oracles ---------------------------------

CriterionResult criterion3() {
    Check c;
    IndexConfig cfg;
    BallRegion region{CVec::Zero(1), 0.5};

    {
        PolyMapFn f(map_1d({mono(cxd(2.0, 0.0), {1})}));
        const IndexResult r = fixed_point_index(f, CVec::Zero(1), region, cfg);
        c.expect(!r.undetermined(), "2z: undetermined");
        c.expect(r.value == 1, "2z: index != 1");
        c.expect(series_order_1d(map_1d({mono(cxd(2.0, 0.0), {1})}), 1) == 1,
                 "2z: oracle != 1");
    }
    {
        PolynomialMap fmap = map_1d({mono(cxd(1.0, 0.0), {1}), mono(cxd(1.0, 0.0), {3})});
        PolyMapFn f(fmap);
        const IndexResult r = fixed_point_index(f, CVec::Zero(1), region, cfg);
        c.expect(!r.undetermined(), "z+z^3: undetermined");
        c.expect(r.value == 3, "z+z^3: index != 3");
        c.expect(series_order_1d(fmap, 1) == 3, "z+z^3: oracle != 3");
    }
    {
        // f(x,y) = (x + y^2, y + x^2); f - I = (y^2, x^2). Oracle: solutions
        // of y^2 = q1, x^2 = q2 by direct square roots.
        PolynomialMap fmap(2, {{mono(cxd(1.0, 0.0), {1, 0}), mono(cxd(1.0, 0.0), {0, 2})},
                               {mono(cxd(1.0, 0.0), {0, 1}), mono(cxd(1.0, 0.0), {2, 0})}});
        PolyMapFn f(fmap);
        IndexConfig cfg2 = cfg;
        cfg2.starts_per_dim = 12;
        BallRegion region2{CVec::Zero(2), 0.5};
        const IndexResult r = fixed_point_index(f, CVec::Zero(2), region2, cfg2);
        c.expect(!r.undetermined(), "2-D map: undetermined");
        c.expect(r.value == 4, "2-D map: index != 4");

        const cxd q1 = r.q_used(0), q2 = r.q_used(1);
        int oracle = 0;
        for (int s1 = -1; s1 <= 1; s1 += 2)
            for (int s2 = -1; s2 <= 1; s2 += 2) {
                CVec sol(2);
                sol(0) = static_cast<double>(s2) * std::sqrt(q2);
                sol(1) = static_cast<double>(s1) * std::sqrt(q1);
                if (sol.norm() <= region2.radius) ++oracle;
            }
        c.expect(r.value == oracle, "2-D map: engine disagrees with brute-force oracle");
    }
    return finish("C3 fixed-point indices 1 / 3 / 4 match their oracles, all certified", c);
}

// ---- criterion 4: iterated indices exceed the period ---------------------

CriterionResult criterion4() {
    Check c;
    IndexConfig cfg;
    BallRegion region{CVec::Zero(1), 0.5};

    {
        PolynomialMap f = map_1d({mono(cxd(-1.0, 0.0), {1}), mono(cxd(1.0, 0.0), {2})});
        const IndexResult r = iterated_index(f, 2, CVec::Zero(1), region, cfg);
        c.expect(!r.undetermined(), "m=2: undetermined");
        c.expect(r.value == 3, "m=2: index != 3");
        c.expect(series_order_1d(f, 2) == 3, "m=2: oracle != 3");
        c.expect(r.value > 2, "m=2: index not > m");
    }
    {
        const cxd lam = std::exp(kI * (kTwoPi / 3.0));
        PolynomialMap f = map_1d({mono(lam, {1}), mono(cxd(1.0, 0.0), {2})});
        const IndexResult r = iterated_index(f, 3, CVec::Zero(1), region, cfg);
        c.expect(!r.undetermined(), "m=3: undetermined");
        c.expect(r.value == 4, "m=3: index != 4");
        c.expect(series_order_1d(f, 3) == 4, "m=3: oracle != 4");
        c.expect(r.value > 3, "m=3: index not > m");
    }
    return finish("C4 iterated indices 3 (m=2) and 4 (m=3), both above m and matching oracle",
                  c);
}

// ---- criterion 5: the closed-form disk of (iz, -w+z^2) --------------------

CriterionResult criterion5() {
    Check c;
    const PolynomialMap f = field_spiral2d();
    const IntegratorConfig icfg = tight_integrator();

    const SpectralReport spec = analyze_spectrum(f);
    c.expect(spec.omega.has_value(), "no omega found");
    c.expect(spec.thm13_ok, "resonance check failed unexpectedly");
    if (!spec.omega) return finish("C5 closed-form analytic disk", c);

    const DiskModel disk = build_disk(f, spec, 0.05, 6, icfg);
    const cxd expected = cxd(1.0, 0.0) / cxd(1.0, 2.0);  // 0.2 - 0.4i
    for (size_t k = 0; k < disk.coeffs[0].size(); ++k) {
        const cxd got = disk.coeffs[0][k];
        if (k == 1) {
            std::ostringstream msg;
            msg << "c_{2,2} off by " << std::abs(got - expected);
            c.expect(std::abs(got - expected) <= 1e-6, msg.str());
        } else {
            std::ostringstream msg;
            msg << "spurious |c_{2," << (k + 1) << "}| = " << std::abs(got);
            c.expect(std::abs(got) <= 1e-6, msg.str());
        }
    }

    const PeriodicityReport ver = verify_disk(f, disk, 2.0, icfg);
    c.expect(ver.max_return_error <= 1e-7, "max return error above 1e-7");
    c.expect(!ver.minimality.empty(), "no minimality entries");
    for (double v : ver.minimality)
        c.expect(v >= 1e-3, "a shorter candidate period was not excluded");
    return finish("C5 disk of (iz, -w+z^2): c_{2,2} = 0.2-0.4i, periodic at 2pi, minimal", c);
}

// ---- criterion 6: necessity control --------------------------------------

CriterionResult criterion6() {
    Check c;
    // F = (z, -w): hyperbolic, no pure-imaginary eigenvalue.
    PolynomialMap f(2, {{mono(cxd(1.0, 0.0), {1, 0})}, {mono(cxd(-1.0, 0.0), {0, 1})}},
                    "hyperbolic-control");
    const SpectralReport spec = analyze_spectrum(f);
    c.expect(!spec.thm11_necessary, "spectrum reports a pure-imaginary eigenvalue");
    c.expect(!spec.omega.has_value(), "omega unexpectedly present");

    IntegratorConfig icfg;
    icfg.escape_radius = 1000.0;  // let e^{2pi}-growth run instead of aborting
    const ProbeReport probe =
        accumulation_probe(f, 1.0, {1e-1, 1e-2, 1e-3, 1e-4}, icfg, IndexConfig{});
    c.expect(probe.found_at_no_scale(), "probe found a spurious nonzero fixed point");
    return finish("C6 hyperbolic control: no omega, no accumulated fixed points", c);
}

// ---- criterion 7: Lemma-1 / Lemma-3 property suites -----------------------

CriterionResult criterion7() {
    Check c;
    std::mt19937_64 rng(77001122ull);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    auto random_cxd = [&] { return cxd(unif(rng), unif(rng)); };

    // 25 random 1-D maps with f(0)=0 and f'(0) away from 1: certified index 1.
    for (int trial = 0; trial < 25; ++trial) {
        cxd lam;
        do {
            lam = random_cxd() * 1.5;
        } while (std::abs(lam - cxd(1.0, 0.0)) < 0.3);
        const cxd c2 = random_cxd(), c3 = random_cxd();
        PolynomialMap f = map_1d({mono(lam, {1}), mono(c2, {2}), mono(c3, {3})});
        const double margin = std::abs(lam - cxd(1.0, 0.0));
        const double bound = std::abs(c2) + std::abs(c3) + 1.0;
        const double radius = std::min(0.25 * margin / bound, 0.4);
        PolyMapFn fn(f);
        const IndexResult r = fixed_point_index(fn, CVec::Zero(1), {CVec::Zero(1), radius});
        std::ostringstream msg;
        msg << "1-D trial " << trial << ": index "
            << (r.value ? std::to_string(*r.value) : std::string("undetermined"));
        c.expect(r.value == 1, msg.str());
    }

    // 25 random 2-D maps, linear part kept away from eigenvalue 1.
    IndexConfig cfg2;
    cfg2.starts_per_dim = 8;
    for (int trial = 0; trial < 25; ++trial) {
        CMat lin(2, 2);
        double sigma_min = 0.0;
        do {
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) lin(i, j) = random_cxd();
            Eigen::JacobiSVD<Eigen::Matrix2cd> svd(Eigen::Matrix2cd(lin) -
                                                   Eigen::Matrix2cd::Identity());
            sigma_min = svd.singularValues().minCoeff();
        } while (sigma_min < 0.3);

        double quad_bound = 0.0;
        std::vector<std::vector<Monomial>> coords(2);
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                std::vector<int> e(2, 0);
                e[static_cast<size_t>(j)] = 1;
                coords[static_cast<size_t>(i)].push_back(mono(lin(i, j), e));
            }
            double row = 0.0;
            for (const auto& exps : {std::vector<int>{2, 0}, std::vector<int>{1, 1},
                                     std::vector<int>{0, 2}}) {
                const cxd q = random_cxd();
                row += std::abs(q);
                coords[static_cast<size_t>(i)].push_back(mono(q, exps));
            }
            quad_bound = std::max(quad_bound, row);
        }
        PolynomialMap f(2, coords);
        const double radius = std::min(0.2 * sigma_min / (quad_bound + 1.0), 0.4);
        PolyMapFn fn(f);
        const IndexResult r =
            fixed_point_index(fn, CVec::Zero(2), {CVec::Zero(2), radius}, cfg2);
        std::ostringstream msg;
        msg << "2-D trial " << trial << ": index "
            << (r.value ? std::to_string(*r.value) : std::string("undetermined"));
        c.expect(r.value == 1, msg.str());
    }

    // Lemma 3: perturbing z + z^3 splits the triple fixed point into three
    // simple ones whose indices sum to the unperturbed index.
    PolynomialMap f0 = map_1d({mono(cxd(1.0, 0.0), {1}), mono(cxd(1.0, 0.0), {3})});
    PolyMapFn f0n(f0);
    const IndexResult base = fixed_point_index(f0n, CVec::Zero(1), {CVec::Zero(1), 0.5});
    c.expect(base.value == 3, "unperturbed index != 3");

    for (double eps : {1e-3, 1e-2}) {
        CVec e(1);
        e(0) = cxd(eps, 0.0);
        PolynomialMap g = perturb_linear(f0, e);
        const PeriodicOrbitsResult fixed = periodic_points(g, 1, {CVec::Zero(1), 0.5});
        std::ostringstream tag;
        tag << "eps=" << eps;
        c.expect(!fixed.undetermined(), tag.str() + ": fixed-point search undetermined");
        if (fixed.undetermined()) continue;
        c.expect(fixed.orbits->size() == 3, tag.str() + ": expected 3 simple fixed points");

        int sum = 0;
        bool all_simple = true, all_ones = true;
        PolyMapFn gn(g);
        for (const MapOrbit& orbit : *fixed.orbits) {
            const CVec& x = orbit.points.front();
            const CMat jac = g.jacobian_at(x);
            all_simple = all_simple && std::abs(jac(0, 0) - cxd(1.0, 0.0)) > 1e-6;
            double nearest = 0.5;
            for (const MapOrbit& other : *fixed.orbits)
                if (&other != &orbit)
                    nearest = std::min(nearest, (other.points.front() - x).norm());
            const IndexResult ri =
                fixed_point_index(gn, x, {x, std::max(0.4 * nearest, 1e-4)});
            if (!ri.value) {
                all_ones = false;
                continue;
            }
            all_ones = all_ones && (*ri.value == 1);
            sum += *ri.value;
        }
        c.expect(all_simple, tag.str() + ": a perturbed fixed point is not simple");
        c.expect(all_ones, tag.str() + ": a perturbed fixed point has index != 1");
        c.expect(sum == 3, tag.str() + ": indices do not sum to 3");
    }
    return finish("C7 random nondegenerate maps have index 1; perturbation indices sum to 3",
                  c);
}

// ---- criterion 8: no-small-period scan ------------------------------------

CriterionResult criterion8() {
    Check c;
    const ScanReport scan = min_period_scan(field_gregor(), 0.5, 1.0, 64);
    for (const auto& g : scan.grid) {
        std::ostringstream msg;
        msg << "ratio " << g.ratio << " below 0.1 at T=" << g.t;
        c.expect(g.ratio >= 0.1, msg.str());
    }
    c.expect(scan.pass, "scan verdict failed its own threshold");
    return finish("C8 min-period scan of iz+z^2: ratio >= 0.1 on the whole grid", c);
}

}  // namespace

std::vector<CriterionResult> run_all(std::ostream& os) {
    std::vector<CriterionResult> results;
    results.push_back(criterion1());
    results.push_back(criterion2());
    results.push_back(criterion3());
    results.push_back(criterion4());
    results.push_back(criterion5());
    results.push_back(criterion6());
    results.push_back(criterion7());
    results.push_back(criterion8());
    for (const CriterionResult& r : results) {
        os << (r.pass ? "PASS" : "FAIL") << "  " << r.name;
        if (!r.detail.empty()) os << "  [" << r.detail << "]";
        os << "\n";
    }
    return results;
}

int failures(const std::vector<CriterionResult>& results) {
    int n = 0;
    for (const CriterionResult& r : results)
        if (!r.pass) ++n;
    return n;
}

}  // namespace holocenter::acceptance
