#include "holocenter/center.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace holocenter {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

std::vector<CVec> shell_points(int n, double r_lo, double r_hi, int count,
                               std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<CVec> pts;
    pts.reserve(static_cast<size_t>(count));
    while (static_cast<int>(pts.size()) < count) {
        CVec d(n);
        double norm2 = 0.0;
        for (int j = 0; j < n; ++j) {
            const double re = gauss(rng), im = gauss(rng);
            d(j) = cxd(re, im);
            norm2 += re * re + im * im;
        }
        if (norm2 < 1e-24) continue;
        const double r = r_lo + (r_hi - r_lo) * unif(rng);
        pts.push_back(d * (r / std::sqrt(norm2)));
    }
    return pts;
}

}  // namespace

SpectralReport analyze_spectrum(const PolynomialMap& field, double tol_imag, int k_max) {
    if (!(tol_imag > 0.0)) throw InvalidInput("analyze_spectrum: tol_imag must be positive");
    if (!field.singular_at_origin())
        throw InvalidInput("analyze_spectrum: field must vanish at the origin");

    SpectralReport rep;
    rep.tol_imag = tol_imag;

    const CMat a = field.jacobian_at(CVec::Zero(field.dim()));
    rep.eigenvalues = eigenvalues(a);
    const double scale = 1.0 + a.norm();  // Frobenius

    // Candidate omega: pure-imaginary (|Re| below tolerance), nonzero.
    int chosen = -1;
    for (int i = 0; i < rep.eigenvalues.size(); ++i) {
        const cxd lam = rep.eigenvalues.values[static_cast<size_t>(i)];
        if (std::abs(lam.real()) > tol_imag * scale) continue;
        if (std::abs(lam.imag()) <= tol_imag * scale) continue;  // zero eigenvalue
        if (chosen < 0) {
            chosen = i;
            continue;
        }
        const cxd cur = rep.eigenvalues.values[static_cast<size_t>(chosen)];
        const double ai = std::abs(lam.imag()), ac = std::abs(cur.imag());
        if (ai > ac || (ai == ac && lam.imag() > cur.imag())) chosen = i;
    }

    rep.thm11_necessary = chosen >= 0;
    if (chosen < 0) {
        rep.thm12_ok = false;
        rep.thm13_ok = false;
        return rep;
    }

    const double omega = rep.eigenvalues.values[static_cast<size_t>(chosen)].imag();
    rep.omega = omega;

    double max_abs = 0.0;
    for (const cxd& lam : rep.eigenvalues.values) max_abs = std::max(max_abs, std::abs(lam));
    rep.k_max = k_max > 0
                    ? k_max
                    : static_cast<int>(std::ceil(max_abs / std::abs(omega))) + 2;

    rep.thm12_ok = true;
    rep.thm13_ok = true;
    const cxd omega_i(0.0, omega);
    for (int i = 0; i < rep.eigenvalues.size(); ++i) {
        if (i == chosen) continue;
        const cxd lam = rep.eigenvalues.values[static_cast<size_t>(i)];
        const cxd ratio = lam / omega_i;
        rep.ratios.push_back(ratio);
        const long nearest = std::lround(ratio.real());
        for (long k = -rep.k_max; k <= rep.k_max; ++k) {
            if (std::abs(ratio - cxd(static_cast<double>(k), 0.0)) > tol_imag) continue;
            rep.thm13_ok = false;
            if (std::labs(k) >= 2) rep.thm12_ok = false;
            rep.offending.push_back({lam, nearest});
            break;
        }
    }
    return rep;
}

bool ProbeReport::found_at_every_scale() const {
    for (const ProbeScale& s : scales)
        if (!s.found) return false;
    return !scales.empty();
}

bool ProbeReport::found_at_no_scale() const {
    for (const ProbeScale& s : scales)
        if (s.found) return false;
    return true;
}

ProbeReport accumulation_probe(const PolynomialMap& field, double omega,
                               const std::vector<double>& scales,
                               const IntegratorConfig& icfg, const IndexConfig& cfg) {
    if (!(omega != 0.0) || !std::isfinite(omega))
        throw InvalidInput("accumulation_probe: omega must be a nonzero real");
    icfg.validate();
    const int n = field.dim();

    ProbeReport rep;
    rep.omega = omega;
    rep.period = kTwoPi / std::abs(omega);

    const int starts_per_scale = 8 * n;
    for (size_t si = 0; si < scales.size(); ++si) {
        const double s = scales[si];
        if (!(s > 0.0)) throw InvalidInput("accumulation_probe: scales must be positive");
        ProbeScale res;
        res.scale = s;

        const auto starts =
            shell_points(n, 0.5 * s, s, starts_per_scale, splitmix(cfg.seed + 31 * si));
        for (const CVec& start : starts) {
            CVec x = start;
            bool ok = true;
            try {
                for (int iter = 0; iter < 30; ++iter) {
                    const CVec g = flow_map(field, rep.period, x, icfg) - x;
                    if ((g).norm() <= cfg.newton_tol) break;
                    const CMat j =
                        flow_jacobian(field, rep.period, x, icfg) - CMat::Identity(n, n);
                    CVec d;
                    try {
                        d = linsolve(j, g);
                    } catch (const SingularSystem&) {
                        ok = false;
                        break;
                    }
                    x -= d;
                    if (x.norm() > 4.0 * s + 1.0) {
                        ok = false;
                        break;
                    }
                }
            } catch (const Error&) {
                ok = false;  // Blowup / StepLimit: this start is useless
            }
            if (!ok) continue;
            double res_norm;
            try {
                res_norm = (flow_map(field, rep.period, x, icfg) - x).norm();
            } catch (const Error&) {
                continue;
            }
            const double xn = x.norm();
            if (res_norm <= cfg.newton_tol && xn > 10.0 * cfg.newton_tol && xn <= s) {
                res.found = true;
                res.witness = x;
                res.witness_norm = xn;
                res.witness_residual = res_norm;
                break;
            }
        }
        rep.scales.push_back(std::move(res));
    }
    return rep;
}

CVec DiskModel::point(cxd x1) const {
    CVec x(dim());
    x(0) = x1;
    for (size_t l = 0; l < coeffs.size(); ++l) {
        cxd acc(0.0, 0.0);
        cxd p(1.0, 0.0);
        for (size_t k = 0; k < coeffs[l].size(); ++k) {
            p *= x1;
            acc += coeffs[l][k] * p;
        }
        x(static_cast<int>(l) + 1) = acc;
    }
    return x;
}

DiskModel build_disk(const PolynomialMap& field, const SpectralReport& report, double delta,
                     int degree, const IntegratorConfig& icfg, const IndexConfig& cfg) {
    icfg.validate();
    if (!report.omega)
        throw PreconditionFailed("build_disk: no pure-imaginary eigenvalue (no omega)");
    if (!(delta > 0.0)) throw InvalidInput("build_disk: delta must be positive");
    if (degree < 1 || degree > 64) throw InvalidInput("build_disk: degree out of range");

    const int n = field.dim();
    const double omega = *report.omega;
    const double period = kTwoPi / std::abs(omega);

    DiskModel model;
    model.omega = omega;
    model.period = period;
    model.delta = delta;
    model.degree = degree;
    model.coeffs.assign(static_cast<size_t>(n - 1),
                        std::vector<cxd>(static_cast<size_t>(degree), cxd(0.0, 0.0)));

    // Numerical recheck of the implicit-function condition: the transverse
    // block of Phi'(0) - I must be invertible.
    if (n >= 2) {
        const CMat m0 = flow_jacobian(field, period, CVec::Zero(n), icfg);
        Eigen::MatrixXcd block = m0.bottomRightCorner(n - 1, n - 1) -
                                 Eigen::MatrixXcd::Identity(n - 1, n - 1);
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(block);
        if (!lu.isInvertible())
            throw DiskNotFound(
                "build_disk: transverse Jacobian of the time-T map is singular at 0");
    }

    constexpr int kAngles = 32;
    const double radii[3] = {delta / 4.0, delta / 2.0, delta};

    std::vector<cxd> params;
    std::vector<CVec> transverse;  // solved (x_2..x_n) per sample
    params.reserve(3 * kAngles);

    // Warm start: march outward ring by ring, reusing the previous ring's
    // solution at the same angle.
    std::vector<CVec> warm(kAngles, CVec::Zero(std::max(n - 1, 1)));
    const double a6_tol = kDiskPassTol;

    for (int ring = 0; ring < 3; ++ring) {
        for (int ai = 0; ai < kAngles; ++ai) {
            const double theta = kTwoPi * static_cast<double>(ai) / kAngles;
            const cxd x1 = radii[ring] * cxd(std::cos(theta), std::sin(theta));

            CVec y = warm[static_cast<size_t>(ai)];
            if (n == 1) {
                // No transverse coordinates: the disk is the parameter disk
                // itself. Only the first-coordinate identity is checked.
                CVec x(1);
                x(0) = x1;
                const CVec phi = flow_map(field, period, x, icfg);
                if (std::abs(phi(0) - x1) > a6_tol)
                    throw InconsistentDisk(
                        "build_disk: phi_1 != x_1 on a sample (not a periodic disk)");
                params.push_back(x1);
                transverse.push_back(CVec::Zero(0));
                continue;
            }

            bool converged = false;
            try {
                for (int iter = 0; iter < 40; ++iter) {
                    CVec x(n);
                    x(0) = x1;
                    for (int l = 1; l < n; ++l) x(l) = y(l - 1);
                    CVec phi;
                    CMat jac;
                    flow_with_jacobian(field, period, x, icfg, phi, jac);
                    CVec g(n - 1);
                    for (int l = 1; l < n; ++l) g(l - 1) = phi(l) - x(l);
                    if (g.norm() <= cfg.newton_tol) {
                        // Eq. (a6): the first coordinate must come back on its own.
                        if (std::abs(phi(0) - x1) > a6_tol)
                            throw InconsistentDisk(
                                "build_disk: phi_1 != x_1 on a sample beyond tolerance");
                        converged = true;
                        break;
                    }
                    CMat j = jac.bottomRightCorner(n - 1, n - 1) -
                             CMat::Identity(n - 1, n - 1);
                    const CVec d = linsolve(j, g);
                    y -= d;
                    if (y.norm() > 10.0 * delta + 1.0) break;
                }
            } catch (const InconsistentDisk&) {
                throw;
            } catch (const Error&) {
                throw DiskNotFound("build_disk: Newton failed (delta too large?)");
            }
            if (!converged)
                throw DiskNotFound("build_disk: transverse Newton diverged (delta too large?)");

            warm[static_cast<size_t>(ai)] = y;
            params.push_back(x1);
            transverse.push_back(y);
        }
    }

    if (n == 1) {
        model.residual_max = 0.0;
        return model;
    }

    // Least-squares fit x_l(x_1) = sum_k c_{l,k} x_1^k (no constant term,
    // matching x_l(0) = 0) over all ring samples.
    const int n_samples = static_cast<int>(params.size());
    Eigen::MatrixXcd vand(n_samples, degree);
    for (int s = 0; s < n_samples; ++s) {
        cxd p(1.0, 0.0);
        for (int k = 0; k < degree; ++k) {
            p *= params[static_cast<size_t>(s)];
            vand(s, k) = p;
        }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(vand);

    double residual_max = 0.0;
    for (int l = 0; l < n - 1; ++l) {
        Eigen::VectorXcd rhs(n_samples);
        for (int s = 0; s < n_samples; ++s) rhs(s) = transverse[static_cast<size_t>(s)](l);
        const Eigen::VectorXcd c = qr.solve(rhs);
        for (int k = 0; k < degree; ++k)
            model.coeffs[static_cast<size_t>(l)][static_cast<size_t>(k)] = c(k);
        const Eigen::VectorXcd fit = vand * c;
        for (int s = 0; s < n_samples; ++s)
            residual_max = std::max(residual_max, std::abs(fit(s) - rhs(s)));
    }
    model.residual_max = residual_max;
    return model;
}

PeriodicityReport verify_disk(const PolynomialMap& field, const DiskModel& disk, double t0,
                              const IntegratorConfig& icfg) {
    icfg.validate();
    if (disk.dim() != field.dim()) throw InvalidInput("verify_disk: dimension mismatch");
    if (!(t0 > 0.0) || t0 >= disk.period)
        throw InvalidInput("verify_disk: T0 must lie in (0, period)");

    PeriodicityReport rep;
    rep.omega = disk.omega;
    rep.period = disk.period;
    rep.t0 = t0;
    rep.mstar = static_cast<int>(std::floor(kTwoPi / (t0 * std::abs(disk.omega))));

    // >= 16 probe points with |x_1| in [delta/4, delta].
    constexpr int kAngles = 8;
    const double radii[2] = {disk.delta / 4.0, disk.delta};
    for (double r : radii) {
        for (int ai = 0; ai < kAngles; ++ai) {
            const double theta = kTwoPi * (static_cast<double>(ai) + 0.37) / kAngles;
            rep.samples.push_back(disk.point(r * cxd(std::cos(theta), std::sin(theta))));
        }
    }

    rep.max_return_error = 0.0;
    for (const CVec& x : rep.samples)
        rep.max_return_error =
            std::max(rep.max_return_error, return_error(field, disk.period, x, icfg));

    rep.minimality.clear();
    for (int k = 2; k <= rep.mstar; ++k) {
        double lo = std::numeric_limits<double>::infinity();
        for (const CVec& x : rep.samples)
            lo = std::min(lo, return_error(field, disk.period / k, x, icfg));
        rep.minimality.push_back(lo);
    }

    rep.pass = rep.max_return_error <= kDiskPassTol;
    for (double v : rep.minimality)
        if (!(v >= kDiskFailFloor)) rep.pass = false;
    return rep;
}

ScanReport min_period_scan(const PolynomialMap& field, double rho, double t0, int samples,
                           const IntegratorConfig& icfg) {
    icfg.validate();
    if (!(rho > 0.0)) throw InvalidInput("min_period_scan: rho must be positive");
    if (!(t0 > 0.0)) throw InvalidInput("min_period_scan: T0 must be positive");
    if (samples < 4) throw InvalidInput("min_period_scan: need at least 4 sphere samples");
    if (!field.singular_at_origin())
        throw InvalidInput("min_period_scan: field must vanish at the origin");

    // When omega is known the true period must be excluded from the scan.
    const SpectralReport spec = analyze_spectrum(field);
    if (spec.omega && t0 >= kTwoPi / std::abs(*spec.omega))
        throw InvalidInput("min_period_scan: T0 must be below 2pi/|omega|");

    ScanReport rep;
    rep.rho = rho;
    rep.t0 = t0;

    const int n = field.dim();
    const auto sphere = shell_points(n, rho, rho, samples, 0x5ca11edull);

    double bmin = std::numeric_limits<double>::infinity(), bmax = 0.0;
    for (const CVec& x : sphere) {
        const double v = field.evaluate(x).norm();
        bmin = std::min(bmin, v);
        bmax = std::max(bmax, v);
    }
    if (!(bmin > 1e-12 * std::max(bmax, 1.0)))
        throw PreconditionFailed("min_period_scan: |F| vanishes on the sphere samples");
    rep.boundary_min_f = bmin;
    rep.threshold = 0.5 * bmin;

    constexpr int kGrid = 32;
    rep.min_ratio = std::numeric_limits<double>::infinity();
    for (int gi = 1; gi <= kGrid; ++gi) {
        const double t = t0 * static_cast<double>(gi) / kGrid;
        double lo = std::numeric_limits<double>::infinity();
        for (const CVec& x : sphere)
            lo = std::min(lo, return_error(field, t, x, icfg) / t);
        rep.grid.push_back({t, lo});
        rep.min_ratio = std::min(rep.min_ratio, lo);
    }
    rep.pass = rep.min_ratio >= rep.threshold;
    return rep;
}

}  // namespace holocenter
