#include "holocenter/index.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <limits>
#include <random>
#include <thread>

namespace holocenter {

void IndexConfig::validate() const {
    if (!(q_radius_factor > 0.0 && q_radius_factor < 1.0))
        throw InvalidInput("IndexConfig: q_radius_factor must be in (0,1)");
    if (!(newton_tol > 0.0)) throw InvalidInput("IndexConfig: newton_tol must be positive");
    if (starts_per_dim < 1) throw InvalidInput("IndexConfig: starts_per_dim must be >= 1");
    if (retries < 1) throw InvalidInput("IndexConfig: retries must be >= 1");
    if (!(separation_tol > 0.0))
        throw InvalidInput("IndexConfig: separation_tol must be positive");
    if (max_newton_iters < 1) throw InvalidInput("IndexConfig: max_newton_iters must be >= 1");
    if (max_total_starts < 1) throw InvalidInput("IndexConfig: max_total_starts must be >= 1");
}

int resolve_threads(const IndexConfig& cfg) {
    if (cfg.threads > 0) return cfg.threads;
    if (const char* env = std::getenv("HOLOCENTER_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<int>(std::min<long>(v, 64));
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

IteratedFn::IteratedFn(const HoloMap& base, int m) : base_(base), m_(m) {
    if (m < 1) throw InvalidInput("IteratedFn: m must be >= 1");
}

CVec IteratedFn::eval(const CVec& x) const {
    CVec y = x;
    for (int k = 0; k < m_; ++k) y = base_.eval(y);
    return y;
}

CMat IteratedFn::jac(const CVec& x) const {
    CVec y = x;
    CMat acc = CMat::Identity(dim(), dim());
    for (int k = 0; k < m_; ++k) {
        acc = (base_.jac(y) * acc).eval();
        y = base_.eval(y);
    }
    return acc;
}

namespace {

// f(x) - x, the fixed-point residual map.
class ShiftedFn final : public HoloMap {
   public:
    explicit ShiftedFn(const HoloMap& base) : base_(base) {}
    int dim() const override { return base_.dim(); }
    CVec eval(const CVec& x) const override { return base_.eval(x) - x; }
    CMat jac(const CVec& x) const override {
        return base_.jac(x) - CMat::Identity(dim(), dim());
    }

   private:
    const HoloMap& base_;
};

constexpr int kPrimes[32] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31,  37,  41,  43,  47, 53,
                             59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131};

double radical_inverse(std::uint64_t i, int base) {
    double inv = 1.0 / base, f = inv, r = 0.0;
    while (i) {
        r += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
        i /= static_cast<std::uint64_t>(base);
        f *= inv;
    }
    return r;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a + 0x9e3779b97f4a7c15ull + (b << 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

long total_starts(int starts_per_dim, int n, long cap) {
    long total = 1;
    for (int d = 0; d < 2 * n; ++d) {
        if (total > cap / std::max(starts_per_dim, 1)) return cap;
        total *= starts_per_dim;
    }
    return std::min(total, cap);
}

// Deterministic low-discrepancy starts in the ball |x - center| <= r:
// a Cranley-Patterson-rotated Halton sequence in the bounding box, with
// rejection to the ball.
std::vector<CVec> make_starts(const CVec& center, double r, long count,
                              std::uint64_t scramble_seed) {
    const int n = static_cast<int>(center.size());
    std::mt19937_64 rng(scramble_seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> rot(static_cast<size_t>(2 * n));
    for (double& v : rot) v = unif(rng);

    std::vector<CVec> starts;
    starts.reserve(static_cast<size_t>(count));
    const long max_attempts = count * 1000 + 1000;
    for (long idx = 1; idx <= max_attempts && static_cast<long>(starts.size()) < count;
         ++idx) {
        CVec x(n);
        double norm2 = 0.0;
        for (int j = 0; j < n; ++j) {
            double u_re = radical_inverse(static_cast<std::uint64_t>(idx), kPrimes[2 * j]) +
                          rot[static_cast<size_t>(2 * j)];
            double u_im =
                radical_inverse(static_cast<std::uint64_t>(idx), kPrimes[2 * j + 1]) +
                rot[static_cast<size_t>(2 * j + 1)];
            u_re -= std::floor(u_re);
            u_im -= std::floor(u_im);
            const double re = r * (2.0 * u_re - 1.0);
            const double im = r * (2.0 * u_im - 1.0);
            norm2 += re * re + im * im;
            x(j) = cxd(re, im);
        }
        if (norm2 <= r * r) starts.push_back(center + x);
    }
    return starts;
}

// Uniform points on the sphere |x - center| = r (seeded Gaussian directions).
std::vector<CVec> sphere_points(const CVec& center, double r, int count,
                                std::uint64_t seed) {
    const int n = static_cast<int>(center.size());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
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
        pts.push_back(center + d * (r / std::sqrt(norm2)));
    }
    return pts;
}

bool lex_less(const CVec& a, const CVec& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a(i).real() != b(i).real()) return a(i).real() < b(i).real();
        if (a(i).imag() != b(i).imag()) return a(i).imag() < b(i).imag();
    }
    return false;
}

struct NewtonHit {
    CVec root;
    double residual;
};

// Newton from one start. Iterates past residual convergence until the step
// stalls, so clusters around multiple roots collapse well below the
// deduplication tolerance instead of ringing at the residual scale.
std::optional<NewtonHit> newton_from(const HoloMap& f, const CVec& q, const CVec& center,
                                     double radius, const CVec& start,
                                     const IndexConfig& cfg) {
    CVec x = start;
    const double step_tol = 1e-13;
    try {
        for (int iter = 0; iter < cfg.max_newton_iters; ++iter) {
            const CVec r = f.eval(x) - q;
            if (!all_finite(r)) return std::nullopt;
            if ((x - center).norm() > 3.0 * radius) return std::nullopt;
            CVec d;
            try {
                d = linsolve(f.jac(x), r);
            } catch (const SingularSystem&) {
                break;  // accept/reject below on the residual
            }
            x -= d;
            if (d.norm() <= step_tol * (1.0 + x.norm())) break;
        }
        const double res = (f.eval(x) - q).norm();
        if (!std::isfinite(res) || res > cfg.newton_tol) return std::nullopt;
        if ((x - center).norm() > 2.0 * radius) return std::nullopt;
        return NewtonHit{x, res};
    } catch (const Error&) {
        return std::nullopt;  // Blowup / StepLimit on flow-backed maps
    }
}

std::vector<NewtonHit> run_starts(const HoloMap& f, const CVec& q, const CVec& center,
                                  double radius, const std::vector<CVec>& starts,
                                  const IndexConfig& cfg) {
    const int threads = resolve_threads(cfg);
    std::vector<NewtonHit> hits;
    if (threads <= 1 || starts.size() < 64) {
        for (const CVec& s : starts)
            if (auto h = newton_from(f, q, center, radius, s, cfg)) hits.push_back(*h);
        return hits;
    }
    const size_t chunk = (starts.size() + static_cast<size_t>(threads) - 1) /
                         static_cast<size_t>(threads);
    std::vector<std::future<std::vector<NewtonHit>>> futs;
    for (size_t begin = 0; begin < starts.size(); begin += chunk) {
        const size_t end = std::min(begin + chunk, starts.size());
        futs.push_back(std::async(std::launch::async, [&, begin, end] {
            std::vector<NewtonHit> local;
            for (size_t i = begin; i < end; ++i)
                if (auto h = newton_from(f, q, center, radius, starts[i], cfg))
                    local.push_back(*h);
            return local;
        }));
    }
    for (auto& fu : futs) {
        auto local = fu.get();
        hits.insert(hits.end(), local.begin(), local.end());
    }
    return hits;
}

// Sorted clustering at separation_tol. Deterministic: hits are sorted
// lexicographically before clustering, so results do not depend on thread
// scheduling.
std::vector<NewtonHit> dedup_hits(std::vector<NewtonHit> hits, double separation_tol) {
    std::sort(hits.begin(), hits.end(),
              [](const NewtonHit& a, const NewtonHit& b) { return lex_less(a.root, b.root); });
    std::vector<NewtonHit> reps;
    for (const NewtonHit& h : hits) {
        bool merged = false;
        for (NewtonHit& rep : reps) {
            if ((h.root - rep.root).norm() < separation_tol) {
                if (h.residual < rep.residual) rep = h;  // keep the cleanest member
                merged = true;
                break;
            }
        }
        if (!merged) reps.push_back(h);
    }
    std::sort(reps.begin(), reps.end(),
              [](const NewtonHit& a, const NewtonHit& b) { return lex_less(a.root, b.root); });
    return reps;
}

struct BoundaryScan {
    double min_abs;
    double max_abs;
};

BoundaryScan boundary_scan(const HoloMap& f, const CVec& center, double r,
                           std::uint64_t seed) {
    const int n = f.dim();
    const auto pts = sphere_points(center, r, 64 * n, seed);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const CVec& p : pts) {
        const double v = f.eval(p).norm();
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

CVec random_direction(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    CVec d(n);
    double norm2 = 0.0;
    do {
        norm2 = 0.0;
        for (int j = 0; j < n; ++j) {
            const double re = gauss(rng), im = gauss(rng);
            d(j) = cxd(re, im);
            norm2 += re * re + im * im;
        }
    } while (norm2 < 1e-24);
    return d / std::sqrt(norm2);
}

struct CountedRun {
    int count = -1;                // -1: run invalid (e.g. irregular q)
    std::vector<NewtonHit> roots;  // strictly inside the region
    CVec q;
    double boundary_min = 0.0;
};

// One certification run: draw q on the scaled sphere, find all preimages.
CountedRun one_run(const HoloMap& f, const CVec& p, double r, long n_starts,
                   std::uint64_t run_seed, const IndexConfig& cfg) {
    CountedRun run;
    const BoundaryScan scan = boundary_scan(f, p, r, mix_seed(run_seed, 101));
    if (!(scan.min_abs > 0.0) || scan.min_abs <= 1e-12 * scan.max_abs)
        throw BoundaryAmbiguity(
            "zero_index: |f| vanishes on the region boundary (zero not isolated inside?)");
    run.boundary_min = scan.min_abs;

    const double qmag = cfg.q_radius_factor * scan.min_abs;
    run.q = random_direction(f.dim(), mix_seed(run_seed, 202)) * qmag;

    const auto starts = make_starts(p, r, n_starts, mix_seed(run_seed, 303));
    auto reps = dedup_hits(run_starts(f, run.q, p, r, starts, cfg), cfg.separation_tol);

    bool regular = true;
    for (const NewtonHit& h : reps) {
        const double dist = (h.root - p).norm();
        if (dist > r) continue;  // converged outside: not counted
        if (r - dist < cfg.separation_tol)
            throw BoundaryAmbiguity("zero_index: root within separation_tol of the boundary");
        // q must be a regular value: the Jacobian at each preimage nonsingular
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(f.jac(h.root));
        if (!lu.isInvertible()) {
            regular = false;
            break;
        }
        run.roots.push_back(h);
    }
    run.count = regular ? static_cast<int>(run.roots.size()) : -1;
    return run;
}

IndexResult assemble_result(const std::vector<CountedRun>& runs, const IndexConfig& cfg) {
    IndexResult out;
    bool agree = true;
    for (const CountedRun& r : runs) {
        out.diagnostics.run_counts.push_back(r.count);
        if (r.count < 0 || r.count != runs.front().count) agree = false;
    }
    out.diagnostics.agreement = agree;
    const CountedRun& first = runs.front();
    out.q_used = first.q;
    out.diagnostics.boundary_min = first.boundary_min;
    for (const NewtonHit& h : first.roots) {
        out.roots.push_back(h.root);
        out.diagnostics.newton_residuals.push_back(h.residual);
    }
    double min_sep = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < out.roots.size(); ++i)
        for (size_t j = i + 1; j < out.roots.size(); ++j)
            min_sep = std::min(min_sep, (out.roots[i] - out.roots[j]).norm());
    out.diagnostics.min_separation = out.roots.size() > 1 ? min_sep : 0.0;
    if (agree && (out.roots.size() < 2 || min_sep > cfg.separation_tol))
        out.value = first.count;
    return out;
}

}  // namespace

IndexResult zero_index(const HoloMap& f, const CVec& p, const BallRegion& region,
                       const IndexConfig& cfg) {
    cfg.validate();
    if (!(region.radius > 0.0)) throw InvalidInput("zero_index: region radius must be positive");
    if (p.size() != f.dim() || region.center.size() != f.dim())
        throw InvalidInput("zero_index: dimension mismatch");
    if (!all_finite(p)) throw InvalidInput("zero_index: non-finite point");

    const int n = f.dim();
    const long n_starts = total_starts(cfg.starts_per_dim, n, cfg.max_total_starts);

    // Certification: every q draw at radii r and 0.8r must report the same
    // count. The preimages of a small regular value cluster near the zeros
    // of f, so a genuine count is radius-stable.
    std::vector<CountedRun> runs;
    const double factors[2] = {1.0, 0.8};
    for (int fi = 0; fi < 2; ++fi) {
        for (int retry = 0; retry < cfg.retries; ++retry) {
            const std::uint64_t run_seed =
                mix_seed(cfg.seed, static_cast<std::uint64_t>(fi * 1000 + retry));
            runs.push_back(one_run(f, p, region.radius * factors[fi], n_starts, run_seed, cfg));
        }
    }
    return assemble_result(runs, cfg);
}

IndexResult fixed_point_index(const HoloMap& f, const CVec& p, const BallRegion& region,
                              const IndexConfig& cfg) {
    ShiftedFn shifted(f);
    return zero_index(shifted, p, region, cfg);
}

namespace {

// True when the composed map agrees with the identity up to the truncation
// cap; coefficients are compared against the composition's own scale.
bool composed_is_identity(const PolynomialMap& composed) {
    const PolynomialMap id = identity_map(composed.dim());
    double scale = 1.0;
    for (const auto& coord : composed.coords())
        for (const Monomial& m : coord) scale = std::max(scale, std::abs(m.coeff));

    for (int i = 0; i < composed.dim(); ++i) {
        for (const Monomial& m : composed.coords()[static_cast<size_t>(i)]) {
            cxd expected(0.0, 0.0);
            for (const Monomial& mi : id.coords()[static_cast<size_t>(i)])
                if (mi.exponents == m.exponents) expected = mi.coeff;
            if (std::abs(m.coeff - expected) > 1e-11 * scale) return false;
        }
        // identity monomial must be present
        bool has_linear = false;
        for (const Monomial& m : composed.coords()[static_cast<size_t>(i)]) {
            std::vector<int> exps(static_cast<size_t>(composed.dim()), 0);
            exps[static_cast<size_t>(i)] = 1;
            if (m.exponents == exps && std::abs(m.coeff - cxd(1.0, 0.0)) <= 1e-11 * scale)
                has_linear = true;
        }
        if (!has_linear) return false;
    }
    return true;
}

long composed_degree(const PolynomialMap& f, int m) {
    long deg = 1;
    for (int k = 0; k < m; ++k) {
        deg *= std::max(f.max_total_degree(), 1);
        if (deg > kDegreeCap) return deg;
    }
    return deg;
}

}  // namespace

IndexResult iterated_index(const PolynomialMap& f, int m, const CVec& p,
                           const BallRegion& region, const IndexConfig& cfg) {
    if (m < 1) throw InvalidInput("iterated_index: m must be >= 1");
    const PolynomialMap composed = iterate_truncated(f, m, kDegreeCap);
    if (composed_is_identity(composed))
        throw NonIsolated("iterated_index: f^m is the identity up to the truncation cap");

    if (composed_degree(f, m) <= kDegreeCap) {
        // Composition is exact: index the composed polynomial directly.
        PolyMapFn fn(composed);
        return fixed_point_index(fn, p, region, cfg);
    }
    // Degree overflow: evaluate f^m by repeated application instead (exact
    // values, chain-rule Jacobian).
    PolyMapFn base(f);
    IteratedFn fn(base, m);
    return fixed_point_index(fn, p, region, cfg);
}

IndexResult iterated_index(const TimeTMap& f, int m, const CVec& p, const BallRegion& region,
                           const IndexConfig& cfg) {
    if (m < 1) throw InvalidInput("iterated_index: m must be >= 1");

    // Identity detection: return errors of the m-fold map on a probe circle.
    const double probe_r = 0.5 * region.radius;
    const double tol_floor =
        10.0 * (f.config.abs_tol + f.config.rel_tol * (p.norm() + probe_r));
    const auto probes = sphere_points(p, probe_r, 8 * f.field.dim(), mix_seed(cfg.seed, 7));
    bool all_return = true;
    for (const CVec& x : probes) {
        const CVec y = flow_map(f.field, f.tau * static_cast<double>(m), x, f.config);
        if ((y - x).norm() > tol_floor) {
            all_return = false;
            break;
        }
    }
    if (all_return)
        throw NonIsolated("iterated_index: time-T map iterate returns the probe circle");

    FlowMapFn base(f);
    IteratedFn fn(base, m);
    return fixed_point_index(fn, p, region, cfg);
}

int series_order_1d(const PolynomialMap& f, int m) {
    if (f.dim() != 1) throw InvalidInput("series_order_1d: map must be 1-D");
    if (m < 1) throw InvalidInput("series_order_1d: m must be >= 1");
    if (!f.singular_at_origin()) throw InvalidInput("series_order_1d: requires f(0) = 0");

    const PolynomialMap composed = iterate_truncated(f, m, kDegreeCap);

    // Coefficients of f^m(z) - z by degree. Composition in floating point
    // leaves cancellation residue where exact arithmetic has zeros, so
    // "nonzero" is judged relative to the composition's coefficient scale.
    std::vector<cxd> c(static_cast<size_t>(kDegreeCap) + 1, cxd(0.0, 0.0));
    double scale = 1.0;
    for (const Monomial& mo : composed.coords()[0]) {
        c[static_cast<size_t>(mo.total_degree())] += mo.coeff;
        scale = std::max(scale, std::abs(mo.coeff));
    }
    c[1] -= 1.0;

    const double thresh = 1e-11 * scale;
    for (int k = 0; k <= kDegreeCap; ++k)
        if (std::abs(c[static_cast<size_t>(k)]) > thresh) return k;
    throw NonIsolatedOrCapExceeded(
        "series_order_1d: all coefficients of f^m - id vanish up to the cap");
}

PeriodicOrbitsResult periodic_points(const PolynomialMap& f, int m, const BallRegion& region,
                                     const IndexConfig& cfg) {
    cfg.validate();
    if (m < 1) throw InvalidInput("periodic_points: m must be >= 1");
    if (region.center.size() != f.dim()) throw InvalidInput("periodic_points: dimension mismatch");
    if (!(region.radius > 0.0))
        throw InvalidInput("periodic_points: region radius must be positive");

    PolyMapFn base(f);
    IteratedFn fm(base, m);
    ShiftedFn g(fm);  // f^m(x) - x
    const CVec q = CVec::Zero(f.dim());
    const long n_starts = total_starts(cfg.starts_per_dim, f.dim(), cfg.max_total_starts);
    const double match_tol = std::max(100.0 * cfg.newton_tol, 1e-9);

    std::vector<int> divisors;
    for (int d = 1; d < m; ++d)
        if (m % d == 0) divisors.push_back(d);

    PeriodicOrbitsResult out;
    std::vector<std::vector<MapOrbit>> per_run;
    for (int retry = 0; retry < cfg.retries; ++retry) {
        const auto starts = make_starts(region.center, region.radius, n_starts,
                                        mix_seed(cfg.seed, 9000 + static_cast<std::uint64_t>(retry)));
        auto reps =
            dedup_hits(run_starts(g, q, region.center, region.radius, starts, cfg),
                       cfg.separation_tol);

        // Keep roots strictly inside; guard the boundary as in zero_index.
        std::vector<CVec> roots;
        for (const NewtonHit& h : reps) {
            const double dist = (h.root - region.center).norm();
            if (dist > region.radius) continue;
            if (region.radius - dist < cfg.separation_tol)
                throw BoundaryAmbiguity(
                    "periodic_points: root within separation_tol of the boundary");
            roots.push_back(h.root);
        }

        // Drop points fixed by a proper divisor iterate: their minimal period
        // divides m strictly.
        std::vector<CVec> exact;
        for (const CVec& x : roots) {
            bool shorter = false;
            for (int d : divisors) {
                IteratedFn fd(base, d);
                if ((fd.eval(x) - x).norm() <= match_tol) {
                    shorter = true;
                    break;
                }
            }
            if (!shorter) exact.push_back(x);
        }

        // Group into orbits by direct iteration.
        std::vector<bool> used(exact.size(), false);
        std::vector<MapOrbit> orbits;
        for (size_t i = 0; i < exact.size(); ++i) {
            if (used[i]) continue;
            MapOrbit orbit;
            orbit.period = m;
            CVec y = exact[i];
            for (int k = 0; k < m; ++k) {
                orbit.points.push_back(y);
                for (size_t j = 0; j < exact.size(); ++j)
                    if (!used[j] && (exact[j] - y).norm() <= match_tol) used[j] = true;
                y = f.evaluate(y);
            }
            orbits.push_back(std::move(orbit));
        }
        out.run_counts.push_back(static_cast<int>(orbits.size()));
        per_run.push_back(std::move(orbits));
    }

    // Certification: every scrambled start grid must report the same orbit
    // point set.
    bool agree = true;
    auto flatten = [](const std::vector<MapOrbit>& orbits) {
        std::vector<CVec> pts;
        for (const MapOrbit& o : orbits) pts.insert(pts.end(), o.points.begin(), o.points.end());
        std::sort(pts.begin(), pts.end(), lex_less);
        return pts;
    };
    const auto ref = flatten(per_run.front());
    for (size_t r = 1; r < per_run.size() && agree; ++r) {
        const auto cur = flatten(per_run[r]);
        if (cur.size() != ref.size()) {
            agree = false;
            break;
        }
        for (size_t i = 0; i < cur.size(); ++i)
            if ((cur[i] - ref[i]).norm() > cfg.separation_tol) {
                agree = false;
                break;
            }
    }
    if (agree) out.orbits = std::move(per_run.front());
    return out;
}

}  // namespace holocenter
