#pragma once

// Zero indices pi_f(p) and fixed-point indices mu_f(p) of holomorphic maps by
// regular-value root counting: solve f(x) = q for a random small regular
// value q and count the preimages inside the region. For holomorphic maps
// every preimage counts +1, so no sign bookkeeping is needed; the certified
// count is the index. Also: iterated indices, the 1-D series-order oracle,
// and period-m points of maps.

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "holocenter/field.hpp"
#include "holocenter/flow.hpp"
#include "holocenter/linalg.hpp"

namespace holocenter {

struct BallRegion {
    CVec center;
    double radius;
};

struct IndexConfig {
    double q_radius_factor = 0.1;   // |q| = factor * min boundary |f|
    double newton_tol = 1e-11;      // residual acceptance for a converged root
    int starts_per_dim = 24;        // grid resolution per real dimension
    int retries = 3;                // independent q draws per region radius
    double separation_tol = 1e-7;   // root deduplication / boundary guard
    int max_newton_iters = 120;
    long max_total_starts = 400000; // hard cap on starts_per_dim^(2n)
    std::uint64_t seed = 0x9e3779b97f4a7c15ull;
    int threads = 0;                // 0: HOLOCENTER_THREADS env var, else hardware

    void validate() const;
};

int resolve_threads(const IndexConfig& cfg);

// A holomorphic map that can be evaluated together with its Jacobian.
class HoloMap {
   public:
    virtual ~HoloMap() = default;
    virtual int dim() const = 0;
    virtual CVec eval(const CVec& x) const = 0;
    virtual CMat jac(const CVec& x) const = 0;
};

class PolyMapFn final : public HoloMap {
   public:
    explicit PolyMapFn(PolynomialMap f) : f_(std::move(f)) {}
    int dim() const override { return f_.dim(); }
    CVec eval(const CVec& x) const override { return f_.evaluate(x); }
    CMat jac(const CVec& x) const override { return f_.jacobian_at(x); }
    const PolynomialMap& map() const { return f_; }

   private:
    PolynomialMap f_;
};

class FlowMapFn final : public HoloMap {
   public:
    explicit FlowMapFn(TimeTMap m) : m_(std::move(m)) {}
    int dim() const override { return m_.field.dim(); }
    CVec eval(const CVec& x) const override { return m_.apply(x); }
    CMat jac(const CVec& x) const override { return m_.jacobian(x); }

   private:
    TimeTMap m_;
};

// base applied m times; Jacobian by the chain rule along the orbit.
class IteratedFn final : public HoloMap {
   public:
    IteratedFn(const HoloMap& base, int m);
    int dim() const override { return base_.dim(); }
    CVec eval(const CVec& x) const override;
    CMat jac(const CVec& x) const override;

   private:
    const HoloMap& base_;
    int m_;
};

struct IndexResult {
    std::optional<int> value;  // empty: Undetermined (retries disagreed)
    CVec q_used;
    std::vector<CVec> roots;   // distinct, sorted lexicographically

    struct Diagnostics {
        std::vector<double> newton_residuals;  // per reported root
        double min_separation = 0.0;           // min pairwise root distance
        std::vector<int> run_counts;           // counts across certification runs
        bool agreement = false;
        double boundary_min = 0.0;             // min |f| over boundary samples
    } diagnostics;

    bool undetermined() const { return !value.has_value(); }
};

// Number of solutions of f(x) = q inside the region, for random small regular
// values q. Certified (integer) only when every retry at radii {r, 0.8r}
// agrees; otherwise Undetermined. p must be the unique zero of f in the
// closed region; a violation surfaces as BoundaryAmbiguity.
IndexResult zero_index(const HoloMap& f, const CVec& p, const BallRegion& region,
                       const IndexConfig& cfg = {});

// mu_f(p) = pi_{f - I}(p).
IndexResult fixed_point_index(const HoloMap& f, const CVec& p, const BallRegion& region,
                              const IndexConfig& cfg = {});

// Index of the m-fold composition at p. Polynomial inputs compose exactly
// (truncated composition when the composed degree stays within the cap,
// repeated evaluation otherwise); throws NonIsolated when f^m is the
// identity up to the truncation cap.
IndexResult iterated_index(const PolynomialMap& f, int m, const CVec& p,
                           const BallRegion& region, const IndexConfig& cfg = {});

// Same for time-T maps, iterating the flow map. NonIsolated is detected by
// return errors below 10x integrator tolerance on a probe circle.
IndexResult iterated_index(const TimeTMap& f, int m, const CVec& p, const BallRegion& region,
                           const IndexConfig& cfg = {});

// 1-D oracle: the vanishing order of f^m(z) - z at 0, i.e. the least k with a
// nonzero degree-k coefficient of the truncated composition. For holomorphic
// germs this equals the fixed-point index of f^m at 0.
int series_order_1d(const PolynomialMap& f, int m);

// An orbit {x, f(x), ..., f^{m-1}(x)} of exact period m.
struct MapOrbit {
    std::vector<CVec> points;
    int period;
};

struct PeriodicOrbitsResult {
    std::optional<std::vector<MapOrbit>> orbits;  // empty: Undetermined
    std::vector<int> run_counts;

    bool undetermined() const { return !orbits.has_value(); }
};

// All orbits of exact period m inside the region: root search on f^m(x) - x,
// excluding points fixed by a proper divisor iterate. Certified across
// independently scrambled start grids.
PeriodicOrbitsResult periodic_points(const PolynomialMap& f, int m, const BallRegion& region,
                                     const IndexConfig& cfg = {});

}  // namespace holocenter
