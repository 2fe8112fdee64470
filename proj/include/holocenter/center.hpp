#pragma once

// Center analysis of xdot = F(x) near the singularity 0: spectral conditions
// for the existence of periodic-orbit families, the accumulated-fixed-point
// probe of the time-T map, construction of the one-dimensional analytic disk
// of periodic orbits, and periodicity / minimal-period verification.

#include <optional>
#include <vector>

#include "holocenter/field.hpp"
#include "holocenter/flow.hpp"
#include "holocenter/index.hpp"
#include "holocenter/linalg.hpp"

namespace holocenter {

// Verdict separation for disk verification: the periodicity check passes at
// pass_tol while a genuinely shorter period would show up at fail_floor,
// four orders of magnitude above integrator noise.
inline constexpr double kDiskPassTol = 1e-7;
inline constexpr double kDiskFailFloor = 1e-3;

struct SpectralReport {
    Spectrum eigenvalues;           // spectrum of F'(0)
    std::optional<double> omega;    // chosen pure-imaginary eigenvalue is omega*i
    std::vector<cxd> ratios;        // lambda_l / (omega i) for the other eigenvalues
    bool thm11_necessary = false;   // a nonzero pure imaginary eigenvalue exists
    bool thm12_ok = false;          // no ratio at +-2, +-3, ...
    bool thm13_ok = false;          // no ratio at 0, +-1, +-2, ...
    struct Offender {
        cxd eigenvalue;
        long nearest_integer;
    };
    std::vector<Offender> offending;
    double tol_imag = 0.0;
    int k_max = 0;
};

// Eigenvalue screening of F'(0). omega is the pure-imaginary eigenvalue of
// largest |Im| (ties toward positive imaginary part); resonance conditions
// are tested against integers |k| <= k_max, where k_max = 0 selects
// ceil(max|lambda| / |omega|) + 2 automatically.
SpectralReport analyze_spectrum(const PolynomialMap& field, double tol_imag = 1e-9,
                                int k_max = 0);

struct ProbeScale {
    double scale;
    bool found = false;
    std::optional<CVec> witness;     // a fixed point with 0 < |x| <= scale
    double witness_norm = 0.0;
    double witness_residual = 0.0;
};

struct ProbeReport {
    double omega = 0.0;
    double period = 0.0;
    std::vector<ProbeScale> scales;

    bool found_at_every_scale() const;
    bool found_at_no_scale() const;
};

// Searches for nonzero fixed points of the time-2pi/|omega| map at each
// scale s, Newton-started from the shell s/2 <= |x| <= s. A hit must be
// distinct from 0 by 10x newton_tol.
ProbeReport accumulation_probe(const PolynomialMap& field, double omega,
                               const std::vector<double>& scales,
                               const IntegratorConfig& icfg = {},
                               const IndexConfig& cfg = {});

struct DiskModel {
    double omega = 0.0;
    double period = 0.0;   // 2pi / |omega|
    double delta = 0.0;    // parameter radius
    int degree = 0;        // fit degree
    // coeffs[l-2][k-1] is the coefficient of x_1^k in x_l(x_1), l = 2..n.
    // No constant terms: x_l(0) = 0 by construction.
    std::vector<std::vector<cxd>> coeffs;
    double residual_max = 0.0;

    int dim() const { return static_cast<int>(coeffs.size()) + 1; }
    // Full state on the disk over parameter x1.
    CVec point(cxd x1) const;
};

// Builds the polynomial model of the analytic disk x_l = x_l(x_1) by solving
// the transverse fixed-point equations phi_l(x_1, x_2..x_n) = x_l on rings
// |x_1| in {delta/4, delta/2, delta} x 32 angles and least-squares fitting.
// The first-coordinate identity phi_1 = x_1 is verified on every sample.
DiskModel build_disk(const PolynomialMap& field, const SpectralReport& report, double delta,
                     int degree, const IntegratorConfig& icfg = {},
                     const IndexConfig& cfg = {});

struct PeriodicityReport {
    double omega = 0.0;
    double period = 0.0;
    double t0 = 0.0;
    int mstar = 0;  // floor(2pi / (T0 |omega|))
    std::vector<CVec> samples;
    double max_return_error = 0.0;
    // minimality[k-2] = min over samples of the return error at period/k,
    // k = 2..mstar. All entries must stay >= kDiskFailFloor.
    std::vector<double> minimality;
    bool pass = false;
};

// Verifies that the disk consists of orbits of minimal period 2pi/|omega|.
PeriodicityReport verify_disk(const PolynomialMap& field, const DiskModel& disk, double t0,
                              const IntegratorConfig& icfg = {});

struct ScanReport {
    double rho = 0.0;
    double t0 = 0.0;
    double boundary_min_f = 0.0;
    double threshold = 0.0;  // 0.5 * boundary_min_f
    struct GridPoint {
        double t;
        double ratio;  // min over sphere samples of |phi(T,x) - x| / T
    };
    std::vector<GridPoint> grid;
    double min_ratio = 0.0;
    bool pass = false;
};

// Quantitative no-small-period scan: on the sphere |x| = rho, the ratio
// |phi(T,x) - x| / T must stay above half the sampled min of |F| for every
// T in the grid over (0, T0]. T0 must be below 2pi/|omega| when omega is
// known, so the true period is excluded.
ScanReport min_period_scan(const PolynomialMap& field, double rho, double t0, int samples,
                           const IntegratorConfig& icfg = {});

}  // namespace holocenter
