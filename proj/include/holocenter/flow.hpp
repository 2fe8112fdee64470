#pragma once

// Real-time integration of the holomorphic system xdot = F(x) over complex
// state: time-T maps, their Jacobians via jointly integrated variational
// equations, dense trajectories and return errors.
//
// Complex time directions are handled by rescaling the field (scale_time),
// never by complex step sizes; the integrator itself only marches real t.

#include <iosfwd>
#include <vector>

#include "holocenter/field.hpp"
#include "holocenter/linalg.hpp"

namespace holocenter {

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.25;
    long max_steps = 2000000;
    // Integration aborts with Blowup once |x(t)| exceeds this radius.
    double escape_radius = 10.0;

    void validate() const;
};

struct Trajectory {
    std::vector<double> times;   // strictly increasing, starts at 0
    std::vector<CVec> states;    // one per time; states[0] is the initial condition
};

// phi(tau, x0): the time-tau map of the local flow.
CVec flow_map(const PolynomialMap& field, double tau, const CVec& x0,
              const IntegratorConfig& cfg = {});

// Jacobian of x -> phi(tau, x) at x0, by integrating W' = F'(x(t)) W, W(0) = I
// alongside the trajectory. At x0 = 0 this reproduces expm(F'(0), tau).
CMat flow_jacobian(const PolynomialMap& field, double tau, const CVec& x0,
                   const IntegratorConfig& cfg = {});

// Both at once (one integration pass).
void flow_with_jacobian(const PolynomialMap& field, double tau, const CVec& x0,
                        const IntegratorConfig& cfg, CVec& x_out, CMat& jac_out);

// Trajectory sampled at `samples` equally spaced times including both endpoints.
Trajectory integrate_trajectory(const PolynomialMap& field, const CVec& x0, double t_end,
                                int samples, const IntegratorConfig& cfg = {});

// | phi(tau, x) - x | in the Euclidean norm.
double return_error(const PolynomialMap& field, double tau, const CVec& x,
                    const IntegratorConfig& cfg = {});

// The flow-induced holomorphic map Phi_tau(x) = phi(tau, x).
struct TimeTMap {
    PolynomialMap field;
    double tau;
    IntegratorConfig config;

    TimeTMap(PolynomialMap f, double t, IntegratorConfig c = {});

    CVec apply(const CVec& x) const { return flow_map(field, tau, x, config); }
    CMat jacobian(const CVec& x) const { return flow_jacobian(field, tau, x, config); }
};

// Phi_tau applied m times; agrees with flow_map at time m*tau within
// accumulated tolerance.
CVec map_iterate(const TimeTMap& map, int m, const CVec& x);

// CSV export: header t,re_1,im_1,...,re_n,im_n, 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

}  // namespace holocenter
