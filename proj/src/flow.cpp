#include "holocenter/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace holocenter {

void IntegratorConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw InvalidInput("IntegratorConfig: tolerances must be positive");
    if (!(max_step > 0.0)) throw InvalidInput("IntegratorConfig: max_step must be positive");
    if (max_steps < 1) throw InvalidInput("IntegratorConfig: max_steps must be >= 1");
    if (!(escape_radius > 0.0))
        throw InvalidInput("IntegratorConfig: escape_radius must be positive");
}

namespace {

// Dormand-Prince 5(4) tableau (FSAL).
constexpr double kC[7] = {0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5.0},
    {3.0 / 40.0, 9.0 / 40.0},
    {44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0},
    {19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0},
    {9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0},
    {35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0}};
// 5th-order weights equal kA[6]; error weights are b5 - b4.
constexpr double kE[7] = {71.0 / 57600.0,     0.0,
                          -71.0 / 16695.0,    71.0 / 1920.0,
                          -17253.0 / 339200.0, 22.0 / 525.0,
                          -1.0 / 40.0};

// Flat complex state: first n entries are x; when with_jacobian, the next
// n*n entries are the sensitivity matrix W (column-major), W' = F'(x) W.
struct RhsEvaluator {
    const PolynomialMap& field;
    int n;
    bool with_jacobian;

    int state_size() const { return with_jacobian ? n + n * n : n; }

    void operator()(const std::vector<cxd>& y, std::vector<cxd>& dy) const {
        CVec x(n);
        for (int i = 0; i < n; ++i) x(i) = y[static_cast<size_t>(i)];
        if (!with_jacobian) {
            const CVec fx = field.evaluate(x);
            for (int i = 0; i < n; ++i) dy[static_cast<size_t>(i)] = fx(i);
            return;
        }
        CVec fx;
        CMat jac;
        field.evaluate_with_jacobian(x, fx, jac);
        for (int i = 0; i < n; ++i) dy[static_cast<size_t>(i)] = fx(i);
        // dW = J * W, W stored column-major after x
        for (int col = 0; col < n; ++col) {
            for (int row = 0; row < n; ++row) {
                cxd acc(0.0, 0.0);
                for (int k = 0; k < n; ++k)
                    acc += jac(row, k) * y[static_cast<size_t>(n + col * n + k)];
                dy[static_cast<size_t>(n + col * n + row)] = acc;
            }
        }
    }
};

double state_norm(const std::vector<cxd>& y, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::norm(y[static_cast<size_t>(i)]);
    return std::sqrt(s);
}

// Integrates from t = 0 to t = t_end, invoking on_sample(t, y) at every time
// in sorted sample_times (which must end with t_end). Core of all flow ops.
template <typename OnSample>
void integrate(const RhsEvaluator& rhs, std::vector<cxd> y, double t_end,
               const std::vector<double>& sample_times, const IntegratorConfig& cfg,
               OnSample&& on_sample) {
    cfg.validate();
    const size_t dim = static_cast<size_t>(rhs.state_size());
    const int n = rhs.n;

    std::vector<cxd> k[7];
    for (auto& ki : k) ki.assign(dim, cxd(0.0, 0.0));
    std::vector<cxd> y_stage(dim), y_new(dim);

    double t = 0.0;
    size_t next_sample = 0;
    while (next_sample < sample_times.size() && sample_times[next_sample] <= 0.0) {
        on_sample(0.0, y);
        ++next_sample;
    }
    if (t_end <= 0.0) return;

    rhs(y, k[0]);  // FSAL seed

    // Initial step from the local derivative scale.
    double h = cfg.max_step;
    {
        const double d0 = std::max(state_norm(y, n), 1e-8);
        const double d1 = std::max(state_norm(k[0], n), 1e-8);
        h = std::min({cfg.max_step, t_end, 0.01 * d0 / d1});
        if (!(h > 0.0)) h = std::min(cfg.max_step, t_end);
    }

    long steps = 0;
    while (t < t_end) {
        if (++steps > cfg.max_steps) throw StepLimit("flow: step limit exceeded");

        double target = t_end;
        if (next_sample < sample_times.size())
            target = std::min(target, sample_times[next_sample]);
        double h_step = h;
        bool clipped = false;
        if (t + h_step >= target) {
            h_step = target - t;
            clipped = true;
        }

        for (int s = 1; s < 7; ++s) {
            for (size_t i = 0; i < dim; ++i) {
                cxd acc = y[i];
                for (int j = 0; j < s; ++j)
                    if (kA[s][j] != 0.0) acc += h_step * kA[s][j] * k[j][i];
                y_stage[i] = acc;
            }
            rhs(y_stage, k[s]);
        }
        // stage 6 state is already the 5th-order solution (FSAL)
        y_new = y_stage;

        double err = 0.0;
        for (size_t i = 0; i < dim; ++i) {
            cxd e(0.0, 0.0);
            for (int j = 0; j < 7; ++j)
                if (kE[j] != 0.0) e += kE[j] * k[j][i];
            e *= h_step;
            const double sc =
                cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            const double r = std::abs(e) / sc;
            err += r * r;
        }
        err = std::sqrt(err / static_cast<double>(dim));

        const double safety = 0.9;
        double factor = (err > 0.0) ? safety * std::pow(err, -0.2) : 5.0;
        factor = std::clamp(factor, 0.2, 5.0);

        if (err <= 1.0) {
            t = clipped ? target : t + h_step;
            y.swap(y_new);
            k[0] = k[6];  // FSAL
            if (state_norm(y, n) > cfg.escape_radius)
                throw Blowup("flow: trajectory escaped the trust ball");
            while (next_sample < sample_times.size() && sample_times[next_sample] <= t) {
                on_sample(t, y);
                ++next_sample;
            }
            // A step shortened only to land on a sample must not drag the
            // controller down; keep the larger of the two suggestions.
            h = clipped ? std::min(std::max(h, h_step * factor), cfg.max_step)
                        : std::min(h_step * factor, cfg.max_step);
        } else {
            h = h_step * factor;
        }
        if (!(h > 0.0) || t + h == t)
            throw StepLimit("flow: step size underflow");
    }
}

std::vector<cxd> pack_state(const CVec& x0, bool with_jacobian) {
    const int n = static_cast<int>(x0.size());
    std::vector<cxd> y(static_cast<size_t>(with_jacobian ? n + n * n : n), cxd(0.0, 0.0));
    for (int i = 0; i < n; ++i) y[static_cast<size_t>(i)] = x0(i);
    if (with_jacobian)
        for (int i = 0; i < n; ++i) y[static_cast<size_t>(n + i * n + i)] = cxd(1.0, 0.0);
    return y;
}

void check_flow_args(const PolynomialMap& field, double tau, const CVec& x0) {
    if (x0.size() != field.dim()) throw InvalidInput("flow: state dimension mismatch");
    if (!all_finite(x0)) throw InvalidInput("flow: non-finite initial state");
    if (!(tau >= 0.0) || !std::isfinite(tau))
        throw InvalidInput("flow: tau must be finite and >= 0 (reverse time via scale_time)");
}

}  // namespace

CVec flow_map(const PolynomialMap& field, double tau, const CVec& x0,
              const IntegratorConfig& cfg) {
    check_flow_args(field, tau, x0);
    const int n = field.dim();
    RhsEvaluator rhs{field, n, false};
    CVec out = x0;
    integrate(rhs, pack_state(x0, false), tau, {tau}, cfg,
              [&](double, const std::vector<cxd>& y) {
                  for (int i = 0; i < n; ++i) out(i) = y[static_cast<size_t>(i)];
              });
    return out;
}

void flow_with_jacobian(const PolynomialMap& field, double tau, const CVec& x0,
                        const IntegratorConfig& cfg, CVec& x_out, CMat& jac_out) {
    check_flow_args(field, tau, x0);
    const int n = field.dim();
    RhsEvaluator rhs{field, n, true};
    x_out = x0;
    jac_out = CMat::Identity(n, n);
    integrate(rhs, pack_state(x0, true), tau, {tau}, cfg,
              [&](double, const std::vector<cxd>& y) {
                  for (int i = 0; i < n; ++i) x_out(i) = y[static_cast<size_t>(i)];
                  for (int col = 0; col < n; ++col)
                      for (int row = 0; row < n; ++row)
                          jac_out(row, col) = y[static_cast<size_t>(n + col * n + row)];
              });
}

CMat flow_jacobian(const PolynomialMap& field, double tau, const CVec& x0,
                   const IntegratorConfig& cfg) {
    CVec x;
    CMat jac;
    flow_with_jacobian(field, tau, x0, cfg, x, jac);
    return jac;
}

Trajectory integrate_trajectory(const PolynomialMap& field, const CVec& x0, double t_end,
                                int samples, const IntegratorConfig& cfg) {
    if (samples < 2) throw InvalidInput("integrate_trajectory: samples must be >= 2");
    if (!(t_end > 0.0)) throw InvalidInput("integrate_trajectory: t_end must be positive");
    check_flow_args(field, t_end, x0);

    std::vector<double> sample_times(static_cast<size_t>(samples));
    for (int i = 0; i < samples; ++i)
        sample_times[static_cast<size_t>(i)] =
            t_end * static_cast<double>(i) / static_cast<double>(samples - 1);
    sample_times.back() = t_end;

    const int n = field.dim();
    Trajectory tr;
    RhsEvaluator rhs{field, n, false};
    integrate(rhs, pack_state(x0, false), t_end, sample_times, cfg,
              [&](double t, const std::vector<cxd>& y) {
                  CVec x(n);
                  for (int i = 0; i < n; ++i) x(i) = y[static_cast<size_t>(i)];
                  tr.times.push_back(t);
                  tr.states.push_back(std::move(x));
              });
    return tr;
}

double return_error(const PolynomialMap& field, double tau, const CVec& x,
                    const IntegratorConfig& cfg) {
    return (flow_map(field, tau, x, cfg) - x).norm();
}

TimeTMap::TimeTMap(PolynomialMap f, double t, IntegratorConfig c)
    : field(std::move(f)), tau(t), config(c) {
    if (!(tau > 0.0)) throw InvalidInput("TimeTMap: tau must be positive");
    config.validate();
}

CVec map_iterate(const TimeTMap& map, int m, const CVec& x) {
    if (m < 1) throw InvalidInput("map_iterate: m must be >= 1");
    CVec y = x;
    for (int k = 0; k < m; ++k) y = map.apply(y);
    return y;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    const int n = tr.states.empty() ? 0 : static_cast<int>(tr.states.front().size());
    os << "t";
    for (int j = 1; j <= n; ++j) os << ",re_" << j << ",im_" << j;
    os << "\n";
    char buf[64];
    for (size_t i = 0; i < tr.times.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", tr.times[i]);
        os << buf;
        for (int j = 0; j < n; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", tr.states[i](j).real());
            os << ',' << buf;
            std::snprintf(buf, sizeof(buf), "%.17g", tr.states[i](j).imag());
            os << ',' << buf;
        }
        os << "\n";
    }
}

}  // namespace holocenter
