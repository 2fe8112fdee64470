#include "holocenter/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace holocenter {

namespace {

bool finite(const cxd& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void require_square_finite(const CMat& m, const char* op) {
    if (m.rows() != m.cols())
        throw InvalidInput(std::string(op) + ": matrix must be square");
    if (m.rows() < 1 || m.rows() > kMaxDim)
        throw InvalidInput(std::string(op) + ": dimension out of range [1, 16]");
    if (!all_finite(m)) throw InvalidInput(std::string(op) + ": non-finite entries");
}

}  // namespace

bool all_finite(const CMat& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (!finite(m(i, j))) return false;
    return true;
}

bool all_finite(const CVec& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (!finite(v(i))) return false;
    return true;
}

bool Spectrum::approx_equal(const Spectrum& other, double tol) const {
    if (values.size() != other.values.size()) return false;
    std::vector<bool> used(values.size(), false);
    for (const cxd& a : values) {
        int best = -1;
        double best_d = tol;
        for (size_t k = 0; k < other.values.size(); ++k) {
            if (used[k]) continue;
            double d = std::abs(a - other.values[k]);
            if (d <= best_d) {
                best_d = d;
                best = static_cast<int>(k);
            }
        }
        if (best < 0) return false;
        used[best] = true;
    }
    return true;
}

Spectrum eigenvalues(const CMat& m) {
    require_square_finite(m, "eigenvalues");
    const Eigen::Index n = m.rows();

    Spectrum s;
    s.values.reserve(static_cast<size_t>(n));

    if (n == 1) {
        s.values.push_back(m(0, 0));
    } else if (n == 2) {
        // Closed-form quadratic roots, with the usual cancellation-free split:
        // take the root that adds constructively to the trace, divide for the other.
        const cxd tr = m(0, 0) + m(1, 1);
        const cxd det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        cxd disc = std::sqrt(tr * tr - 4.0 * det);
        if (std::real(std::conj(tr) * disc) < 0.0) disc = -disc;
        const cxd r1 = 0.5 * (tr + disc);
        const cxd r2 = (std::abs(r1) > 0.0) ? det / r1 : 0.5 * (tr - disc);
        s.values.push_back(r1);
        s.values.push_back(r2);
    } else {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, /*computeEigenvectors=*/false);
        if (solver.info() != Eigen::Success)
            throw Error("eigenvalues: QR iteration failed to converge");
        for (Eigen::Index i = 0; i < n; ++i) s.values.push_back(solver.eigenvalues()(i));
    }

    std::sort(s.values.begin(), s.values.end(), [](const cxd& a, const cxd& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return s;
}

CMat expm(const CMat& m, cxd t) {
    require_square_finite(m, "expm");
    if (!finite(t)) throw InvalidInput("expm: non-finite scalar");
    Eigen::MatrixXcd a = t * m;
    CMat out = a.exp();
    return out;
}

CVec linsolve(const CMat& m, const CVec& b) {
    require_square_finite(m, "linsolve");
    if (b.size() != m.rows()) throw InvalidInput("linsolve: rhs length mismatch");
    if (!all_finite(b)) throw InvalidInput("linsolve: non-finite rhs");

    Eigen::FullPivLU<CMat> lu(m);
    if (!lu.isInvertible()) throw SingularSystem("linsolve: matrix is singular");

    CVec x = lu.solve(b);
    // One step of iterative refinement, then verify the residual for real.
    CVec r = b - m * x;
    x += lu.solve(r).eval();
    r = b - m * x;
    const double bnorm = b.norm();
    if (r.norm() > kLinsolveTol * std::max(bnorm, 1e-300))
        throw SingularSystem("linsolve: residual exceeds tolerance (ill-conditioned)");
    return x;
}

}  // namespace holocenter
