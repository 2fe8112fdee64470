#pragma once

// Dense complex linear algebra for small dimensions (n <= 16): spectra,
// matrix exponentials and linear solves shared by every other engine.
//
// Matrices are Eigen dynamic-size types with a compile-time max of kMaxDim,
// so all storage lives on the stack and values can be copied freely.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "holocenter/errors.hpp"

namespace holocenter {

using cxd = std::complex<double>;

inline constexpr int kMaxDim = 16;

using CVec = Eigen::Matrix<cxd, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using CMat =
    Eigen::Matrix<cxd, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

bool all_finite(const CMat& m);
bool all_finite(const CVec& v);

// Eigenvalue multiset of a square matrix, algebraic multiplicity preserved.
// Values are kept sorted by (re, im) so equal spectra compare equal.
struct Spectrum {
    std::vector<cxd> values;

    int size() const { return static_cast<int>(values.size()); }

    // Multiset comparison within an absolute tolerance (greedy nearest match;
    // adequate for the well-separated spectra this toolkit handles).
    bool approx_equal(const Spectrum& other, double tol) const;
};

// All n eigenvalues with multiplicity. Closed-form for n <= 2, complex Schur
// (Hessenberg + shifted QR) above. Accuracy is backward-stable: expect
// ~1e-13 * ||M|| absolute error on well-conditioned eigenproblems.
Spectrum eigenvalues(const CMat& m);

// e^{tM} by scaling-and-squaring with Pade approximants. Relative error
// <= 1e-12 for ||tM|| <= 10.
CMat expm(const CMat& m, cxd t = cxd(1.0, 0.0));

// Solve Mx = b. Throws SingularSystem when the factorization declares M
// rank-deficient or the verified residual exceeds kLinsolveTol * ||b||.
inline constexpr double kLinsolveTol = 1e-9;
CVec linsolve(const CMat& m, const CVec& b);

}  // namespace holocenter
