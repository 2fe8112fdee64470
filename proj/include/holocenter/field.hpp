#pragma once

// Holomorphic polynomial maps C^n -> C^n: sparse monomial representation,
// evaluation, exact Jacobians, truncated composition, time rescaling and
// linear perturbation. This is the common currency of the toolkit; both the
// vector field F of the system xdot = F(x) and discrete maps f live here.

#include <cstdint>
#include <string>
#include <vector>

#include "holocenter/linalg.hpp"

namespace holocenter {

inline constexpr int kDegreeCap = 12;

// Coefficients with magnitude below this are dropped during normalization,
// which keeps truncated compositions compact and deterministic.
inline constexpr double kCoeffDropEps = 1e-15;

struct Monomial {
    cxd coeff;
    std::vector<int> exponents;  // length n, entries >= 0, total degree <= kDegreeCap

    int total_degree() const {
        int d = 0;
        for (int e : exponents) d += e;
        return d;
    }
};

class PolynomialMap {
   public:
    // Validates dimensions/degrees and normalizes: merges duplicate exponent
    // tuples, drops near-zero coefficients, sorts monomials.
    PolynomialMap(int n, std::vector<std::vector<Monomial>> coords, std::string name = "");

    int dim() const { return n_; }
    const std::string& name() const { return name_; }
    const std::vector<std::vector<Monomial>>& coords() const { return coords_; }

    // True when every coordinate has zero constant term, i.e. F(0) = 0.
    bool singular_at_origin() const;

    int max_total_degree() const { return max_degree_; }

    CVec evaluate(const CVec& x) const;
    CMat jacobian_at(const CVec& x) const;

    // Evaluate the map and its Jacobian in one pass (integrator hot path).
    void evaluate_with_jacobian(const CVec& x, CVec& value, CMat& jac) const;

   private:
    int n_;
    int max_degree_ = 0;
    std::vector<std::vector<Monomial>> coords_;
    std::string name_;
};

// The identity map x -> x in dimension n.
PolynomialMap identity_map(int n);

// Taylor truncation of f(g(x)) to total degree <= degree. Coefficients of
// degree <= degree are computed exactly (up to floating round-off); higher
// terms are dropped.
PolynomialMap compose_truncated(const PolynomialMap& f, const PolynomialMap& g, int degree);

// f composed with itself m times, truncated to total degree <= degree.
PolynomialMap iterate_truncated(const PolynomialMap& f, int m, int degree);

// c * F. Rescaling time t -> t/c in xdot = F(x); the linear-part spectrum
// scales by c. c = 0 is rejected.
PolynomialMap scale_time(const PolynomialMap& f, cxd c);

// f + diag(eps) * x: adds eps_l * x_l to coordinate l.
PolynomialMap perturb_linear(const PolynomialMap& f, const CVec& eps);

// Field document (JSON) parsing and serialization. The format:
//   {"n": 2, "name": "...", "coords": [[{"re":0,"im":1,"exp":[1,0]}, ...], ...]}
// parse_field throws ParseError with a location string on malformed input.
// serialize/parse round-trip bit-identically for finite coefficients.
PolynomialMap parse_field(const std::string& text);
std::string serialize_field(const PolynomialMap& f);

}  // namespace holocenter
