#include "holocenter/field.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace holocenter {

namespace {

using ExpKey = std::vector<int>;
using PolyTerms = std::map<ExpKey, cxd>;  // one coordinate's monomials, keyed by exponents

int key_degree(const ExpKey& k) {
    int d = 0;
    for (int e : k) d += e;
    return d;
}

std::vector<Monomial> terms_to_monomials(const PolyTerms& terms) {
    std::vector<Monomial> out;
    out.reserve(terms.size());
    for (const auto& [key, c] : terms) {
        if (std::abs(c) < kCoeffDropEps) continue;
        out.push_back(Monomial{c, key});
    }
    return out;
}

// a += c * b, truncated to total degree <= cap
void add_scaled(PolyTerms& a, const PolyTerms& b, cxd c, int cap) {
    for (const auto& [key, bc] : b) {
        if (key_degree(key) > cap) continue;
        a[key] += c * bc;
    }
}

PolyTerms multiply_truncated(const PolyTerms& a, const PolyTerms& b, int cap) {
    PolyTerms out;
    for (const auto& [ka, ca] : a) {
        const int da = key_degree(ka);
        for (const auto& [kb, cb] : b) {
            if (da + key_degree(kb) > cap) continue;
            ExpKey k(ka.size());
            for (size_t j = 0; j < k.size(); ++j) k[j] = ka[j] + kb[j];
            out[k] += ca * cb;
        }
    }
    return out;
}

}  // namespace

PolynomialMap::PolynomialMap(int n, std::vector<std::vector<Monomial>> coords, std::string name)
    : n_(n), name_(std::move(name)) {
    if (n < 1 || n > kMaxDim)
        throw InvalidInput("PolynomialMap: dimension must be in [1, 16]");
    if (static_cast<int>(coords.size()) != n)
        throw InvalidInput("PolynomialMap: coordinate count must equal n");

    coords_.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        PolyTerms terms;
        for (const Monomial& m : coords[static_cast<size_t>(i)]) {
            if (static_cast<int>(m.exponents.size()) != n)
                throw InvalidInput("PolynomialMap: exponent tuple length must equal n");
            for (int e : m.exponents)
                if (e < 0) throw InvalidInput("PolynomialMap: negative exponent");
            if (m.total_degree() > kDegreeCap)
                throw InvalidInput("PolynomialMap: monomial degree exceeds cap 12");
            if (!(std::isfinite(m.coeff.real()) && std::isfinite(m.coeff.imag())))
                throw InvalidInput("PolynomialMap: non-finite coefficient");
            terms[m.exponents] += m.coeff;
        }
        coords_[static_cast<size_t>(i)] = terms_to_monomials(terms);
        for (const Monomial& m : coords_[static_cast<size_t>(i)])
            max_degree_ = std::max(max_degree_, m.total_degree());
    }
}

bool PolynomialMap::singular_at_origin() const {
    for (const auto& coord : coords_)
        for (const Monomial& m : coord)
            if (m.total_degree() == 0) return false;
    return true;
}

CVec PolynomialMap::evaluate(const CVec& x) const {
    if (x.size() != n_) throw InvalidInput("evaluate: point dimension mismatch");

    // Power table: pows[j][e] = x_j^e for e up to the map's max degree.
    std::array<std::array<cxd, kDegreeCap + 1>, kMaxDim> pows;
    for (int j = 0; j < n_; ++j) {
        pows[j][0] = cxd(1.0, 0.0);
        for (int e = 1; e <= max_degree_; ++e) pows[j][e] = pows[j][e - 1] * x(j);
    }

    CVec out(n_);
    for (int i = 0; i < n_; ++i) {
        cxd acc(0.0, 0.0);
        for (const Monomial& m : coords_[static_cast<size_t>(i)]) {
            cxd term = m.coeff;
            for (int j = 0; j < n_; ++j) {
                const int e = m.exponents[static_cast<size_t>(j)];
                if (e) term *= pows[j][e];
            }
            acc += term;
        }
        out(i) = acc;
    }
    return out;
}

CMat PolynomialMap::jacobian_at(const CVec& x) const {
    CVec unused;
    CMat jac;
    evaluate_with_jacobian(x, unused, jac);
    return jac;
}

void PolynomialMap::evaluate_with_jacobian(const CVec& x, CVec& value, CMat& jac) const {
    if (x.size() != n_) throw InvalidInput("jacobian_at: point dimension mismatch");

    std::array<std::array<cxd, kDegreeCap + 1>, kMaxDim> pows;
    for (int j = 0; j < n_; ++j) {
        pows[j][0] = cxd(1.0, 0.0);
        for (int e = 1; e <= max_degree_; ++e) pows[j][e] = pows[j][e - 1] * x(j);
    }

    value.resize(n_);
    jac.resize(n_, n_);
    jac.setZero();
    for (int i = 0; i < n_; ++i) {
        cxd acc(0.0, 0.0);
        for (const Monomial& m : coords_[static_cast<size_t>(i)]) {
            // monomial value, and d/dx_j = e_j * coeff * x^(e - e_j)
            cxd term = m.coeff;
            for (int j = 0; j < n_; ++j) {
                const int e = m.exponents[static_cast<size_t>(j)];
                if (e) term *= pows[j][e];
            }
            acc += term;
            for (int j = 0; j < n_; ++j) {
                const int e = m.exponents[static_cast<size_t>(j)];
                if (!e) continue;
                cxd d = m.coeff * static_cast<double>(e);
                for (int k = 0; k < n_; ++k) {
                    const int ek = m.exponents[static_cast<size_t>(k)] - (k == j ? 1 : 0);
                    if (ek) d *= pows[k][ek];
                }
                jac(i, j) += d;
            }
        }
        value(i) = acc;
    }
}

PolynomialMap identity_map(int n) {
    std::vector<std::vector<Monomial>> coords(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::vector<int> exps(static_cast<size_t>(n), 0);
        exps[static_cast<size_t>(i)] = 1;
        coords[static_cast<size_t>(i)].push_back(Monomial{cxd(1.0, 0.0), exps});
    }
    return PolynomialMap(n, std::move(coords), "identity");
}

PolynomialMap compose_truncated(const PolynomialMap& f, const PolynomialMap& g, int degree) {
    if (f.dim() != g.dim()) throw InvalidInput("compose_truncated: dimension mismatch");
    if (degree < 0 || degree > kDegreeCap)
        throw InvalidInput("compose_truncated: degree exceeds cap 12");
    const int n = f.dim();

    // Coordinates of g as term maps, plus a cache of their truncated powers.
    std::vector<PolyTerms> g_terms(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j)
        for (const Monomial& m : g.coords()[static_cast<size_t>(j)])
            g_terms[static_cast<size_t>(j)][m.exponents] = m.coeff;

    std::vector<std::vector<PolyTerms>> g_pows(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        PolyTerms one;
        one[ExpKey(static_cast<size_t>(n), 0)] = cxd(1.0, 0.0);
        g_pows[static_cast<size_t>(j)].push_back(std::move(one));  // g_j^0
    }
    auto g_power = [&](int j, int e) -> const PolyTerms& {
        auto& cache = g_pows[static_cast<size_t>(j)];
        while (static_cast<int>(cache.size()) <= e)
            cache.push_back(
                multiply_truncated(cache.back(), g_terms[static_cast<size_t>(j)], degree));
        return cache[static_cast<size_t>(e)];
    };

    std::vector<std::vector<Monomial>> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        PolyTerms acc;
        for (const Monomial& m : f.coords()[static_cast<size_t>(i)]) {
            PolyTerms prod;
            prod[ExpKey(static_cast<size_t>(n), 0)] = cxd(1.0, 0.0);
            for (int j = 0; j < n; ++j) {
                const int e = m.exponents[static_cast<size_t>(j)];
                if (e) prod = multiply_truncated(prod, g_power(j, e), degree);
            }
            add_scaled(acc, prod, m.coeff, degree);
        }
        out[static_cast<size_t>(i)] = terms_to_monomials(acc);
    }
    return PolynomialMap(n, std::move(out));
}

PolynomialMap iterate_truncated(const PolynomialMap& f, int m, int degree) {
    if (m < 1) throw InvalidInput("iterate_truncated: m must be >= 1");
    PolynomialMap acc = f;
    for (int k = 1; k < m; ++k) acc = compose_truncated(f, acc, degree);
    return acc;
}

PolynomialMap scale_time(const PolynomialMap& f, cxd c) {
    if (std::abs(c) == 0.0) throw InvalidInput("scale_time: scalar must be nonzero");
    std::vector<std::vector<Monomial>> coords = f.coords();
    for (auto& coord : coords)
        for (Monomial& m : coord) m.coeff *= c;
    return PolynomialMap(f.dim(), std::move(coords), f.name());
}

PolynomialMap perturb_linear(const PolynomialMap& f, const CVec& eps) {
    if (eps.size() != f.dim()) throw InvalidInput("perturb_linear: eps length mismatch");
    std::vector<std::vector<Monomial>> coords = f.coords();
    for (int l = 0; l < f.dim(); ++l) {
        std::vector<int> exps(static_cast<size_t>(f.dim()), 0);
        exps[static_cast<size_t>(l)] = 1;
        coords[static_cast<size_t>(l)].push_back(Monomial{eps(l), std::move(exps)});
    }
    return PolynomialMap(f.dim(), std::move(coords), f.name());
}

PolynomialMap parse_field(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("field document", e.what());
    }

    if (!doc.is_object()) throw ParseError("field document", "top level must be an object");
    if (!doc.contains("n") || !doc["n"].is_number_integer())
        throw ParseError("n", "missing or non-integer dimension");
    const int n = doc["n"].get<int>();
    if (n < 1 || n > kMaxDim) throw ParseError("n", "dimension must be in [1, 16]");

    std::string name;
    if (doc.contains("name")) {
        if (!doc["name"].is_string()) throw ParseError("name", "must be a string");
        name = doc["name"].get<std::string>();
    }

    if (!doc.contains("coords") || !doc["coords"].is_array())
        throw ParseError("coords", "missing or not an array");
    if (static_cast<int>(doc["coords"].size()) != n)
        throw ParseError("coords", "must contain exactly n coordinate arrays");

    std::vector<std::vector<Monomial>> coords(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto& arr = doc["coords"][static_cast<size_t>(i)];
        std::ostringstream where;
        where << "coords[" << i << "]";
        if (!arr.is_array()) throw ParseError(where.str(), "coordinate must be an array");
        for (size_t k = 0; k < arr.size(); ++k) {
            std::ostringstream mw;
            mw << "coords[" << i << "][" << k << "]";
            const auto& mj = arr[k];
            if (!mj.is_object()) throw ParseError(mw.str(), "monomial must be an object");
            if (!mj.contains("re") || !mj.contains("im") || !mj.contains("exp"))
                throw ParseError(mw.str(), "monomial needs re, im, exp");
            if (!mj["re"].is_number() || !mj["im"].is_number())
                throw ParseError(mw.str() + ".re/im", "must be numbers");
            if (!mj["exp"].is_array())
                throw ParseError(mw.str() + ".exp", "must be an array");
            if (static_cast<int>(mj["exp"].size()) != n)
                throw ParseError(mw.str() + ".exp", "length must equal n");
            Monomial m;
            m.coeff = cxd(mj["re"].get<double>(), mj["im"].get<double>());
            m.exponents.resize(static_cast<size_t>(n));
            int total = 0;
            for (int j = 0; j < n; ++j) {
                const auto& ej = mj["exp"][static_cast<size_t>(j)];
                if (!ej.is_number_integer())
                    throw ParseError(mw.str() + ".exp", "exponents must be integers");
                const int e = ej.get<int>();
                if (e < 0) throw ParseError(mw.str() + ".exp", "negative exponent");
                m.exponents[static_cast<size_t>(j)] = e;
                total += e;
            }
            if (total > kDegreeCap)
                throw ParseError(mw.str(), "total degree exceeds cap 12");
            if (!(std::isfinite(m.coeff.real()) && std::isfinite(m.coeff.imag())))
                throw ParseError(mw.str(), "non-finite coefficient");
            coords[static_cast<size_t>(i)].push_back(std::move(m));
        }
    }
    return PolynomialMap(n, std::move(coords), name);
}

std::string serialize_field(const PolynomialMap& f) {
    nlohmann::ordered_json doc;
    doc["n"] = f.dim();
    if (!f.name().empty()) doc["name"] = f.name();
    doc["coords"] = nlohmann::json::array();
    for (const auto& coord : f.coords()) {
        nlohmann::ordered_json arr = nlohmann::json::array();
        for (const Monomial& m : coord) {
            nlohmann::ordered_json mj;
            mj["re"] = m.coeff.real();
            mj["im"] = m.coeff.imag();
            mj["exp"] = m.exponents;
            arr.push_back(std::move(mj));
        }
        doc["coords"].push_back(std::move(arr));
    }
    return doc.dump();
}

}  // namespace holocenter
