#pragma once

#include <vector>

#include "octonahm/lie.hpp"

namespace octonahm {

// Based rational map f(z) = p(z)/q(z) of degree k: q monic of degree k,
// deg p <= k-1, p and q coprime.  Coefficients ascending in the degree.
struct RationalMap {
    std::vector<cplx> p;
    std::vector<cplx> q;

    int degree() const { return static_cast<int>(q.size()) - 1; }
    cplx eval(cplx z) const;
};

// Monic characteristic polynomial of B, ascending coefficients
// (Faddeev-LeVerrier).
std::vector<cplx> char_poly(const cmat& B);

// f(z) = w^T (z Id - B)^(-1) w for symmetric B with cyclic vector w:
// q = charpoly(B), p = w^T adj(z Id - B) w.  Throws when w is not cyclic
// (detected as a common root of p and q within tol).
RationalMap rational_map(const cmat& B, const cvec& w, double tol = 1e-8);

// Closed form for the k = 2 family B = [[p, q], [q, p + q s]], w = sqrt(tau) e1:
// f(z) = tau (z - p - q s) / ((z - p)(z - p - q s) - q^2).
RationalMap rational_map_k2(cplx p_i, cplx q_i, cplx tau, cplx s);

double coefficient_distance(const RationalMap& a, const RationalMap& b);

}  // namespace octonahm
