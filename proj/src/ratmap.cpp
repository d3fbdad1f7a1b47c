#include "octonahm/ratmap.hpp"

#include <cmath>
#include <stdexcept>

namespace octonahm {

cplx RationalMap::eval(cplx z) const {
    auto horner = [&](const std::vector<cplx>& c) {
        cplx v = 0;
        for (size_t i = c.size(); i-- > 0;) v = v * z + c[i];
        return v;
    };
    return horner(p) / horner(q);
}

std::vector<cplx> char_poly(const cmat& B) {
    // Faddeev-LeVerrier: M_1 = I, c_{k-1} = -tr(B M_1), ...
    const int k = static_cast<int>(B.rows());
    std::vector<cplx> c(k + 1);
    c[k] = 1.0;
    cmat M = cmat::Identity(k, k);
    for (int m = 1; m <= k; ++m) {
        const cmat BM = B * M;
        const cplx cm = -BM.trace() / double(m);
        c[k - m] = cm;
        M = BM + cm * cmat::Identity(k, k);
    }
    return c;
}

RationalMap rational_map(const cmat& B, const cvec& w, double tol) {
    const int k = static_cast<int>(B.rows());
    if (w.size() != k) throw std::invalid_argument("rational_map: size mismatch");
    RationalMap f;
    f.q = char_poly(B);
    // adj(z Id - B) = sum_j z^j C_j via the same recursion:
    // C_{k-1} = I, C_{j-1} = B C_j + q_j I.
    std::vector<cmat> C(k);
    C[k - 1] = cmat::Identity(k, k);
    for (int j = k - 1; j >= 1; --j) C[j - 1] = B * C[j] + f.q[j] * cmat::Identity(k, k);
    f.p.resize(k);
    for (int j = 0; j < k; ++j) f.p[j] = (w.transpose() * C[j] * w).value();

    // cyclicity <=> p and q share no root: check q's roots against p
    Eigen::ComplexEigenSolver<cmat> es(B);
    double scale = 0;
    for (const cplx& c : f.p) scale = std::max(scale, std::abs(c));
    for (int i = 0; i < k; ++i) {
        cplx v = 0;
        const cplx z = es.eigenvalues()(i);
        for (size_t d = f.p.size(); d-- > 0;) v = v * z + f.p[d];
        if (std::abs(v) <= tol * std::max(1.0, scale))
            throw std::invalid_argument(
                "rational_map: w is not cyclic for B (p and q share a root)");
    }
    return f;
}

RationalMap rational_map_k2(cplx p_i, cplx q_i, cplx tau, cplx s) {
    if (std::abs(q_i) == 0.0 || std::abs(tau) == 0.0)
        throw std::invalid_argument("rational_map_k2: need q != 0 and tau != 0");
    RationalMap f;
    // tau (z - p - q s) / ((z - p)(z - p - q s) - q^2), denominator monic
    const cplx r = p_i + q_i * s;
    f.p = {-tau * r, tau};
    f.q = {p_i * r - q_i * q_i, -(p_i + r), 1.0};
    return f;
}

double coefficient_distance(const RationalMap& a, const RationalMap& b) {
    if (a.p.size() != b.p.size() || a.q.size() != b.q.size())
        return std::numeric_limits<double>::infinity();
    double d = 0;
    for (size_t i = 0; i < a.p.size(); ++i) d = std::max(d, std::abs(a.p[i] - b.p[i]));
    for (size_t i = 0; i < a.q.size(); ++i) d = std::max(d, std::abs(a.q[i] - b.q[i]));
    return d;
}

}  // namespace octonahm
