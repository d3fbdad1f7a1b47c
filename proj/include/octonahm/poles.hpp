#pragma once

#include <array>
#include <functional>
#include <vector>

#include "octonahm/decoupled.hpp"
#include "octonahm/ratmap.hpp"

namespace octonahm {

// (B1, B2, B3, w): commuting symmetric matrices with a common cyclic vector
// generating equal Krylov filtrations.
struct NahmQuadruple {
    std::array<cmat, 3> B;
    cvec w;

    int k() const { return static_cast<int>(w.size()); }
};

struct QuadrupleReport {
    bool symmetric = false;
    bool commuting = false;
    std::array<bool, 3> cyclic{};
    bool filtration = false;
    double worst_symmetry = 0;
    double worst_commutator = 0;
    double worst_filtration_gap = 0;  // smallest relative singular value margin

    bool valid() const {
        return symmetric && commuting && cyclic[0] && cyclic[1] && cyclic[2] &&
               filtration;
    }
};

QuadrupleReport validate_quadruple(const NahmQuadruple& Q, double tol = 1e-8);

// Residues and weights at the t = 0 pole.
struct PoleData {
    cmat a;
    std::array<cmat, 3> b;
    std::array<cplx, 3> s;
    cvec v;  // unit lowest-weight vector
};

// Nahm complex truncated to [eps, 1-eps].  When built by
// quadruple_to_complex, `sampler` evaluates the fields analytically at any
// t in (0,1); grid consumers fall back to cubic interpolation.
struct NahmComplex {
    TimeGrid grid;  // [eps, 1-eps]
    int k = 1;
    double eps = 1e-2;
    std::vector<cmat> alpha;
    std::array<std::vector<cmat>, 3> beta;
    PoleData pole;
    std::function<void(double t, cmat& alpha_out, std::array<cmat, 3>& beta_out)>
        sampler;

    DecoupledPath as_path() const;
    void sample(double t, cmat& alpha_out, std::array<cmat, 3>& beta_out) const;
};

// The construction from a quadruple: bilinear-orthonormal Krylov (Lanczos)
// basis G in O(k,C), tridiagonal forms B_i', interpolating profile f with
// f(1-t) = 1/f(t), f(t) = t/c near 0 and f = 1 near 1/2, and the diagonal
// gauge p = diag(f^{(k-1)/2}, ..., f^{-(k-1)/2}):
//   alpha = -1/2 (log f)' G E G^-1,  beta_i = G p B_i' p^-1 G^-1.
// The profile constant c is pinned by |w| so that the kappa integration
// returns w itself.
NahmComplex quadruple_to_complex(const NahmQuadruple& Q, double eps, int n);

// kappa: integrate ds/dt + 2 alpha s = 0 with the pole-normalized initial
// value s(eps) ~ eps^{(k-1)/2} (v + eps r1) and read off (beta_i(1/2), s(1/2)).
NahmQuadruple complex_to_quadruple(const NahmComplex& C);

struct ResidueReport {
    cmat a;                      // raw Richardson limit of t alpha(t)
    std::array<cmat, 3> b;       // raw limits of t beta_i(t)
    cmat a_gauged;               // diagonalized, eigenvalues ascending
    std::array<cmat, 3> b_gauged;
    std::array<cplx, 3> s;       // weights, least-squares against b0
    double weight_norm = 0;      // sum |s_i|^2
    double ladder_residual = 0;  // eigenvalues of a vs the a0 ladder
    double fit_residual = 0;     // |b_gauged - s_i b0|
    double pole_identity_linear = 0;  // |2[a,b_i] - b_i| after gauging
    double pole_identity_real = 0;    // |-a + sum [b_i, b_i^*]| after gauging
};

ResidueReport extract_residues(const NahmComplex& C, double tol = 1e-6);

struct PoleSolveReport {
    HermitianPath h;       // original-frame h with h(eps) = h(1-eps) = Id
    double fhat_sup = 0;
    double bound_C = 0;    // fitted constant in |h(t) - Id| <= C min(t, 1-t)
    bool converged = false;
};

PoleSolveReport pole_real_solve(const NahmComplex& C,
                                const KempfNessOptions& opt = {});

// Sup distance of two Hermitian paths over a common interior window.
double interior_sup_distance(const HermitianPath& A, const HermitianPath& B,
                             double w0 = 0.25, double w1 = 0.75, int samples = 201);

struct ReflectionReport {
    double alpha_sup = 0;
    std::array<double, 3> beta_sup{};
    double max() const {
        double m = alpha_sup;
        for (double v : beta_sup) m = std::max(m, v);
        return m;
    }
};

// Sup norms of alpha(1-t) - alpha(t)^T and beta_i(1-t) - beta_i(t)^T.
ReflectionReport check_reflection(const NahmComplex& C);

}  // namespace octonahm
