#pragma once

#include <array>
#include <vector>

#include "octonahm/grid.hpp"
#include "octonahm/lie.hpp"

namespace octonahm {

// Decoupled fields (alpha, beta1, beta2, beta3) on a uniform grid.
// alpha = 1/2(X0 + iX1), beta_i the complex pairs of the remaining slots.
struct DecoupledPath {
    TimeGrid grid;
    int k = 1;
    std::vector<cmat> alpha;
    std::array<std::vector<cmat>, 3> beta;

    static DecoupledPath zero(const TimeGrid& g, int k);
    static DecoupledPath constant(const TimeGrid& g, const cmat& alpha0,
                                  const std::array<cmat, 3>& beta0);
};

// All time derivatives in this module use the same 4th-order centered
// stencils (one-sided at the ends), so the solver, the gauge action and the
// residual evaluators measure one and the same discrete system.
inline constexpr int kDecoupledFdOrder = 4;

struct ComplexResidual {
    std::array<double, 3> evolution;    // sup |dbeta_i/dt + 2[alpha, beta_i]|_F
    std::array<double, 3> commutators;  // sup |[beta_i, beta_j]|_F, pairs (12),(13),(23)
    double max() const;
};

ComplexResidual complex_residual(const DecoupledPath& P,
                                 int fd_order = kDecoupledFdOrder);

// F_hat = d/dt(alpha + alpha^*) + 2([alpha,alpha^*] + sum [beta_i, beta_i^*]).
std::vector<cmat> real_residual(const DecoupledPath& P,
                                int fd_order = kDecoupledFdOrder);
// Sup of the Frobenius norm over interior nodes (the endpoints of a
// boundary-value solve are pinned, so only interior rows are meaningful).
double real_residual_sup(const DecoupledPath& P, bool interior_only = true);

// alpha -> g alpha g^-1 - 1/2 (dg/dt) g^-1, beta_i -> g beta_i g^-1.
DecoupledPath complex_gauge_act(const std::vector<cmat>& g, const DecoupledPath& P);

// Trapezoidal quadrature of |alpha + alpha^*|^2 + 2 sum_i |beta_i|^2.
double lagrangian(const DecoupledPath& P);

struct CommutingTriplePoint {
    cmat g;
    std::array<cmat, 3> t;
    double max_commutator() const;
};

struct HermitianPath {
    TimeGrid grid;
    std::vector<cmat> h;
};

struct KempfNessOptions {
    double tol = 1e-8;            // target sup_j |F_hat_j|_F on interior nodes
    int max_iterations = 10000;
    int descent_iterations = 30;  // preconditioned-descent warm start
    int newton_iterations = 60;
    bool perturb_init = false;    // alternate initialization (uniqueness checks)
    std::uint64_t init_seed = 1;
};

struct KempfNessReport {
    int descent_steps = 0;
    int newton_steps = 0;
    double fhat_sup = 0;                     // achieved residual
    double input_drift = 0;                  // non-constancy of gauged betas
    bool converged = false;
    std::vector<double> lagrangian_history;  // descent phase, non-increasing
    DecoupledPath transformed;               // gauge-fixed path with F_hat ~ 0
};

// Kempf-Ness boundary-value solve: given P satisfying the complex equations
// and PD Hermitian boundary data, find h on the grid with h(t0) = h_minus,
// h(t1) = h_plus such that the h^(1/2)-gauged path satisfies the real
// equation.  Log-coordinate descent warm start, then a Newton polish of the
// discrete residual itself.
HermitianPath solve_real_equation(const DecoupledPath& P, const cmat& h_minus,
                                  const cmat& h_plus,
                                  const KempfNessOptions& opt = {},
                                  KempfNessReport* report = nullptr);

struct ThetaResult {
    CommutingTriplePoint point;
    double beta_drift = 0;  // sup_t |g beta_i g^-1 - const|
};

// Theta: integrate dg/dt = 2 g alpha, g(0) = Id (the normalization for which
// the gauged path has vanishing alpha slot) and read off (g(1), g beta g^-1).
// Throws NumericalFailure when the conjugated betas drift beyond drift_tol.
ThetaResult theta(const DecoupledPath& P, double drift_tol = 1e-6);

// Theta^-1: alpha = 0, beta_i = t_i, then a Kempf-Ness solve whose boundary
// value is chosen so that theta of the result reproduces the h-data g^* g of
// the input point.
DecoupledPath theta_inverse(const CommutingTriplePoint& Q, const TimeGrid& grid,
                            const KempfNessOptions& opt = {},
                            KempfNessReport* report = nullptr);

// sigma(h) = sum_i (lambda_i + 1/lambda_i - 2) over the eigenvalues of h.
double sigma(const cmat& h);

struct ConvexityReport {
    double min_slack = 0;   // min over interior of sigma'' + |F_hat| + |F_hat'|
    double sigma_max = 0;
    double fhat_P = 0;
    double fhat_gP = 0;
};

ConvexityReport convexity_check(const DecoupledPath& P, const std::vector<cmat>& g);

// SU(3) mixing of (beta1,beta2,beta3); alpha unchanged.
DecoupledPath su3_act(const Eigen::Matrix3cd& A, const DecoupledPath& P,
                      double unitary_tol = 1e-10);

}  // namespace octonahm
