#include "octonahm/poles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "octonahm/config.hpp"

namespace octonahm {

namespace {

cmat krylov_block(const cmat& B, const cvec& w, int l) {
    const int k = static_cast<int>(w.size());
    cmat K(k, l);
    cvec v = w;
    for (int c = 0; c < l; ++c) {
        K.col(c) = v;
        v = B * v;
    }
    return K;
}

int numeric_rank(const cmat& M, double rel_tol) {
    Eigen::JacobiSVD<cmat> svd(M);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0) return 0;
    int r = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > rel_tol * sv(0)) ++r;
    return r;
}

}  // namespace

QuadrupleReport validate_quadruple(const NahmQuadruple& Q, double tol) {
    const int k = Q.k();
    QuadrupleReport rep;
    for (int i = 0; i < 3; ++i)
        rep.worst_symmetry = std::max(
            rep.worst_symmetry, (Q.B[i] - Q.B[i].transpose()).cwiseAbs().maxCoeff());
    rep.symmetric = rep.worst_symmetry <= tol;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            rep.worst_commutator = std::max(rep.worst_commutator,
                                            comm(Q.B[i], Q.B[j]).norm());
    rep.commuting = rep.worst_commutator <= tol;
    for (int i = 0; i < 3; ++i)
        rep.cyclic[i] = numeric_rank(krylov_block(Q.B[i], Q.w, k), 1e-8) == k;
    rep.filtration = true;
    for (int l = 1; l < k; ++l)
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                cmat joint(k, 2 * l);
                joint << krylov_block(Q.B[i], Q.w, l), krylov_block(Q.B[j], Q.w, l);
                Eigen::JacobiSVD<cmat> svd(joint);
                const auto& sv = svd.singularValues();
                const double gap = sv(0) > 0 && sv.size() > l ? sv(l) / sv(0) : 0.0;
                rep.worst_filtration_gap = std::max(rep.worst_filtration_gap, gap);
                if (numeric_rank(joint, 1e-8) != l) rep.filtration = false;
            }
    return rep;
}

DecoupledPath NahmComplex::as_path() const {
    DecoupledPath P;
    P.grid = grid;
    P.k = k;
    P.alpha = alpha;
    P.beta = beta;
    return P;
}

void NahmComplex::sample(double t, cmat& alpha_out,
                         std::array<cmat, 3>& beta_out) const {
    if (sampler) {
        sampler(t, alpha_out, beta_out);
        return;
    }
    alpha_out = PathInterp(grid, alpha)(t);
    for (int i = 0; i < 3; ++i) beta_out[i] = PathInterp(grid, beta[i])(t);
}

namespace {

// C-infinity step on [0,1] built from exp(-1/u).
double bump(double u) { return u > 0 ? std::exp(-1.0 / u) : 0.0; }
double dbump(double u) { return u > 0 ? std::exp(-1.0 / u) / (u * u) : 0.0; }

// Interpolating profile: f(t) = t/c for t <= ta, f = 1 on [tb, 1-tb],
// mirrored by f(1-t) = 1/f(t).
struct Profile {
    double c = 1.0;
    double ta = 0.1;
    double tb = 0.4;

    double chi(double u) const {
        const double a = bump(u), b = bump(1.0 - u);
        return a / (a + b);
    }
    double dchi(double u) const {
        const double a = bump(u), b = bump(1.0 - u);
        const double s = a + b;
        return (dbump(u) * b + a * dbump(1.0 - u)) / (s * s);
    }
    double base_log(double t) const {
        if (t <= ta) return std::log(t / c);
        if (t >= tb) return 0.0;
        const double u = (t - ta) / (tb - ta);
        return (1.0 - chi(u)) * std::log(t / c);
    }
    double base_dlog(double t) const {
        if (t <= ta) return 1.0 / t;
        if (t >= tb) return 0.0;
        const double u = (t - ta) / (tb - ta);
        return -dchi(u) / (tb - ta) * std::log(t / c) + (1.0 - chi(u)) / t;
    }
    double log_f(double t) const { return t <= 0.5 ? base_log(t) : -base_log(1.0 - t); }
    double dlog_f(double t) const { return t <= 0.5 ? base_dlog(t) : base_dlog(1.0 - t); }
};

// Gram-Schmidt for the complex bilinear form x^T y; the resulting basis
// matrix lies in O(k,C) and is triangular with respect to the Krylov
// filtration of (B1, w).
cmat bilinear_lanczos(const cmat& B1, const cvec& w) {
    const int k = static_cast<int>(w.size());
    cmat G(k, k);
    cvec u = w;
    for (int i = 0; i < k; ++i) {
        if (i > 0) u = B1 * G.col(i - 1);
        for (int pass = 0; pass < 2; ++pass)
            for (int j = 0; j < i; ++j)
                u -= (G.col(j).transpose() * u).value() * G.col(j);
        const cplx nu2 = (u.transpose() * u).value();
        if (std::abs(nu2) < 1e-12 * std::max(1e-300, u.squaredNorm()))
            throw std::invalid_argument(
                "quadruple_to_complex: isotropic Krylov vector (w^T w chain "
                "degenerates); the O(k,C) normal form does not exist");
        G.col(i) = u / std::sqrt(nu2);
    }
    return G;
}

cmat strict_subdiag(const cmat& M) {
    cmat out = cmat::Zero(M.rows(), M.cols());
    for (int r = 1; r < M.rows(); ++r) out(r, r - 1) = M(r, r - 1);
    return out;
}

cmat richardson3(const std::function<cmat(double)>& y, double delta) {
    return (8.0 * y(delta) - 6.0 * y(2.0 * delta) + y(4.0 * delta)) / 3.0;
}

}  // namespace

NahmComplex quadruple_to_complex(const NahmQuadruple& Q, double eps, int n) {
    if (!(eps > 0 && eps < 0.25))
        throw std::invalid_argument("quadruple_to_complex: eps must lie in (0,1/4)");
    if (n < 16) throw std::invalid_argument("quadruple_to_complex: n too small");
    if (n % 2) ++n;  // keep t = 1/2 on the grid
    const QuadrupleReport qr = validate_quadruple(Q);
    if (!qr.valid())
        throw std::invalid_argument("quadruple_to_complex: invalid quadruple");

    const int k = Q.k();
    const cmat G = bilinear_lanczos(Q.B[0], Q.w);
    const cmat Ginv = G.transpose();  // O(k,C)

    std::array<cmat, 3> Btri;
    double structure_err = 0;
    for (int i = 0; i < 3; ++i) {
        cmat M = Ginv * Q.B[i] * G;
        M = 0.5 * (M + M.transpose());
        // tridiagonal by the filtration property; trim roundoff outside
        const double scale = std::max(1e-300, M.norm());
        for (int r = 0; r < k; ++r)
            for (int c = 0; c < k; ++c)
                if (std::abs(r - c) > 1) {
                    structure_err = std::max(structure_err, std::abs(M(r, c)) / scale);
                    M(r, c) = 0;
                }
        Btri[i] = M;
    }
    if (structure_err > 1e-8)
        throw std::invalid_argument(
            "quadruple_to_complex: Krylov normal form is not tridiagonal "
            "(filtration equality violated)");

    // common subdiagonal direction and per-matrix weights
    std::array<cplx, 3> kappa{1.0, 0.0, 0.0};
    if (k >= 2) {
        cplx num1 = 0, num2 = 0;
        double den = 0;
        for (int r = 1; r < k; ++r) {
            const cplx d = Btri[0](r, r - 1);
            num1 += std::conj(d) * Btri[1](r, r - 1);
            num2 += std::conj(d) * Btri[2](r, r - 1);
            den += std::norm(d);
        }
        kappa[1] = num1 / den;
        kappa[2] = num2 / den;
    }
    const double knorm = std::sqrt(std::norm(kappa[0]) + std::norm(kappa[1]) +
                                   std::norm(kappa[2]));

    Profile prof;
    prof.c = (k >= 2) ? std::pow(Q.w.norm(), 2.0 / (k - 1)) : 1.0;

    Eigen::VectorXd expo(k);
    for (int r = 0; r < k; ++r) expo(r) = (k - 1) / 2.0 - r;
    const cmat Amat = G * expo.asDiagonal().toDenseMatrix().cast<cplx>() * Ginv;

    NahmComplex C;
    C.k = k;
    C.eps = eps;
    C.grid = TimeGrid{eps, 1.0 - eps, n};
    C.sampler = [G, Ginv, Btri, prof, Amat, k](double t, cmat& a_out,
                                               std::array<cmat, 3>& b_out) {
        const double lf = prof.log_f(t);
        a_out = cplx(-0.5 * prof.dlog_f(t), 0.0) * Amat;
        for (int i = 0; i < 3; ++i) {
            cmat M = Btri[i];
            for (int r = 0; r < k; ++r) {
                if (r + 1 < k) M(r, r + 1) *= std::exp(lf);   // superdiagonal
                if (r >= 1) M(r, r - 1) *= std::exp(-lf);     // subdiagonal
            }
            b_out[i] = G * M * Ginv;
        }
    };
    C.alpha.resize(n + 1);
    for (auto& b : C.beta) b.resize(n + 1);
    for (int j = 0; j <= n; ++j) {
        std::array<cmat, 3> bj;
        C.sampler(C.grid.t(j), C.alpha[j], bj);
        for (int i = 0; i < 3; ++i) C.beta[i][j] = bj[i];
    }

    C.pole.a = -0.5 * Amat;
    for (int i = 0; i < 3; ++i)
        C.pole.b[i] = prof.c * (G * strict_subdiag(Btri[i]) * Ginv);
    for (int i = 0; i < 3; ++i) C.pole.s[i] = kappa[i] / knorm;
    C.pole.v = Q.w / Q.w.norm();
    return C;
}

NahmQuadruple complex_to_quadruple(const NahmComplex& C) {
    const int k = C.k;
    auto alpha_at = [&](double t) {
        cmat a;
        std::array<cmat, 3> b;
        C.sample(t, a, b);
        return a;
    };

    // residues and the next expansion order of alpha
    const double delta = C.sampler ? std::min(C.eps, 1e-4) : C.eps;
    const cmat a_res =
        richardson3([&](double t) -> cmat { return t * alpha_at(t); }, delta);
    const cmat a1 = richardson3(
        [&](double t) -> cmat { return alpha_at(t) - a_res / t; }, delta);

    // eigenvalues must sit on the a0 ladder
    Eigen::ComplexEigenSolver<cmat> es(a_res);
    std::vector<double> lam(k);
    for (int i = 0; i < k; ++i) lam[i] = es.eigenvalues()(i).real();
    std::sort(lam.begin(), lam.end());
    double ladder = 0;
    for (int i = 0; i < k; ++i)
        ladder = std::max(ladder, std::abs(lam[i] - (-(k - 1) / 4.0 + 0.5 * i)));
    if (k >= 2 && ladder > 0.05)
        throw std::invalid_argument(
            "complex_to_quadruple: alpha residue is not on the principal sl2 "
            "ladder");

    cvec v = C.pole.v;
    if (v.size() != k) {
        // fall back to the lowest eigenvector of the residue
        int lo = 0;
        for (int i = 1; i < k; ++i)
            if (es.eigenvalues()(i).real() < es.eigenvalues()(lo).real()) lo = i;
        v = es.eigenvectors().col(lo);
        v /= v.norm();
    }

    // first-order pole correction: (2a + (k+1)/2) r1 = -2 a1 v
    const double eps_start = C.sampler ? std::min(C.eps, 1e-5) : C.eps;
    cmat L = 2.0 * a_res + (k + 1) / 2.0 * cmat::Identity(k, k);
    const cvec r1 = L.fullPivLu().solve(cvec(-2.0 * (a1 * v)));
    cmat s = std::pow(eps_start, (k - 1) / 2.0) * (v + eps_start * r1);

    auto F = [&](double t, const cmat& y) -> cmat { return -2.0 * (alpha_at(t) * y); };

    // geometric steps through the pole region, then uniform to 1/2
    double t = eps_start;
    const double t_switch = std::min(0.1, 0.5);
    while (t < t_switch) {
        const double tn = std::min(t * 1.01, t_switch);
        s = rk4_integrate(s, t, tn, 2, F);
        t = tn;
    }
    if (t < 0.5) s = rk4_integrate(s, t, 0.5, 2000, F);

    NahmQuadruple Q;
    Q.w = cvec(s.col(0));
    cmat amid;
    std::array<cmat, 3> bmid;
    C.sample(0.5, amid, bmid);
    for (int i = 0; i < 3; ++i) Q.B[i] = 0.5 * (bmid[i] + bmid[i].transpose());
    return Q;
}

ResidueReport extract_residues(const NahmComplex& C, double tol) {
    const int k = C.k;
    const double delta = C.sampler ? std::min(C.eps, 1e-4) : C.eps;
    auto field_at = [&](double t) {
        cmat a;
        std::array<cmat, 3> b;
        C.sample(t, a, b);
        return std::make_pair(a, b);
    };

    ResidueReport rep;
    rep.a = richardson3(
        [&](double t) -> cmat { return t * field_at(t).first; }, delta);
    for (int i = 0; i < 3; ++i)
        rep.b[i] = richardson3(
            [&](double t) -> cmat { return t * field_at(t).second[i]; }, delta);

    if (k == 1) {
        rep.a_gauged = rep.a;
        rep.b_gauged = rep.b;
        rep.s = {1.0, 0.0, 0.0};
        rep.weight_norm = 1.0;
        rep.ladder_residual = std::abs(rep.a(0, 0));
        rep.fit_residual = std::max({rep.b[0].norm(), rep.b[1].norm(), rep.b[2].norm()});
        rep.pole_identity_linear = rep.fit_residual;
        rep.pole_identity_real = rep.a.norm();
        return rep;
    }

    // diagonalize a, eigenvalues ascending along the a0 ladder
    Eigen::ComplexEigenSolver<cmat> es(rep.a);
    std::vector<int> order(k);
    for (int i = 0; i < k; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        return es.eigenvalues()(x).real() < es.eigenvalues()(y).real();
    });
    cmat S(k, k);
    Eigen::VectorXcd lam(k);
    for (int i = 0; i < k; ++i) {
        S.col(i) = es.eigenvectors().col(order[i]);
        lam(i) = es.eigenvalues()(order[i]);
    }
    rep.ladder_residual = 0;
    for (int i = 0; i < k; ++i)
        rep.ladder_residual = std::max(
            rep.ladder_residual, std::abs(lam(i) - cplx(-(k - 1) / 4.0 + 0.5 * i, 0)));
    const cmat Sinv = S.fullPivLu().inverse();

    std::array<cmat, 3> btil;
    for (int i = 0; i < 3; ++i) btil[i] = Sinv * rep.b[i] * S;

    // rank-1 fit of the three subdiagonal vectors: v_ir = s_i u_r
    Eigen::MatrixXcd M(3, k - 1);
    for (int i = 0; i < 3; ++i)
        for (int r = 1; r < k; ++r) M(i, r - 1) = btil[i](r, r - 1);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Vector3cd s_raw = svd.matrixU().col(0);
    Eigen::VectorXcd u = svd.singularValues()(0) * svd.matrixV().col(0).conjugate();
    // fix the overall phase: largest weight real positive
    int imax = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(s_raw(i)) > std::abs(s_raw(imax))) imax = i;
    const cplx phase = s_raw(imax) / std::abs(s_raw(imax));
    s_raw /= phase;
    u *= phase;

    // diagonal gauge mapping the common subdiagonal to the sl2 pattern
    const Sl2Triple sl2 = principal_sl2(k);
    Eigen::VectorXcd D(k);
    D(0) = 1.0;
    for (int r = 1; r < k; ++r) {
        if (std::abs(u(r - 1)) < 1e-14)
            throw NumericalFailure("extract_residues: degenerate subdiagonal");
        D(r) = D(r - 1) * sl2.b0(r, r - 1) / u(r - 1);
    }
    const cmat Dm = D.asDiagonal();
    const cmat Dinv = D.cwiseInverse().asDiagonal();

    rep.a_gauged = Dm * lam.asDiagonal().toDenseMatrix() * Dinv;
    for (int i = 0; i < 3; ++i) rep.b_gauged[i] = Dm * btil[i] * Dinv;

    // least-squares weights against b0 and the fit quality
    const double b0n2 = sl2.b0.squaredNorm();
    rep.weight_norm = 0;
    rep.fit_residual = 0;
    for (int i = 0; i < 3; ++i) {
        rep.s[i] = (sl2.b0.adjoint() * rep.b_gauged[i]).trace() / b0n2;
        rep.weight_norm += std::norm(rep.s[i]);
        rep.fit_residual =
            std::max(rep.fit_residual, (rep.b_gauged[i] - rep.s[i] * sl2.b0).norm());
    }

    rep.pole_identity_linear = 0;
    cmat real_sum = -rep.a_gauged;
    for (int i = 0; i < 3; ++i) {
        rep.pole_identity_linear = std::max(
            rep.pole_identity_linear,
            (2.0 * comm(rep.a_gauged, rep.b_gauged[i]) - rep.b_gauged[i]).norm());
        real_sum += comm(rep.b_gauged[i], cmat(rep.b_gauged[i].adjoint()));
    }
    rep.pole_identity_real = real_sum.norm();

    if (rep.fit_residual > std::max(tol, 1e-3))
        throw NumericalFailure(
            "extract_residues: pole data does not match the s_i b0 normal form "
            "(fit residual " +
            std::to_string(rep.fit_residual) + ")");
    return rep;
}

PoleSolveReport pole_real_solve(const NahmComplex& C, const KempfNessOptions& opt) {
    PoleSolveReport rep;
    const int k = C.k;
    KempfNessReport kn;
    rep.h = solve_real_equation(C.as_path(), cmat::Identity(k, k),
                                cmat::Identity(k, k), opt, &kn);
    rep.fhat_sup = kn.fhat_sup;
    rep.converged = kn.converged;
    rep.bound_C = 0;
    for (int j = 0; j <= C.grid.n; ++j) {
        const double t = C.grid.t(j);
        const double tau = std::min(t, 1.0 - t);
        const double dev = (rep.h.h[j] - cmat::Identity(k, k)).norm();
        if (tau > 0) rep.bound_C = std::max(rep.bound_C, dev / tau);
    }
    return rep;
}

double interior_sup_distance(const HermitianPath& A, const HermitianPath& B,
                             double w0, double w1, int samples) {
    const double lo = std::max({w0, A.grid.t0, B.grid.t0});
    const double hi = std::min({w1, A.grid.t1, B.grid.t1});
    if (!(hi > lo))
        throw std::invalid_argument("interior_sup_distance: empty window");
    PathInterp ia(A.grid, A.h), ib(B.grid, B.h);
    double sup = 0;
    for (int s = 0; s < samples; ++s) {
        const double t = lo + (hi - lo) * s / (samples - 1);
        sup = std::max(sup, (ia(t) - ib(t)).norm());
    }
    return sup;
}

ReflectionReport check_reflection(const NahmComplex& C) {
    const int n = C.grid.n;
    if (std::abs((C.grid.t0 + C.grid.t1) - 1.0) > 1e-12)
        throw std::invalid_argument("check_reflection: grid not symmetric about 1/2");
    ReflectionReport rep;
    for (int j = 0; j <= n; ++j) {
        const int m = n - j;  // t(m) = 1 - t(j)
        rep.alpha_sup = std::max(
            rep.alpha_sup,
            (C.alpha[m] - C.alpha[j].transpose()).cwiseAbs().maxCoeff());
        for (int i = 0; i < 3; ++i)
            rep.beta_sup[i] = std::max(
                rep.beta_sup[i],
                (C.beta[i][m] - C.beta[i][j].transpose()).cwiseAbs().maxCoeff());
    }
    return rep;
}

}  // namespace octonahm
