#include "octonahm/decoupled.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "octonahm/config.hpp"

namespace octonahm {

DecoupledPath DecoupledPath::zero(const TimeGrid& g, int k) {
    DecoupledPath p;
    p.grid = g;
    p.k = k;
    p.alpha.assign(g.size(), cmat::Zero(k, k));
    for (auto& b : p.beta) b.assign(g.size(), cmat::Zero(k, k));
    return p;
}

DecoupledPath DecoupledPath::constant(const TimeGrid& g, const cmat& alpha0,
                                      const std::array<cmat, 3>& beta0) {
    DecoupledPath p;
    p.grid = g;
    p.k = static_cast<int>(alpha0.rows());
    p.alpha.assign(g.size(), alpha0);
    for (int i = 0; i < 3; ++i) p.beta[i].assign(g.size(), beta0[i]);
    return p;
}

double ComplexResidual::max() const {
    double m = 0;
    for (double v : evolution) m = std::max(m, v);
    for (double v : commutators) m = std::max(m, v);
    return m;
}

ComplexResidual complex_residual(const DecoupledPath& P, int fd_order) {
    if (P.grid.n < 4) throw std::invalid_argument("complex_residual: need n >= 4");
    ComplexResidual r{};
    for (int i = 0; i < 3; ++i) {
        const std::vector<cmat> db = fd_derivative(P.grid, P.beta[i], fd_order);
        double sup = 0;
        for (int j = 0; j <= P.grid.n; ++j)
            sup = std::max(sup,
                           (db[j] + 2.0 * comm(P.alpha[j], P.beta[i][j])).norm());
        r.evolution[i] = sup;
    }
    const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (int p = 0; p < 3; ++p) {
        double sup = 0;
        for (int j = 0; j <= P.grid.n; ++j)
            sup = std::max(
                sup, comm(P.beta[pairs[p][0]][j], P.beta[pairs[p][1]][j]).norm());
        r.commutators[p] = sup;
    }
    return r;
}

std::vector<cmat> real_residual(const DecoupledPath& P, int fd_order) {
    if (P.grid.n < 4) throw std::invalid_argument("real_residual: need n >= 4");
    const int n = P.grid.n;
    std::vector<cmat> re_alpha(n + 1);
    for (int j = 0; j <= n; ++j) re_alpha[j] = P.alpha[j] + P.alpha[j].adjoint();
    std::vector<cmat> out = fd_derivative(P.grid, re_alpha, fd_order);
    for (int j = 0; j <= n; ++j) {
        cmat br = comm(P.alpha[j], cmat(P.alpha[j].adjoint()));
        for (int i = 0; i < 3; ++i)
            br += comm(P.beta[i][j], cmat(P.beta[i][j].adjoint()));
        out[j] += 2.0 * br;
    }
    return out;
}

double real_residual_sup(const DecoupledPath& P, bool interior_only) {
    const std::vector<cmat> f = real_residual(P);
    const int n = P.grid.n;
    double sup = 0;
    for (int j = interior_only ? 1 : 0; j <= (interior_only ? n - 1 : n); ++j)
        sup = std::max(sup, f[j].norm());
    return sup;
}

DecoupledPath complex_gauge_act(const std::vector<cmat>& g, const DecoupledPath& P) {
    if (static_cast<int>(g.size()) != P.grid.size())
        throw std::invalid_argument("complex_gauge_act: grid mismatch");
    const std::vector<cmat> dg = fd_derivative(P.grid, g, kDecoupledFdOrder);
    DecoupledPath out = P;
    for (int j = 0; j <= P.grid.n; ++j) {
        Eigen::FullPivLU<cmat> lu(g[j]);
        if (!lu.isInvertible())
            throw std::invalid_argument("complex_gauge_act: singular gauge sample");
        const cmat ginv = lu.inverse();
        out.alpha[j] = g[j] * P.alpha[j] * ginv - 0.5 * dg[j] * ginv;
        for (int i = 0; i < 3; ++i) out.beta[i][j] = g[j] * P.beta[i][j] * ginv;
    }
    return out;
}

double lagrangian(const DecoupledPath& P) {
    std::vector<double> f(P.grid.size());
    for (int j = 0; j <= P.grid.n; ++j) {
        double v = (P.alpha[j] + P.alpha[j].adjoint()).squaredNorm();
        for (int i = 0; i < 3; ++i) v += 2.0 * P.beta[i][j].squaredNorm();
        f[j] = v;
    }
    return trapezoid(P.grid, f);
}

double CommutingTriplePoint::max_commutator() const {
    double m = 0;
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) m = std::max(m, comm(t[a], t[b]).norm());
    return m;
}

double sigma(const cmat& h) {
    Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(h));
    double s = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const double lam = es.eigenvalues()(i);
        if (lam <= 0) throw std::invalid_argument("sigma: input not positive definite");
        s += lam + 1.0 / lam - 2.0;
    }
    return s;
}

DecoupledPath su3_act(const Eigen::Matrix3cd& A, const DecoupledPath& P,
                      double unitary_tol) {
    if ((A * A.adjoint() - Eigen::Matrix3cd::Identity()).cwiseAbs().maxCoeff() >
            unitary_tol ||
        std::abs(A.determinant() - cplx(1, 0)) > unitary_tol)
        throw std::invalid_argument("su3_act: A must be special unitary");
    DecoupledPath out = P;
    for (int j = 0; j <= P.grid.n; ++j)
        for (int i = 0; i < 3; ++i) {
            cmat b = cmat::Zero(P.k, P.k);
            for (int l = 0; l < 3; ++l) b += A(i, l) * P.beta[l][j];
            out.beta[i][j] = b;
        }
    return out;
}

// ---------------------------------------------------------------------------
// Kempf-Ness solver internals
// ---------------------------------------------------------------------------

namespace {

struct Stencil {
    int lo = 0;
    std::vector<double> w;
};

std::vector<Stencil> build_stencils(const TimeGrid& g, int order) {
    std::vector<Stencil> st(g.size());
    const int half = order / 2;
    for (int j = 0; j <= g.n; ++j) {
        int lo = std::max(0, j - half);
        int hi = std::min(g.n, j + half);
        while (hi - lo < order) {
            if (lo > 0)
                --lo;
            else
                ++hi;
        }
        std::vector<double> nodes(hi - lo + 1);
        for (int s = lo; s <= hi; ++s) nodes[s - lo] = g.t(s);
        st[j].lo = lo;
        st[j].w = fd_weights(g.t(j), nodes, 1);
    }
    return st;
}

// Spectral data of the log-coordinate unknown at one node.
struct NodeState {
    cmat s, h, hinv, g, ginv;
    cmat U;
    Eigen::VectorXd lam;

    void set(const cmat& s_in) {
        s = hermitian_part(s_in);
        Eigen::SelfAdjointEigenSolver<cmat> es(s);
        U = es.eigenvectors();
        lam = es.eigenvalues();
        const int k = static_cast<int>(s.rows());
        Eigen::VectorXcd eh(k), ehm(k), eg(k), egm(k);
        for (int i = 0; i < k; ++i) {
            eh(i) = std::exp(lam(i));
            ehm(i) = std::exp(-lam(i));
            eg(i) = std::exp(0.5 * lam(i));
            egm(i) = std::exp(-0.5 * lam(i));
        }
        h = U * eh.asDiagonal() * U.adjoint();
        hinv = U * ehm.asDiagonal() * U.adjoint();
        g = U * eg.asDiagonal() * U.adjoint();
        ginv = U * egm.asDiagonal() * U.adjoint();
    }
};

void herm_to_vec(const cmat& m, double* out) {
    const int k = static_cast<int>(m.rows());
    int idx = 0;
    for (int a = 0; a < k; ++a) out[idx++] = m(a, a).real();
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) {
            out[idx++] = m(a, b).real();
            out[idx++] = m(a, b).imag();
        }
}

cmat vec_to_herm(const double* in, int k) {
    cmat m = cmat::Zero(k, k);
    int idx = 0;
    for (int a = 0; a < k; ++a) m(a, a) = in[idx++];
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) {
            const double re = in[idx++], im = in[idx++];
            m(a, b) = cplx(re, im);
            m(b, a) = cplx(re, -im);
        }
    return m;
}

cmat hermitian_basis(int k, int d) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(k * k);
    e(d) = 1.0;
    return vec_to_herm(e.data(), k);
}

// dexp adjoint in the eigenbasis of s: multiplies component (a,b) by
// (e^{la} - e^{lb}) / (la - lb).
cmat dexp_pullback(const NodeState& st, const cmat& grad_h) {
    const int k = static_cast<int>(st.s.rows());
    cmat ghat = st.U.adjoint() * grad_h * st.U;
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
            const double la = st.lam(a), lb = st.lam(b);
            double phi;
            if (std::abs(la - lb) < 1e-9)
                phi = std::exp(0.5 * (la + lb));
            else
                phi = (std::exp(la) - std::exp(lb)) / (la - lb);
            ghat(a, b) *= phi;
        }
    return hermitian_part(st.U * ghat * st.U.adjoint());
}

// Scalar symmetric tridiagonal factorization (Thomas), used as the descent
// preconditioner.
struct Tridiag {
    std::vector<double> diag, off;    // input
    std::vector<double> dfac, lfac;   // LDL^T factors

    void factor() {
        const size_t m = diag.size();
        dfac.resize(m);
        lfac.resize(m);
        dfac[0] = diag[0];
        for (size_t i = 1; i < m; ++i) {
            lfac[i] = off[i - 1] / dfac[i - 1];
            dfac[i] = diag[i] - lfac[i] * off[i - 1];
        }
    }
    void solve(std::vector<double>& x) const {
        const size_t m = dfac.size();
        for (size_t i = 1; i < m; ++i) x[i] -= lfac[i] * x[i - 1];
        x[m - 1] /= dfac[m - 1];
        for (size_t i = m - 1; i-- > 0;) x[i] = x[i] / dfac[i] - lfac[i + 1] * x[i + 1];
    }
};

class KempfNessCore {
public:
    KempfNessCore(const TimeGrid& grid, std::array<cmat, 3> betas, const cmat& s_left,
                  const cmat& s_right)
        : grid_(grid), beta_(std::move(betas)),
          k_(static_cast<int>(beta_[0].rows())), kk_(k_ * k_), n_(grid.n),
          sten_(build_stencils(grid, kDecoupledFdOrder)) {
        nodes_.resize(n_ + 1);
        nodes_[0].set(s_left);
        nodes_[n_].set(s_right);
        ap_.assign(n_ + 1, cmat::Zero(k_, k_));
        // trapezoid weights
        w_.assign(n_ + 1, grid.dt());
        w_[0] = w_[n_] = 0.5 * grid.dt();
        build_dependencies();
    }

    int unknowns() const { return (n_ - 1) * kk_; }

    void set_geodesic_init(bool perturb, std::uint64_t seed) {
        // geodesic between the boundary values:
        // s(tau) = log( h0^(1/2) (h0^(-1/2) h1 h0^(-1/2))^tau h0^(1/2) )
        const cmat g0 = nodes_[0].g, g0i = nodes_[0].ginv;
        Eigen::SelfAdjointEigenSolver<cmat> es(
            hermitian_part(g0i * nodes_[n_].h * g0i));
        Rng rng(seed);
        cmat bump = cmat::Zero(k_, k_);
        if (perturb) bump = 0.2 * rng.gaussian_hermitian(k_);
        for (int j = 1; j < n_; ++j) {
            const double tau = double(j) / n_;
            Eigen::VectorXcd mid(k_);
            for (int i = 0; i < k_; ++i)
                mid(i) = std::pow(cplx(es.eigenvalues()(i), 0), tau);
            const cmat htau = g0 * es.eigenvectors() * mid.asDiagonal() *
                              es.eigenvectors().adjoint() * g0;
            Eigen::SelfAdjointEigenSolver<cmat> esl(hermitian_part(htau));
            cmat s = cmat::Zero(k_, k_);
            for (int i = 0; i < k_; ++i)
                s += std::log(esl.eigenvalues()(i)) * esl.eigenvectors().col(i) *
                     esl.eigenvectors().col(i).adjoint();
            nodes_[j].set(hermitian_part(s) + std::sin(M_PI * tau) * bump);
        }
        refresh_alpha_all();
    }

    Eigen::VectorXd pack_interior() const {
        Eigen::VectorXd v(unknowns());
        for (int j = 1; j < n_; ++j) herm_to_vec(nodes_[j].s, v.data() + (j - 1) * kk_);
        return v;
    }

    void set_interior(const Eigen::VectorXd& v) {
        for (int j = 1; j < n_; ++j) nodes_[j].set(vec_to_herm(v.data() + (j - 1) * kk_, k_));
        refresh_alpha_all();
    }

    // alpha' = -1/2 (dg/dt) g^-1 for the transformed path
    void refresh_alpha(int j) {
        const Stencil& st = sten_[j];
        cmat dg = cmat::Zero(k_, k_);
        for (size_t s = 0; s < st.w.size(); ++s) dg += st.w[s] * nodes_[st.lo + s].g;
        ap_[j] = -0.5 * dg * nodes_[j].ginv;
    }
    void refresh_alpha_all() {
        for (int j = 0; j <= n_; ++j) refresh_alpha(j);
    }

    cmat fhat_row(int j) const {
        const Stencil& st = sten_[j];
        cmat dap = cmat::Zero(k_, k_);
        for (size_t s = 0; s < st.w.size(); ++s) {
            const cmat& a = ap_[st.lo + s];
            dap += st.w[s] * (a + a.adjoint());
        }
        cmat br = comm(ap_[j], cmat(ap_[j].adjoint()));
        for (int i = 0; i < 3; ++i) {
            const cmat bp = nodes_[j].g * beta_[i] * nodes_[j].ginv;
            br += comm(bp, cmat(bp.adjoint()));
        }
        return dap + 2.0 * br;
    }

    double fhat_sup() const {
        double sup = 0;
        for (int j = 1; j < n_; ++j) sup = std::max(sup, fhat_row(j).norm());
        return sup;
    }

    Eigen::VectorXd residual_vector() const {
        Eigen::VectorXd r(unknowns());
        for (int j = 1; j < n_; ++j) herm_to_vec(fhat_row(j), r.data() + (j - 1) * kk_);
        return r;
    }

    // Discretized Lagrangian in h-form:
    //   1/4 Tr((h^-1 h')^2) + 2 sum_i Tr(beta_i h^-1 beta_i^* h)
    double energy() const {
        double e = 0;
        for (int j = 0; j <= n_; ++j) {
            const cmat d = dh(j);
            const cmat a = nodes_[j].hinv * d;
            double v = 0.25 * (a * a).trace().real();
            for (int i = 0; i < 3; ++i)
                v += 2.0 * (beta_[i] * nodes_[j].hinv * beta_[i].adjoint() *
                            nodes_[j].h)
                               .trace()
                               .real();
            e += w_[j] * v;
        }
        return e;
    }

    Eigen::VectorXd energy_gradient() const {
        std::vector<cmat> grad(n_ + 1, cmat::Zero(k_, k_));
        for (int j = 0; j <= n_; ++j) {
            const cmat d = dh(j);
            const cmat& hinv = nodes_[j].hinv;
            const cmat K = 0.5 * w_[j] * (hinv * d * hinv);
            const Stencil& st = sten_[j];
            for (size_t s = 0; s < st.w.size(); ++s)
                grad[st.lo + s] += st.w[s] * K;
            grad[j] -= 0.5 * w_[j] * (hinv * d * hinv * d * hinv);
            cmat pot = cmat::Zero(k_, k_);
            for (int i = 0; i < 3; ++i) {
                const cmat& b = beta_[i];
                pot += b * hinv * b.adjoint() -
                       hinv * b.adjoint() * nodes_[j].h * b * hinv;
            }
            grad[j] += 2.0 * w_[j] * pot;
        }
        Eigen::VectorXd out(unknowns());
        for (int j = 1; j < n_; ++j) {
            const cmat gs = dexp_pullback(nodes_[j], hermitian_part(grad[j]));
            herm_to_vec(gs, out.data() + (j - 1) * kk_);
        }
        return out;
    }

    // Preconditioned descent with Armijo; returns accepted-step energies.
    int descend(int iters, double grad_tol, std::vector<double>* history) {
        if (n_ < 2 || iters <= 0) return 0;
        Tridiag pre;
        double pot_scale = 1e-3;
        for (int i = 0; i < 3; ++i) pot_scale += 4.0 * beta_[i].squaredNorm();
        pre.diag.assign(n_ - 1, 1.0 / (grid_.dt() * grid_.dt()) + pot_scale);
        pre.off.assign(n_ - 2, -0.5 / (grid_.dt() * grid_.dt()));
        pre.factor();

        Eigen::VectorXd s = pack_interior();
        double e = energy();
        if (history) history->push_back(e);
        int accepted = 0;
        for (int it = 0; it < iters; ++it) {
            const Eigen::VectorXd g = energy_gradient();
            if (g.lpNorm<Eigen::Infinity>() <= grad_tol) break;
            Eigen::VectorXd d = -g;
            // preconditione component-wise along the time direction
            std::vector<double> col(n_ - 1);
            for (int c = 0; c < kk_; ++c) {
                for (int j = 0; j < n_ - 1; ++j) col[j] = d(j * kk_ + c);
                pre.solve(col);
                for (int j = 0; j < n_ - 1; ++j) d(j * kk_ + c) = col[j];
            }
            const double slope = g.dot(d);
            double sigma = 1.0;
            bool ok = false;
            for (int ls = 0; ls < 40; ++ls) {
                set_interior(s + sigma * d);
                const double enew = energy();
                if (enew <= e + 1e-4 * sigma * slope) {
                    s += sigma * d;
                    e = enew;
                    ok = true;
                    break;
                }
                sigma *= 0.5;
            }
            if (!ok) {
                set_interior(s);
                break;
            }
            ++accepted;
            if (history) history->push_back(e);
        }
        set_interior(s);
        return accepted;
    }

    // Newton on the packed discrete residual, finite-difference Jacobian
    // assembled column-by-column with local re-evaluation.
    int newton(int iters, double tol, double* achieved, int* total_budget) {
        Eigen::VectorXd s = pack_interior();
        Eigen::VectorXd r = residual_vector();
        double rsup = fhat_sup();
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        bool have_jac = false;
        int steps = 0;
        int age = 0;
        while (steps < iters && *total_budget > 0) {
            if (rsup <= tol) break;
            if (!have_jac || age >= 5) {
                build_jacobian(lu);
                have_jac = true;
                age = 0;
            }
            const Eigen::VectorXd d = lu.solve(-r);
            if (!d.allFinite()) break;
            double sigma = 1.0;
            bool ok = false;
            const double r2 = r.squaredNorm();
            for (int ls = 0; ls < 30; ++ls) {
                set_interior(s + sigma * d);
                const Eigen::VectorXd rn = residual_vector();
                if (rn.squaredNorm() <= (1.0 - 1e-4 * sigma) * r2) {
                    s += sigma * d;
                    r = rn;
                    ok = true;
                    break;
                }
                sigma *= 0.5;
            }
            --*total_budget;
            ++steps;
            ++age;
            if (!ok) {
                set_interior(s);
                if (age <= 1) break;  // fresh Jacobian and still stuck
                age = 100;            // force rebuild
                continue;
            }
            if (sigma < 0.25) age = 100;
            rsup = fhat_sup();
        }
        set_interior(s);
        *achieved = fhat_sup();
        return steps;
    }

    DecoupledPath transformed_path() const {
        DecoupledPath P = DecoupledPath::zero(grid_, k_);
        for (int j = 0; j <= n_; ++j) {
            P.alpha[j] = ap_[j];
            for (int i = 0; i < 3; ++i)
                P.beta[i][j] = nodes_[j].g * beta_[i] * nodes_[j].ginv;
        }
        return P;
    }

    HermitianPath h_path() const {
        HermitianPath hp;
        hp.grid = grid_;
        hp.h.resize(n_ + 1);
        for (int j = 0; j <= n_; ++j) hp.h[j] = nodes_[j].h;
        return hp;
    }

private:
    cmat dh(int j) const {
        const Stencil& st = sten_[j];
        cmat d = cmat::Zero(k_, k_);
        for (size_t s = 0; s < st.w.size(); ++s) d += st.w[s] * nodes_[st.lo + s].h;
        return d;
    }

    void build_dependencies() {
        // ap_dep[m]: alpha'-indices affected by g_m; f_dep[m]: residual rows
        // (interior) affected by s_m.
        ap_dep_.assign(n_ + 1, {});
        for (int j = 0; j <= n_; ++j)
            for (size_t s = 0; s < sten_[j].w.size(); ++s)
                ap_dep_[sten_[j].lo + s].push_back(j);
        f_dep_.assign(n_ + 1, {});
        for (int m = 0; m <= n_; ++m) {
            std::vector<int> rows;
            for (int ap_idx : ap_dep_[m])
                for (int row : ap_dep_[ap_idx]) rows.push_back(row);
            rows.push_back(m);
            std::sort(rows.begin(), rows.end());
            rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
            for (int rr : rows)
                if (rr >= 1 && rr <= n_ - 1) f_dep_[m].push_back(rr);
        }
    }

    void build_jacobian(Eigen::SparseLU<Eigen::SparseMatrix<double>>& lu) {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(static_cast<size_t>(unknowns()) * kk_ * 9);
        const double delta = 1e-7;
        std::vector<cmat> base_rows(n_ + 1);
        for (int m = 1; m < n_; ++m) {
            // base residual rows in this column's footprint
            for (int row : f_dep_[m]) base_rows[row] = fhat_row(row);
            const NodeState saved = nodes_[m];
            std::vector<std::pair<int, cmat>> saved_ap;
            for (int idx : ap_dep_[m]) saved_ap.emplace_back(idx, ap_[idx]);
            for (int d = 0; d < kk_; ++d) {
                nodes_[m].set(saved.s + delta * hermitian_basis(k_, d));
                for (int idx : ap_dep_[m]) refresh_alpha(idx);
                Eigen::VectorXd colvals(kk_);
                for (int row : f_dep_[m]) {
                    const cmat diff = (fhat_row(row) - base_rows[row]) / delta;
                    herm_to_vec(diff, colvals.data());
                    for (int c = 0; c < kk_; ++c)
                        if (colvals(c) != 0.0)
                            trip.emplace_back((row - 1) * kk_ + c,
                                              (m - 1) * kk_ + d, colvals(c));
                }
                nodes_[m] = saved;
                for (const auto& [idx, a] : saved_ap) ap_[idx] = a;
            }
        }
        Eigen::SparseMatrix<double> J(unknowns(), unknowns());
        J.setFromTriplets(trip.begin(), trip.end());
        lu.compute(J);
        if (lu.info() != Eigen::Success)
            throw NumericalFailure("kempf-ness: singular Newton system");
    }

    TimeGrid grid_;
    std::array<cmat, 3> beta_;
    int k_, kk_, n_;
    std::vector<Stencil> sten_;
    std::vector<NodeState> nodes_;
    std::vector<cmat> ap_;
    std::vector<double> w_;
    std::vector<std::vector<int>> ap_dep_, f_dep_;
};

cmat matrix_log_pd(const cmat& h, const char* who) {
    Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(h));
    const int k = static_cast<int>(h.rows());
    cmat s = cmat::Zero(k, k);
    for (int i = 0; i < k; ++i) {
        if (es.eigenvalues()(i) <= 0)
            throw std::invalid_argument(std::string(who) +
                                        ": boundary data not positive definite");
        s += std::log(es.eigenvalues()(i)) * es.eigenvectors().col(i) *
             es.eigenvectors().col(i).adjoint();
    }
    return hermitian_part(s);
}

cmat matrix_sqrt_pd(const cmat& h) {
    Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(h));
    const int k = static_cast<int>(h.rows());
    cmat s = cmat::Zero(k, k);
    for (int i = 0; i < k; ++i)
        s += std::sqrt(std::max(0.0, es.eigenvalues()(i))) *
             es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
    return hermitian_part(s);
}

// Gauge killing the alpha slot: dg/dt = 2 g alpha, g(t0) = Id, with RK4
// substeps sized by the local |alpha|.
std::vector<cmat> alpha_killing_gauge(const DecoupledPath& P) {
    const int n = P.grid.n;
    std::vector<double> anorm(n + 1);
    for (int j = 0; j <= n; ++j) anorm[j] = P.alpha[j].norm();
    PathInterp interp(P.grid, P.alpha);
    return rk4_path(
        P.grid, cmat::Identity(P.k, P.k),
        [&](double t, const cmat& g) -> cmat { return 2.0 * g * interp(t); },
        [&](int j) {
            const double a = std::max(anorm[j], anorm[j + 1]);
            return std::min(1024, 1 + static_cast<int>(20.0 * P.grid.dt() * a));
        });
}

}  // namespace

HermitianPath solve_real_equation(const DecoupledPath& P, const cmat& h_minus,
                                  const cmat& h_plus, const KempfNessOptions& opt,
                                  KempfNessReport* report) {
    const int k = P.k;
    const int n = P.grid.n;
    if (n < 8) throw std::invalid_argument("solve_real_equation: grid too small");

    // Reduce to the constant-beta frame: an alpha-killing gauge turns a path
    // satisfying the complex equations into (0, beta_tilde const).
    bool alpha_zero = true;
    for (const cmat& a : P.alpha)
        if (a.norm() > 0) {
            alpha_zero = false;
            break;
        }
    std::vector<cmat> g0;
    std::array<cmat, 3> btil;
    double drift = 0;
    if (alpha_zero) {
        for (int i = 0; i < 3; ++i) btil[i] = P.beta[i][0];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j <= n; ++j)
                drift = std::max(drift, (P.beta[i][j] - btil[i]).norm());
    } else {
        g0 = alpha_killing_gauge(P);
        for (int i = 0; i < 3; ++i) {
            std::vector<cmat> conj(n + 1);
            for (int j = 0; j <= n; ++j)
                conj[j] = g0[j] * P.beta[i][j] * g0[j].inverse();
            btil[i] = conj[0];
            for (int j = 0; j <= n; ++j)
                drift = std::max(drift, (conj[j] - btil[i]).norm());
        }
    }

    // Transported boundary data; the left endpoint is fixed by g0(t0) = Id.
    cmat hp_right = h_plus;
    if (!alpha_zero) {
        const cmat gn_inv = g0[n].inverse();
        hp_right = hermitian_part(gn_inv.adjoint() * h_plus * gn_inv);
    }

    KempfNessCore core(P.grid, btil, matrix_log_pd(h_minus, "solve_real_equation"),
                       matrix_log_pd(hp_right, "solve_real_equation"));
    core.set_geodesic_init(opt.perturb_init, opt.init_seed);

    KempfNessReport local;
    KempfNessReport& rep = report ? *report : local;
    rep.input_drift = drift;
    rep.lagrangian_history.clear();
    rep.descent_steps =
        core.descend(opt.descent_iterations, 0.0, &rep.lagrangian_history);
    int budget = std::max(1, opt.max_iterations - rep.descent_steps);
    rep.newton_steps = 0;
    double achieved = core.fhat_sup();
    for (int round = 0; round < 4 && achieved > opt.tol && budget > 0; ++round) {
        rep.newton_steps +=
            core.newton(opt.newton_iterations, opt.tol, &achieved, &budget);
        if (achieved > opt.tol && budget > 0)
            rep.descent_steps += core.descend(20, 0.0, &rep.lagrangian_history);
    }
    rep.fhat_sup = achieved;
    rep.converged = achieved <= opt.tol;
    rep.transformed = core.transformed_path();

    HermitianPath h = core.h_path();
    if (!alpha_zero) {
        for (int j = 0; j <= n; ++j)
            h.h[j] = hermitian_part(g0[j].adjoint() * h.h[j] * g0[j]);
    }
    return h;
}

ThetaResult theta(const DecoupledPath& P, double drift_tol) {
    const std::vector<cmat> g = alpha_killing_gauge(P);
    ThetaResult out;
    out.point.g = g.back();
    double drift = 0;
    for (int i = 0; i < 3; ++i) {
        out.point.t[i] = P.beta[i][0];  // g(0) = Id
        for (int j = 0; j <= P.grid.n; ++j) {
            const cmat q = g[j] * P.beta[i][j] * g[j].inverse();
            drift = std::max(drift, (q - out.point.t[i]).norm());
        }
    }
    out.beta_drift = drift;
    if (drift > drift_tol)
        throw NumericalFailure(
            "theta: conjugated betas are not constant; input is not a solution "
            "of the complex equations");
    return out;
}

DecoupledPath theta_inverse(const CommutingTriplePoint& Q, const TimeGrid& grid,
                            const KempfNessOptions& opt, KempfNessReport* report) {
    const double scale = 1.0 + Q.t[0].norm() + Q.t[1].norm() + Q.t[2].norm();
    if (Q.max_commutator() > 1e-8 * scale * scale)
        throw std::invalid_argument("theta_inverse: t_i do not commute");
    const int k = static_cast<int>(Q.g.rows());
    DecoupledPath P =
        DecoupledPath::constant(grid, cmat::Zero(k, k), Q.t);
    // Boundary value chosen so that theta of the result has first-slot h-data
    // g^* g: theta returns g_sqrt(1)^-1, whose h-data is h(1)^-1.
    const cmat gsg = Q.g.adjoint() * Q.g;
    const cmat h_plus = hermitian_part(gsg.inverse());
    KempfNessReport local;
    KempfNessReport& rep = report ? *report : local;
    solve_real_equation(P, cmat::Identity(k, k), h_plus, opt, &rep);
    if (!rep.converged)
        throw NumericalFailure("theta_inverse: Kempf-Ness solve did not reach "
                               "tolerance; achieved " +
                               std::to_string(rep.fhat_sup));
    return rep.transformed;
}

ConvexityReport convexity_check(const DecoupledPath& P, const std::vector<cmat>& g) {
    if (static_cast<int>(g.size()) != P.grid.size())
        throw std::invalid_argument("convexity_check: grid mismatch");
    const DecoupledPath gP = complex_gauge_act(g, P);
    const std::vector<cmat> fP = real_residual(P);
    const std::vector<cmat> fgP = real_residual(gP);
    const int n = P.grid.n;
    std::vector<double> sig(n + 1);
    for (int j = 0; j <= n; ++j) sig[j] = sigma(g[j].adjoint() * g[j]);
    ConvexityReport rep;
    rep.sigma_max = *std::max_element(sig.begin(), sig.end());
    rep.min_slack = std::numeric_limits<double>::infinity();
    const double dt2 = P.grid.dt() * P.grid.dt();
    for (int j = 1; j < n; ++j) {
        const double d2 = (sig[j + 1] - 2.0 * sig[j] + sig[j - 1]) / dt2;
        const double slack = d2 + fP[j].norm() + fgP[j].norm();
        rep.min_slack = std::min(rep.min_slack, slack);
        rep.fhat_P = std::max(rep.fhat_P, fP[j].norm());
        rep.fhat_gP = std::max(rep.fhat_gP, fgP[j].norm());
    }
    return rep;
}

}  // namespace octonahm
