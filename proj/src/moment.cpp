#include "octonahm/moment.hpp"

#include <cmath>
#include <stdexcept>

#include "octonahm/octonion.hpp"

namespace octonahm {

TangentPath TangentPath::zero(const TimeGrid& g, int k) {
    TangentPath p;
    p.grid = g;
    p.k = k;
    std::array<cmat, 8> z;
    z.fill(cmat::Zero(k, k));
    p.val.assign(g.size(), z);
    return p;
}

std::vector<cmat> moment_map(const NahmPath& X, int i) {
    if (i < 1 || i > 7) throw std::invalid_argument("moment_map: i must be 1..7");
    if (X.grid.n < 4) throw std::invalid_argument("moment_map: need n >= 4");
    const int n = X.grid.n;
    std::vector<cmat> slot(n + 1);
    for (int j = 0; j <= n; ++j) slot[j] = X.val[j][i];
    std::vector<cmat> mu = fd_derivative(X.grid, slot, 2);
    for (int j = 0; j <= n; ++j) mu[j] += octonionic_bracket_row(X.val[j], i);
    return mu;
}

double moment_map_sup(const NahmPath& X, int i) {
    double s = 0;
    for (const cmat& m : moment_map(X, i)) s = std::max(s, m.cwiseAbs().maxCoeff());
    return s;
}

TangentPath linearize_D(const NahmPath& X, const std::vector<cmat>& u,
                        double endpoint_tol) {
    if (static_cast<int>(u.size()) != X.grid.size())
        throw std::invalid_argument("linearize_D: grid mismatch");
    if (u.front().cwiseAbs().maxCoeff() > endpoint_tol ||
        u.back().cwiseAbs().maxCoeff() > endpoint_tol)
        throw std::invalid_argument("linearize_D: u must vanish at both endpoints");
    const std::vector<cmat> du = fd_derivative(X.grid, u, 2);
    TangentPath a = TangentPath::zero(X.grid, X.k);
    for (int j = 0; j <= X.grid.n; ++j) {
        a.val[j][0] = comm(u[j], X.val[j][0]) - du[j];
        for (int i = 1; i <= 7; ++i) a.val[j][i] = comm(u[j], X.val[j][i]);
    }
    return a;
}

std::vector<cmat> linearize_D_star(const NahmPath& X, const TangentPath& a) {
    if (!a.grid.same_as(X.grid))
        throw std::invalid_argument("linearize_D_star: grid mismatch");
    const int n = X.grid.n;
    std::vector<cmat> a0(n + 1);
    for (int j = 0; j <= n; ++j) a0[j] = a.val[j][0];
    std::vector<cmat> out = fd_derivative(X.grid, a0, 2);
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= 7; ++i) out[j] += comm(X.val[j][i], a.val[j][i]);
    return out;
}

std::vector<cmat> tangent_residual(const NahmPath& X, const TangentPath& Y, int kidx) {
    if (kidx < 1 || kidx > 7)
        throw std::invalid_argument("tangent_residual: k must be 1..7");
    if (!Y.grid.same_as(X.grid))
        throw std::invalid_argument("tangent_residual: grid mismatch");
    const int n = X.grid.n;
    std::vector<cmat> yk(n + 1);
    for (int j = 0; j <= n; ++j) yk[j] = Y.val[j][kidx];
    std::vector<cmat> out = fd_derivative(X.grid, yk, 2);
    for (int j = 0; j <= n; ++j) {
        const std::array<cmat, 8> iy = apply_complex_structure(kidx, Y.val[j]);
        for (int i = 0; i <= 7; ++i) out[j] -= comm(X.val[j][i], iy[i]);
    }
    return out;
}

namespace {

// One RK4 step of the tangent ODE dY_k/dt = [X, I_k Y] (k = 1..7, Y0 = 0)
// over a constant background X.
std::array<cmat, 8> tangent_rhs(const std::array<cmat, 8>& xconst,
                                const std::array<cmat, 8>& y) {
    std::array<cmat, 8> out;
    out[0] = cmat::Zero(y[0].rows(), y[0].cols());
    for (int kidx = 1; kidx <= 7; ++kidx) {
        const std::array<cmat, 8> iy = apply_complex_structure(kidx, y);
        cmat r = cmat::Zero(y[0].rows(), y[0].cols());
        for (int i = 0; i <= 7; ++i) r += comm(xconst[i], iy[i]);
        out[kidx] = r;
    }
    return out;
}

}  // namespace

WitnessReport nonpreservation_witness(int k, std::uint64_t seed) {
    if (k < 2)
        throw std::invalid_argument(
            "nonpreservation_witness: group must be non-abelian (k >= 2)");

    WitnessReport rep;
    rep.slot = 4;
    const TimeGrid grid{0.0, 1.0, 256};

    // Constant solution with a single nonzero slot: all brackets vanish.
    cmat xi, y7;
    if (k == 2) {
        const auto sigma = su2_cyclic_basis();
        xi = sigma[0] / sigma[0].norm();
        y7 = sigma[1] / sigma[1].norm();
    } else {
        Rng rng(seed);
        xi = rng.gaussian_antihermitian(k);
        xi /= xi.norm();
        y7 = rng.gaussian_antihermitian(k);
        y7 /= y7.norm();
    }
    rep.X = NahmPath::zero(grid, k);
    for (auto& sample : rep.X.val) sample[rep.slot] = xi;

    // Tangent solution with Y0 = 0 and prescribed initial value in slot 7.
    rep.Y = TangentPath::zero(grid, k);
    rep.Y.val[0][7] = y7;
    const std::array<cmat, 8>& xconst = rep.X.val[0];
    for (int j = 0; j < grid.n; ++j) {
        auto axpy = [](const std::array<cmat, 8>& a, double c,
                       const std::array<cmat, 8>& b) {
            std::array<cmat, 8> out;
            for (int i = 0; i < 8; ++i) out[i] = a[i] + c * b[i];
            return out;
        };
        const double h = grid.dt();
        const auto& y = rep.Y.val[j];
        const auto k1 = tangent_rhs(xconst, y);
        const auto k2 = tangent_rhs(xconst, axpy(y, 0.5 * h, k1));
        const auto k3 = tangent_rhs(xconst, axpy(y, 0.5 * h, k2));
        const auto k4 = tangent_rhs(xconst, axpy(y, h, k3));
        for (int i = 0; i < 8; ++i)
            rep.Y.val[j + 1][i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] +
                                                      2.0 * k3[i] + k4[i]);
    }

    // Search the seven triples for the largest sup_t |[X,(iota I_k + I_k)Y]|.
    rep.norm = 0;
    for (const auto& tr : CrossTable::base_triples()) {
        double best_t = 0;
        for (int j = 0; j <= grid.n; ++j) {
            const auto iky = apply_complex_structure(tr.k, rep.Y.val[j]);
            const auto flipped = iota_flip(tr.i, tr.j, tr.k, iky);
            cmat bracket = cmat::Zero(k, k);
            for (int i = 0; i <= 7; ++i)
                bracket += comm(rep.X.val[j][i], flipped[i] + iky[i]);
            best_t = std::max(best_t, bracket.norm());
        }
        if (best_t > rep.norm) {
            rep.norm = best_t;
            rep.triple = {tr.i, tr.j, tr.k};
        }
    }
    return rep;
}

}  // namespace octonahm
