#include "octonahm/nahm.hpp"

#include <cmath>
#include <stdexcept>

#include "octonahm/config.hpp"
#include "octonahm/octonion.hpp"

namespace octonahm {

NahmPath NahmPath::zero(const TimeGrid& g, int k, Flavor flavor) {
    NahmPath p;
    p.grid = g;
    p.k = k;
    p.flavor = flavor;
    std::array<cmat, 8> z;
    z.fill(cmat::Zero(k, k));
    p.val.assign(g.size(), z);
    return p;
}

cmat octonionic_bracket_row(const std::array<cmat, 8>& x, int i) {
    const CrossTable& ct = CrossTable::instance();
    cmat row = comm(x[0], x[i]);
    for (int j = 1; j <= 7; ++j)
        for (int k = j + 1; k <= 7; ++k) {
            const int f = ct.f(i, j, k);
            if (f != 0) row += double(f) * comm(x[j], x[k]);  // j<k pairs carry the 1/2
        }
    return row;
}

std::array<cmat, 7> rhs_octonionic(const std::array<cmat, 8>& x) {
    const Eigen::Index k = x[0].rows();
    for (const cmat& m : x)
        if (m.rows() != k || m.cols() != k)
            throw std::invalid_argument("rhs_octonionic: dimension mismatch");
    std::array<cmat, 7> out;
    for (int i = 1; i <= 7; ++i) out[i - 1] = -octonionic_bracket_row(x, i);
    return out;
}

std::array<cmat, 3> rhs_quaternionic(const std::array<cmat, 4>& x) {
    const Eigen::Index k = x[0].rows();
    for (const cmat& m : x)
        if (m.rows() != k || m.cols() != k)
            throw std::invalid_argument("rhs_quaternionic: dimension mismatch");
    std::array<cmat, 8> full;
    for (int i = 0; i < 4; ++i) full[i] = x[i];
    for (int i = 4; i < 8; ++i) full[i] = cmat::Zero(k, k);
    std::array<cmat, 3> out;
    for (int i = 1; i <= 3; ++i) out[i - 1] = -octonionic_bracket_row(full, i);
    return out;
}

namespace {

double sup_norm(const std::array<cmat, 7>& x) {
    double m = 0;
    for (const cmat& v : x) m = std::max(m, v.cwiseAbs().maxCoeff());
    return m;
}

bool all_finite(const std::array<cmat, 7>& x) {
    for (const cmat& v : x)
        if (!v.allFinite()) return false;
    return true;
}

std::array<cmat, 7> reduced_rhs(const std::array<cmat, 7>& x) {
    std::array<cmat, 8> full;
    full[0] = cmat::Zero(x[0].rows(), x[0].cols());
    for (int i = 0; i < 7; ++i) full[i + 1] = x[i];
    return rhs_octonionic(full);
}

std::array<cmat, 7> rk4_step_reduced(const std::array<cmat, 7>& x, double h) {
    auto axpy = [](const std::array<cmat, 7>& a, double c,
                   const std::array<cmat, 7>& b) {
        std::array<cmat, 7> out;
        for (int i = 0; i < 7; ++i) out[i] = a[i] + c * b[i];
        return out;
    };
    const auto k1 = reduced_rhs(x);
    const auto k2 = reduced_rhs(axpy(x, 0.5 * h, k1));
    const auto k3 = reduced_rhs(axpy(x, 0.5 * h, k2));
    const auto k4 = reduced_rhs(axpy(x, h, k3));
    std::array<cmat, 7> out;
    for (int i = 0; i < 7; ++i)
        out[i] = x[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

}  // namespace

IntegrateResult integrate_reduced(const std::array<cmat, 7>& xi, double T, int n,
                                  double blowup_threshold) {
    if (T <= 0) throw std::invalid_argument("integrate_reduced: T must be positive");
    if (n < 16) throw std::invalid_argument("integrate_reduced: need n >= 16");
    const int k = static_cast<int>(xi[0].rows());
    TimeGrid grid{0.0, T, n};
    NahmPath path = NahmPath::zero(grid, k);

    auto store = [&](int j, const std::array<cmat, 7>& x) {
        for (int i = 0; i < 7; ++i) path.val[j][i + 1] = x[i];
    };

    std::array<cmat, 7> x = xi;
    store(0, x);
    const double h = grid.dt();
    for (int j = 0; j < n; ++j) {
        std::array<cmat, 7> next = rk4_step_reduced(x, h);
        const bool finite = all_finite(next);
        if (!finite || sup_norm(next) > blowup_threshold) {
            if (!finite && sup_norm(x) <= 0.5 * blowup_threshold)
                throw NumericalFailure(
                    "integrate_reduced: non-finite values below blow-up threshold");
            // refine the crossing time of the threshold by bisecting the step
            double lo = 0, hi = h;
            double crossing_norm = finite ? sup_norm(next) : blowup_threshold;
            for (int it = 0; it < 60 && hi - lo > 1e-14 * std::max(1.0, T); ++it) {
                const double mid = 0.5 * (lo + hi);
                const auto trial = rk4_step_reduced(x, mid);
                if (all_finite(trial) && sup_norm(trial) <= blowup_threshold) {
                    lo = mid;
                } else {
                    hi = mid;
                    if (all_finite(trial)) crossing_norm = sup_norm(trial);
                }
            }
            BlowUpReport rep;
            rep.t_star = grid.t(j) + 0.5 * (lo + hi);
            rep.max_norm = crossing_norm;
            const int jn = std::max(j, 1);
            NahmPath trunc = NahmPath::zero(TimeGrid{0.0, grid.t(jn), jn}, k);
            trunc.val.assign(path.val.begin(), path.val.begin() + j + 1);
            while (static_cast<int>(trunc.val.size()) < jn + 1)
                trunc.val.push_back(path.val[j]);
            rep.truncated = std::move(trunc);
            return IntegrateResult{std::nullopt, std::move(rep)};
        }
        x = std::move(next);
        store(j + 1, x);
    }
    return IntegrateResult{std::move(path), std::nullopt};
}

std::vector<std::array<cmat, 7>> residual_rows(const NahmPath& X) {
    if (X.grid.n < 4) throw std::invalid_argument("residual: need n >= 4");
    const int n = X.grid.n;
    std::vector<std::array<cmat, 7>> rows(n + 1);
    // slot-wise derivative, 2nd order
    for (int i = 1; i <= 7; ++i) {
        std::vector<cmat> slot(n + 1);
        for (int j = 0; j <= n; ++j) slot[j] = X.val[j][i];
        const std::vector<cmat> d = fd_derivative(X.grid, slot, 2);
        for (int j = 0; j <= n; ++j)
            rows[j][i - 1] = d[j] + octonionic_bracket_row(X.val[j], i);
    }
    return rows;
}

std::array<double, 7> residual_sup(const NahmPath& X) {
    const auto rows = residual_rows(X);
    std::array<double, 7> sup{};
    for (const auto& r : rows)
        for (int i = 0; i < 7; ++i)
            sup[i] = std::max(sup[i], r[i].cwiseAbs().maxCoeff());
    return sup;
}

std::array<double, 3> residual_sup_quaternionic(const QuatPath& Y) {
    NahmPath X = embed_quaternionic(Y);
    const auto sup = residual_sup(X);
    return {sup[0], sup[1], sup[2]};
}

NahmPath gauge_act(const std::vector<cmat>& g, const NahmPath& X) {
    if (static_cast<int>(g.size()) != X.grid.size())
        throw std::invalid_argument("gauge_act: grid mismatch");
    const std::vector<cmat> dg = fd_derivative(X.grid, g, 4);
    NahmPath out = X;
    for (int j = 0; j <= X.grid.n; ++j) {
        const cmat ginv = g[j].inverse();
        out.val[j][0] = g[j] * X.val[j][0] * ginv - dg[j] * ginv;
        for (int i = 1; i <= 7; ++i) out.val[j][i] = g[j] * X.val[j][i] * ginv;
    }
    return out;
}

TemporalGauge temporal_gauge(const NahmPath& X, double unitarity_tol) {
    if (X.flavor != Flavor::compact)
        throw std::invalid_argument("temporal_gauge: requires compact flavor");
    const int n = X.grid.n;
    std::vector<cmat> x0(n + 1);
    for (int j = 0; j <= n; ++j) x0[j] = X.val[j][0];
    PathInterp interp(X.grid, x0);

    TemporalGauge tg;
    tg.g.resize(n + 1);
    tg.g[0] = cmat::Identity(X.k, X.k);
    for (int j = 0; j < n; ++j) {
        tg.g[j + 1] = rk4_integrate(
            tg.g[j], X.grid.t(j), X.grid.t(j + 1), 1,
            [&](double t, const cmat& g) -> cmat { return g * interp(t); });
        const double drift =
            (tg.g[j + 1] * tg.g[j + 1].adjoint() - cmat::Identity(X.k, X.k))
                .cwiseAbs()
                .maxCoeff();
        tg.unitarity_drift = std::max(tg.unitarity_drift, drift);
        if (drift > unitarity_tol) {
            // polar re-orthonormalization
            Eigen::JacobiSVD<cmat> svd(tg.g[j + 1],
                                       Eigen::ComputeThinU | Eigen::ComputeThinV);
            tg.g[j + 1] = svd.matrixU() * svd.matrixV().adjoint();
            ++tg.reorthonormalizations;
        }
    }
    tg.fixed = gauge_act(tg.g, X);
    return tg;
}

ChiValue chi_map(const NahmPath& X) {
    TemporalGauge tg = temporal_gauge(X);
    ChiValue chi;
    chi.g1 = tg.g.back();
    for (int i = 1; i <= 7; ++i) chi.xi[i - 1] = X.val[0][i];
    return chi;
}

NahmPath scale_solution(const NahmPath& X, double eps) {
    if (!(eps > 0 && eps <= 1.0))
        throw std::invalid_argument("scale_solution: eps must lie in (0,1]");
    NahmPath out = X;
    const int n = X.grid.n;
    for (int j = 0; j <= n; ++j) {
        const double s = eps * X.grid.t(j);  // source time, stays inside the grid
        const double u = (s - X.grid.t0) / X.grid.dt();
        const int lo = std::min(static_cast<int>(std::floor(u)), n - 1);
        const double w = u - lo;
        for (int i = 0; i <= 7; ++i)
            out.val[j][i] = eps * ((1.0 - w) * X.val[lo][i] + w * X.val[lo + 1][i]);
    }
    return out;
}

NahmPath embed_quaternionic(const QuatPath& Y) {
    NahmPath X = NahmPath::zero(Y.grid, Y.k, Y.flavor);
    for (size_t j = 0; j < Y.val.size(); ++j)
        for (int i = 0; i < 4; ++i) X.val[j][i] = Y.val[j][i];
    return X;
}

}  // namespace octonahm
