#include "octonahm/grid.hpp"

#include <algorithm>
#include <stdexcept>

namespace octonahm {

std::vector<double> fd_weights(double x0, const std::vector<double>& x, int m) {
    // Fornberg (1988), generation of finite difference formulas on
    // arbitrarily spaced grids.
    const int n = static_cast<int>(x.size()) - 1;
    if (n < m) throw std::invalid_argument("fd_weights: stencil too small");
    std::vector<std::vector<double>> c(n + 1, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0;
    double c4 = x[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i <= n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int s = mn; s >= 1; --s)
                    c[i][s] = c1 * (s * c[i - 1][s - 1] - c5 * c[i - 1][s]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int s = mn; s >= 1; --s)
                c[j][s] = (c4 * c[j][s] - s * c[j][s - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n + 1);
    for (int i = 0; i <= n; ++i) w[i] = c[i][m];
    return w;
}

std::vector<cmat> fd_derivative(const TimeGrid& g, const std::vector<cmat>& y,
                                int order) {
    if (order != 2 && order != 4 && order != 6)
        throw std::invalid_argument("fd_derivative: order must be 2, 4 or 6");
    const int n = g.n;
    if (static_cast<int>(y.size()) != n + 1)
        throw std::invalid_argument("fd_derivative: sample count != grid size");
    if (n + 1 < order + 1)
        throw std::invalid_argument("fd_derivative: grid too small for order");
    const int half = order / 2;
    std::vector<cmat> dy(n + 1);
    for (int j = 0; j <= n; ++j) {
        int lo = std::max(0, j - half);
        int hi = std::min(n, j + half);
        // keep the stencil size = order+1 (shift the window at the ends)
        while (hi - lo < order) {
            if (lo > 0)
                --lo;
            else
                ++hi;
        }
        std::vector<double> nodes(hi - lo + 1);
        for (int s = lo; s <= hi; ++s) nodes[s - lo] = g.t(s);
        const std::vector<double> w = fd_weights(g.t(j), nodes, 1);
        cmat d = cmat::Zero(y[j].rows(), y[j].cols());
        for (int s = lo; s <= hi; ++s) d += w[s - lo] * y[s];
        dy[j] = std::move(d);
    }
    return dy;
}

cmat PathInterp::operator()(double t) const {
    const std::vector<cmat>& y = *y_;
    const int n = g_.n;
    const double u = (t - g_.t0) / g_.dt();
    int j = static_cast<int>(std::floor(u));
    j = std::clamp(j, 0, n - 1);
    // cubic through the 4 nodes nearest the cell [j, j+1]
    int lo = std::clamp(j - 1, 0, n - 3);
    if (n < 3) lo = 0;  // tiny grids degrade to low-order interpolation
    const int m = std::min(3, n);
    std::vector<double> nodes(m + 1);
    for (int s = 0; s <= m; ++s) nodes[s] = g_.t(lo + s);
    const std::vector<double> w = fd_weights(t, nodes, 0);
    cmat out = cmat::Zero(y[0].rows(), y[0].cols());
    for (int s = 0; s <= m; ++s) out += w[s] * y[lo + s];
    return out;
}

double trapezoid(const TimeGrid& g, const std::vector<double>& f) {
    if (static_cast<int>(f.size()) != g.n + 1)
        throw std::invalid_argument("trapezoid: sample count != grid size");
    double s = 0.5 * (f.front() + f.back());
    for (int j = 1; j < g.n; ++j) s += f[j];
    return s * g.dt();
}

cmat rk4_integrate(const cmat& y0, double t0, double t1, int steps,
                   const std::function<cmat(double, const cmat&)>& F) {
    cmat y = y0;
    const double h = (t1 - t0) / steps;
    for (int s = 0; s < steps; ++s) {
        const double t = t0 + s * h;
        const cmat k1 = F(t, y);
        const cmat k2 = F(t + 0.5 * h, y + 0.5 * h * k1);
        const cmat k3 = F(t + 0.5 * h, y + 0.5 * h * k2);
        const cmat k4 = F(t + h, y + h * k3);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return y;
}

std::vector<cmat> rk4_path(const TimeGrid& g, const cmat& y0,
                           const std::function<cmat(double, const cmat&)>& F,
                           const std::function<int(int)>& substeps_per_cell) {
    std::vector<cmat> out(g.size());
    out[0] = y0;
    for (int j = 0; j < g.n; ++j) {
        const int m = substeps_per_cell ? std::max(1, substeps_per_cell(j)) : 1;
        out[j + 1] = rk4_integrate(out[j], g.t(j), g.t(j + 1), m, F);
    }
    return out;
}

}  // namespace octonahm
