#pragma once

#include <functional>
#include <vector>

#include "octonahm/lie.hpp"

namespace octonahm {

// Uniform grid t_j = t0 + j*(t1-t0)/n, j = 0..n.
struct TimeGrid {
    double t0 = 0.0;
    double t1 = 1.0;
    int n = 1000;

    double dt() const { return (t1 - t0) / n; }
    double t(int j) const { return t0 + j * dt(); }
    int size() const { return n + 1; }
    bool same_as(const TimeGrid& o) const {
        return n == o.n && t0 == o.t0 && t1 == o.t1;
    }
};

// Fornberg finite-difference weights for the m-th derivative at x0 given
// stencil nodes x (exact for polynomials up to degree x.size()-1).
std::vector<double> fd_weights(double x0, const std::vector<double>& x, int m);

// First derivative of a sampled matrix path.  order = 2, 4 or 6; centered
// stencils in the interior, one-sided of the same order at the ends.
std::vector<cmat> fd_derivative(const TimeGrid& g, const std::vector<cmat>& y,
                                int order = 2);

// Sampled-path cubic interpolation (Catmull-Rom on the uniform grid,
// one-sided cubic at the ends).
class PathInterp {
public:
    PathInterp(const TimeGrid& g, const std::vector<cmat>& y) : g_(g), y_(&y) {}
    cmat operator()(double t) const;

private:
    TimeGrid g_;
    const std::vector<cmat>* y_;
};

double trapezoid(const TimeGrid& g, const std::vector<double>& f);

// Classical RK4 for matrix ODEs dY/dt = F(t, Y), integrating from t0 to t1
// in `steps` equal steps.
cmat rk4_integrate(const cmat& y0, double t0, double t1, int steps,
                   const std::function<cmat(double, const cmat&)>& F);

// RK4 recording the state at every node of the grid; substeps_per_cell may
// exceed 1 for stiff coefficient paths.
std::vector<cmat> rk4_path(const TimeGrid& g, const cmat& y0,
                           const std::function<cmat(double, const cmat&)>& F,
                           const std::function<int(int)>& substeps_per_cell = nullptr);

}  // namespace octonahm
