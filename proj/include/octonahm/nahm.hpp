#pragma once

#include <array>
#include <optional>
#include <vector>

#include "octonahm/grid.hpp"
#include "octonahm/lie.hpp"

namespace octonahm {

// Discretized field (X0,...,X7) of k x k matrices on a uniform grid.
struct NahmPath {
    TimeGrid grid;
    int k = 1;
    Flavor flavor = Flavor::compact;
    std::vector<std::array<cmat, 8>> val;  // one 8-slot sample per node

    static NahmPath zero(const TimeGrid& g, int k,
                         Flavor flavor = Flavor::compact);
};

// Quaternionic field (Y0,...,Y3).
struct QuatPath {
    TimeGrid grid;
    int k = 1;
    Flavor flavor = Flavor::compact;
    std::vector<std::array<cmat, 4>> val;
};

// Bracket part of equation row i (1..7): [X0,Xi] + 1/2 sum f_ijk [Xj,Xk].
// Shared by the residual and the moment maps so they agree bit-for-bit.
cmat octonionic_bracket_row(const std::array<cmat, 8>& x, int i);

// dX_i/dt forced by the seven equations, i.e. minus the bracket rows.
std::array<cmat, 7> rhs_octonionic(const std::array<cmat, 8>& x);
std::array<cmat, 3> rhs_quaternionic(const std::array<cmat, 4>& x);

struct BlowUpReport {
    double t_star = 0;
    double max_norm = 0;
    NahmPath truncated;
};

struct IntegrateResult {
    std::optional<NahmPath> path;       // set on success
    std::optional<BlowUpReport> blowup; // set when the norm threshold is crossed
};

// RK4 for the reduced system (X0 = 0) dX/dt + X x X = 0 with X(0) = xi.
// Throws NumericalFailure if non-finite values appear below the threshold.
IntegrateResult integrate_reduced(const std::array<cmat, 7>& xi, double T, int n,
                                  double blowup_threshold = 1e8);

// Per-node residual rows dX_i/dt + brackets (centered differences, one-sided
// second order at the endpoints).
std::vector<std::array<cmat, 7>> residual_rows(const NahmPath& X);
std::array<double, 7> residual_sup(const NahmPath& X);

std::array<double, 3> residual_sup_quaternionic(const QuatPath& Y);

// Gauge action X0 -> g X0 g^-1 - (dg/dt) g^-1, Xi -> g Xi g^-1.  The gauge
// derivative uses 4th-order centered differences so gauge plumbing does not
// dominate the 2nd-order residual error.
NahmPath gauge_act(const std::vector<cmat>& g, const NahmPath& X);

struct TemporalGauge {
    std::vector<cmat> g;   // solves dg/dt = g X0, g(0) = Id
    NahmPath fixed;        // gauge_act(g, X); zeroth slot ~ 0
    double unitarity_drift = 0;
    int reorthonormalizations = 0;
};

// Unique unitary gauge with dg/dt = g X0, g(0) = Id; requires compact flavor.
TemporalGauge temporal_gauge(const NahmPath& X, double unitarity_tol = 1e-12);

struct ChiValue {
    cmat g1;                  // endpoint value g(1)
    std::array<cmat, 7> xi;   // initial data X_1(0),...,X_7(0)
};

ChiValue chi_map(const NahmPath& X);

// t -> eps * X(eps t), resampled onto the original grid by linear interpolation.
NahmPath scale_solution(const NahmPath& X, double eps);

// X_{0..3} = Y_{0..3}, X_{4..7} = 0.
NahmPath embed_quaternionic(const QuatPath& Y);

}  // namespace octonahm
