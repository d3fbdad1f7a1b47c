#pragma once

#include <array>
#include <vector>

#include "octonahm/nahm.hpp"

namespace octonahm {

// Tangent-space data (a0,...,a7) attached to a NahmPath's grid.
struct TangentPath {
    TimeGrid grid;
    int k = 1;
    std::vector<std::array<cmat, 8>> val;

    static TangentPath zero(const TimeGrid& g, int k);
};

// mu_i(X) = dX_i/dt + [X0,Xi] + 1/2 sum f_ijk [Xj,Xk] on the grid.  Shares
// the bracket kernel with residual_rows, so a path solves the system iff all
// seven moment maps vanish, identically in floating point.
std::vector<cmat> moment_map(const NahmPath& X, int i);
double moment_map_sup(const NahmPath& X, int i);

// Du = ([u,X0] - du/dt, [u,X1], ..., [u,X7]); u must vanish at both ends.
TangentPath linearize_D(const NahmPath& X, const std::vector<cmat>& u,
                        double endpoint_tol = 1e-12);

// D* a = da0/dt + sum_{i=0..7} [Xi, ai].
std::vector<cmat> linearize_D_star(const NahmPath& X, const TangentPath& a);

// dY_k/dt - sum_{i=0..7} [X_i, (I_k Y)_i] on the grid.
std::vector<cmat> tangent_residual(const NahmPath& X, const TangentPath& Y, int kidx);

struct WitnessReport {
    int slot = 0;                 // index l of the nonzero constant solution slot
    std::array<int, 3> triple{};  // (i,j,k) realizing the witness
    double norm = 0;              // sup_t |[X, (iota_{0ijk} I_k + I_k) Y]|
    NahmPath X;                   // the constant solution used
    TangentPath Y;                // integrated tangent solution, Y0 = 0
};

// Constructs the counterexample showing I_k does not preserve the tangent
// space: constant solution with one nonzero slot, tangent solution from a
// prescribed initial value, and a triple with a nonvanishing bracket.
// Requires k >= 2 (non-abelian).
WitnessReport nonpreservation_witness(int k, std::uint64_t seed);

}  // namespace octonahm
