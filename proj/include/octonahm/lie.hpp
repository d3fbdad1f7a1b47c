#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace octonahm {

using cplx = std::complex<double>;
using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;

enum class Flavor { compact, complexified };

// Invariant inner product <X,Y> = Re Tr(X Y^*); positive definite on gl(k,C)
// and restricts to the Ad-invariant form on u(k).
double inner(const cmat& X, const cmat& Y);
double fro_norm(const cmat& X);

inline cmat comm(const cmat& A, const cmat& B) { return A * B - B * A; }

bool is_antihermitian(const cmat& X, double tol = 1e-10);
bool is_hermitian(const cmat& X, double tol = 1e-10);
cmat hermitian_part(const cmat& X);

// Principal sl2 triple (a0, b0, b0^*) on gl(k,C):
// a0 = diag(-(k-1)/4, ..., +(k-1)/4), b0 lower shift with gamma_i = sqrt(i(k-i))/2.
// Satisfies b0 = 2[a0,b0] and [b0,b0^*] = a0.
struct Sl2Triple {
    cmat a0;
    cmat b0;
};
Sl2Triple principal_sl2(int k);

// Deterministic RNG utilities.  std RNG distributions are not relied on so
// streams are reproducible across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform();                 // [0,1)
    double gauss();                   // standard normal, Box-Muller
    cplx cgauss();                    // complex standard normal
    cmat gaussian_matrix(int k);      // iid complex gaussian entries
    cmat gaussian_hermitian(int k);
    cmat gaussian_antihermitian(int k);
    cmat random_unitary(int k);       // Haar-ish via QR
    cmat random_special_unitary(int k);

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0;
};

// Three pairwise-commuting elements of gl(k,C), generated as polynomials in
// one gaussian matrix; deterministic in the seed.
std::array<cmat, 3> random_commuting_triple(int k, std::uint64_t seed);

// su(2) cyclic basis: [s1,s2]=s3, [s2,s3]=s1, [s3,s1]=s2 (s_i = -i/2 Pauli_i).
std::array<cmat, 3> su2_cyclic_basis();

}  // namespace octonahm
