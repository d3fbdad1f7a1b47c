#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Dense>

namespace octonahm {

using Vec3 = std::array<double, 3>;
using Vec7 = std::array<double, 7>;
using Mat7 = Eigen::Matrix<double, 7, 7>;
using Mat8 = Eigen::Matrix<double, 8, 8>;
using IMat8 = Eigen::Matrix<int, 8, 8>;

// Structure constants f_ijk of Im(O).  Generated once from the seven base
// triples {123,145,167,246,-257,-347,-356} and total antisymmetrization, so
// the table cannot disagree with its own generating set.
class CrossTable {
public:
    struct Triple {
        int i, j, k;  // 1-based, ascending
        int sign;
    };

    CrossTable();

    // 1-based indices, returns -1, 0 or +1.
    int f(int i, int j, int k) const { return tab_[i - 1][j - 1][k - 1]; }

    static const CrossTable& instance();
    static const std::array<Triple, 7>& base_triples();

private:
    std::int8_t tab_[7][7][7];
};

double dot3(const Vec3& u, const Vec3& v);
double dot7(const Vec7& u, const Vec7& v);
double norm7(const Vec7& u);

Vec3 cross3(const Vec3& u, const Vec3& v);
Vec7 cross7(const Vec7& u, const Vec7& v);

// phi(a,b,c) = <a x b, c>, the associative 3-form.
double assoc_form(const Vec7& a, const Vec7& b, const Vec7& c);

// True iff span{u1,u2,u3} is an associative plane, i.e. |phi| restricted to
// the plane equals the Gram volume of the basis.  Throws on a degenerate
// basis (Gram volume below tol).
bool is_associative_plane(const Vec7& u1, const Vec7& u2, const Vec7& u3,
                          double tol = 1e-9);

// iota_{e_i} phi as an antisymmetric 7x7 coefficient matrix, (j,k) -> f_ijk.
Mat7 iota_phi(int i);

struct Lambda2Split {
    Mat7 part7;   // component in span{iota_{e_i} phi}
    Mat7 part14;  // orthogonal complement
};

// Orthogonal split Lambda^2 = Lambda^2_7 + Lambda^2_14.  Input must be
// antisymmetric (throws otherwise).
Lambda2Split lambda2_split(const Mat7& alpha, double tol = 1e-9);

// Brute-force 21x21 matrix of alpha -> *(phi ^ alpha) acting on Lambda^2,
// in the row-major basis e^{jk}, j<k.  Dual route used as a test oracle for
// lambda2_split (eigenvalues +2 on Lambda^2_7, -1 on Lambda^2_14).
Eigen::MatrixXd lambda2_star_operator();

// Flatten / unflatten between antisymmetric 7x7 matrices and the 21-vector
// of coefficients alpha_{jk}, j<k, row-major.
Eigen::VectorXd two_form_to_vec21(const Mat7& alpha);
Mat7 vec21_to_two_form(const Eigen::VectorXd& v);

// The seven complex structures I_i on R^8 as signed slot permutations:
// (I_i Y)_slot = sign[slot] * Y[src[slot]].
struct SlotMap {
    std::array<int, 8> src;
    std::array<int, 8> sign;
};

const SlotMap& complex_structure(int i);  // i in 1..7

template <class T>
std::array<T, 8> apply_complex_structure(int i, const std::array<T, 8>& y) {
    const SlotMap& m = complex_structure(i);
    std::array<T, 8> out;
    for (int s = 0; s < 8; ++s) out[s] = static_cast<double>(m.sign[s]) * y[m.src[s]];
    return out;
}

// iota_{0ijk}: flips the sign of slots 0, i, j, k.  Requires f_ijk != 0.
template <class T>
std::array<T, 8> iota_flip(int i, int j, int k, const std::array<T, 8>& y) {
    std::array<T, 8> out = y;
    out[0] = -out[0];
    out[i] = -out[i];
    out[j] = -out[j];
    out[k] = -out[k];
    return out;
}

void check_iota_indices(int i, int j, int k);  // throws unless f_ijk != 0

// Exact integer 8x8 representations, used for the Clifford-algebra checks.
IMat8 complex_structure_matrix(int i);
IMat8 iota_flip_matrix(int i, int j, int k);

// alpha_i = e^{0i} + iota_{e_i} phi as an antisymmetric 8x8 coefficient
// matrix; alpha_i(Y1, Y2) = Y1^T A Y2 = <I_i Y1, Y2>.
Mat8 two_form_alpha(int i);

}  // namespace octonahm
