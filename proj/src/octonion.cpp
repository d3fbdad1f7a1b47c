#include "octonahm/octonion.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace octonahm {

const std::array<CrossTable::Triple, 7>& CrossTable::base_triples() {
    static const std::array<Triple, 7> triples = {{{1, 2, 3, +1},
                                                   {1, 4, 5, +1},
                                                   {1, 6, 7, +1},
                                                   {2, 4, 6, +1},
                                                   {2, 5, 7, -1},
                                                   {3, 4, 7, -1},
                                                   {3, 5, 6, -1}}};
    return triples;
}

CrossTable::CrossTable() {
    std::memset(tab_, 0, sizeof(tab_));
    // Antisymmetrize each base triple over all 6 index orders.
    const int perm[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1},
                            {1, 0, 2}, {0, 2, 1}, {2, 1, 0}};
    const int psign[6] = {+1, +1, +1, -1, -1, -1};
    for (const Triple& t : base_triples()) {
        const int idx[3] = {t.i - 1, t.j - 1, t.k - 1};
        for (int p = 0; p < 6; ++p)
            tab_[idx[perm[p][0]]][idx[perm[p][1]]][idx[perm[p][2]]] =
                static_cast<std::int8_t>(psign[p] * t.sign);
    }
}

const CrossTable& CrossTable::instance() {
    static const CrossTable table;
    return table;
}

double dot3(const Vec3& u, const Vec3& v) {
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
}

double dot7(const Vec7& u, const Vec7& v) {
    double s = 0;
    for (int i = 0; i < 7; ++i) s += u[i] * v[i];
    return s;
}

double norm7(const Vec7& u) { return std::sqrt(dot7(u, u)); }

Vec3 cross3(const Vec3& u, const Vec3& v) {
    return {u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0]};
}

Vec7 cross7(const Vec7& u, const Vec7& v) {
    const CrossTable& ct = CrossTable::instance();
    Vec7 out{};
    for (int i = 1; i <= 7; ++i) {
        double s = 0;
        for (int j = 1; j <= 7; ++j)
            for (int k = 1; k <= 7; ++k) {
                const int f = ct.f(i, j, k);
                if (f != 0) s += f * u[j - 1] * v[k - 1];
            }
        out[i - 1] = s;
    }
    return out;
}

double assoc_form(const Vec7& a, const Vec7& b, const Vec7& c) {
    return dot7(cross7(a, b), c);
}

bool is_associative_plane(const Vec7& u1, const Vec7& u2, const Vec7& u3,
                          double tol) {
    Eigen::Matrix3d gram;
    const Vec7* u[3] = {&u1, &u2, &u3};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) gram(a, b) = dot7(*u[a], *u[b]);
    const double vol2 = gram.determinant();
    if (vol2 < tol * tol)
        throw std::invalid_argument("is_associative_plane: degenerate basis");
    const double vol = std::sqrt(vol2);
    return std::abs(std::abs(assoc_form(u1, u2, u3)) - vol) <= tol;
}

Mat7 iota_phi(int i) {
    if (i < 1 || i > 7) throw std::invalid_argument("iota_phi: index out of range");
    const CrossTable& ct = CrossTable::instance();
    Mat7 m = Mat7::Zero();
    for (int j = 1; j <= 7; ++j)
        for (int k = 1; k <= 7; ++k) m(j - 1, k - 1) = ct.f(i, j, k);
    return m;
}

// <alpha, beta> = sum_{j<k} alpha_jk beta_jk on antisymmetric matrices.
static double form_inner(const Mat7& a, const Mat7& b) {
    double s = 0;
    for (int j = 0; j < 7; ++j)
        for (int k = j + 1; k < 7; ++k) s += a(j, k) * b(j, k);
    return s;
}

Lambda2Split lambda2_split(const Mat7& alpha, double tol) {
    if ((alpha + alpha.transpose()).cwiseAbs().maxCoeff() > tol)
        throw std::invalid_argument("lambda2_split: input is not antisymmetric");
    // Each iota_{e_i} phi has squared norm 3 and they are mutually orthogonal.
    Mat7 p7 = Mat7::Zero();
    for (int i = 1; i <= 7; ++i) {
        const Mat7 b = iota_phi(i);
        p7 += (form_inner(alpha, b) / 3.0) * b;
    }
    return {p7, alpha - p7};
}

Eigen::VectorXd two_form_to_vec21(const Mat7& alpha) {
    Eigen::VectorXd v(21);
    int idx = 0;
    for (int j = 0; j < 7; ++j)
        for (int k = j + 1; k < 7; ++k) v(idx++) = alpha(j, k);
    return v;
}

Mat7 vec21_to_two_form(const Eigen::VectorXd& v) {
    Mat7 m = Mat7::Zero();
    int idx = 0;
    for (int j = 0; j < 7; ++j)
        for (int k = j + 1; k < 7; ++k) {
            m(j, k) = v(idx);
            m(k, j) = -v(idx);
            ++idx;
        }
    return m;
}

namespace {

// Sign of a permutation given as an index list; 0 if any index repeats.
int perm_sign(const int* p, int n) {
    int sign = 1;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            if (p[a] == p[b]) return 0;
            if (p[a] > p[b]) sign = -sign;
        }
    return sign;
}

}  // namespace

Eigen::MatrixXd lambda2_star_operator() {
    // T(e^{jk}) = *(phi ^ e^{jk}).  phi ^ e^{jk} is a 5-form; its Hodge dual
    // pairs each 5-index set with the complementary 2-index set via the
    // 7-dimensional Levi-Civita symbol.
    const CrossTable& ct = CrossTable::instance();
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(21, 21);
    auto pair_index = [](int j, int k) {  // j < k, 0-based
        int idx = 0;
        for (int a = 0; a < 7; ++a)
            for (int b = a + 1; b < 7; ++b) {
                if (a == j && b == k) return idx;
                ++idx;
            }
        return -1;
    };
    for (int j = 0; j < 7; ++j)
        for (int k = j + 1; k < 7; ++k) {
            const int col = pair_index(j, k);
            // phi = sum_{a<b<c} f_{abc} e^{abc}
            for (int a = 0; a < 7; ++a)
                for (int b = a + 1; b < 7; ++b)
                    for (int c = b + 1; c < 7; ++c) {
                        const int f = ct.f(a + 1, b + 1, c + 1);
                        if (f == 0) continue;
                        // wedge e^{abc} ^ e^{jk}: zero if indices overlap.
                        const int five[5] = {a, b, c, j, k};
                        const int s5 = perm_sign(five, 5);
                        if (s5 == 0) continue;
                        // complement {m,n}, m < n
                        bool used[7] = {};
                        for (int q : five) used[q] = true;
                        int mn[2], w = 0;
                        for (int q = 0; q < 7; ++q)
                            if (!used[q]) mn[w++] = q;
                        // *(e^{abc} ^ e^{jk}) = eps_{abcjkmn} e^{mn}
                        const int full[7] = {a, b, c, j, k, mn[0], mn[1]};
                        const int s7 = perm_sign(full, 7);
                        T(pair_index(mn[0], mn[1]), col) += f * s7;
                    }
        }
    return T;
}

namespace {

// The seven displayed complex structures (index 1..7); entry s of row i gives
// (sign, source slot) with (I_i Y)_s = sign * Y_src.
const SlotMap kComplexStructures[7] = {
    // I1(Y) = (-Y1, Y0, -Y3, Y2, -Y5, Y4, -Y7, Y6)
    {{1, 0, 3, 2, 5, 4, 7, 6}, {-1, 1, -1, 1, -1, 1, -1, 1}},
    // I2(Y) = (-Y2, Y3, Y0, -Y1, -Y6, Y7, Y4, -Y5)
    {{2, 3, 0, 1, 6, 7, 4, 5}, {-1, 1, 1, -1, -1, 1, 1, -1}},
    // I3(Y) = (-Y3, -Y2, Y1, Y0, Y7, Y6, -Y5, -Y4)
    {{3, 2, 1, 0, 7, 6, 5, 4}, {-1, -1, 1, 1, 1, 1, -1, -1}},
    // I4(Y) = (-Y4, Y5, Y6, -Y7, Y0, -Y1, -Y2, Y3)
    {{4, 5, 6, 7, 0, 1, 2, 3}, {-1, 1, 1, -1, 1, -1, -1, 1}},
    // I5(Y) = (-Y5, -Y4, -Y7, -Y6, Y1, Y0, Y3, Y2)
    {{5, 4, 7, 6, 1, 0, 3, 2}, {-1, -1, -1, -1, 1, 1, 1, 1}},
    // I6(Y) = (-Y6, Y7, -Y4, Y5, Y2, -Y3, Y0, -Y1)
    {{6, 7, 4, 5, 2, 3, 0, 1}, {-1, 1, -1, 1, 1, -1, 1, -1}},
    // I7(Y) = (-Y7, -Y6, Y5, Y4, -Y3, -Y2, Y1, Y0)
    {{7, 6, 5, 4, 3, 2, 1, 0}, {-1, -1, 1, 1, -1, -1, 1, 1}},
};

}  // namespace

const SlotMap& complex_structure(int i) {
    if (i < 1 || i > 7)
        throw std::invalid_argument("complex_structure: index out of range");
    return kComplexStructures[i - 1];
}

void check_iota_indices(int i, int j, int k) {
    if (i < 1 || i > 7 || j < 1 || j > 7 || k < 1 || k > 7 ||
        CrossTable::instance().f(i, j, k) == 0)
        throw std::invalid_argument("iota_flip: (i,j,k) must satisfy f_ijk != 0");
}

IMat8 complex_structure_matrix(int i) {
    const SlotMap& m = complex_structure(i);
    IMat8 out = IMat8::Zero();
    for (int s = 0; s < 8; ++s) out(s, m.src[s]) = m.sign[s];
    return out;
}

IMat8 iota_flip_matrix(int i, int j, int k) {
    check_iota_indices(i, j, k);
    IMat8 out = IMat8::Identity();
    out(0, 0) = -1;
    out(i, i) = -1;
    out(j, j) = -1;
    out(k, k) = -1;
    return out;
}

Mat8 two_form_alpha(int i) {
    if (i < 1 || i > 7)
        throw std::invalid_argument("two_form_alpha: index out of range");
    const CrossTable& ct = CrossTable::instance();
    Mat8 a = Mat8::Zero();
    a(0, i) = 1;
    a(i, 0) = -1;
    for (int j = 1; j <= 7; ++j)
        for (int k = 1; k <= 7; ++k) a(j, k) = ct.f(i, j, k);
    return a;
}

}  // namespace octonahm
