#include "octonahm/lie.hpp"

#include <cmath>
#include <stdexcept>

namespace octonahm {

double inner(const cmat& X, const cmat& Y) {
    if (X.rows() != Y.rows() || X.cols() != Y.cols())
        throw std::invalid_argument("inner: dimension mismatch");
    return (X.array() * Y.array().conjugate()).sum().real();
}

double fro_norm(const cmat& X) { return X.norm(); }

bool is_antihermitian(const cmat& X, double tol) {
    return (X + X.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_hermitian(const cmat& X, double tol) {
    return (X - X.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

cmat hermitian_part(const cmat& X) { return 0.5 * (X + X.adjoint()); }

Sl2Triple principal_sl2(int k) {
    if (k < 1) throw std::invalid_argument("principal_sl2: k must be >= 1");
    cmat a0 = cmat::Zero(k, k);
    for (int i = 0; i < k; ++i) a0(i, i) = -(k - 1) / 4.0 + i * 0.5;
    cmat b0 = cmat::Zero(k, k);
    for (int i = 1; i < k; ++i) b0(i, i - 1) = std::sqrt(double(i) * (k - i)) / 2.0;
    return {a0, b0};
}

double Rng::uniform() {
    // 53-bit mantissa from the top bits of the 64-bit stream
    return (gen_() >> 11) * 0x1.0p-53;
}

double Rng::gauss() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

cplx Rng::cgauss() {
    const double re = gauss(), im = gauss();
    return cplx(re, im) / std::sqrt(2.0);
}

cmat Rng::gaussian_matrix(int k) {
    cmat m(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) m(i, j) = cgauss();
    return m;
}

cmat Rng::gaussian_hermitian(int k) {
    const cmat m = gaussian_matrix(k);
    return (m + m.adjoint()) / 2.0;
}

cmat Rng::gaussian_antihermitian(int k) {
    const cmat m = gaussian_matrix(k);
    return (m - m.adjoint()) / 2.0;
}

cmat Rng::random_unitary(int k) {
    const cmat m = gaussian_matrix(k);
    Eigen::HouseholderQR<cmat> qr(m);
    cmat q = qr.householderQ();
    // fix the phase ambiguity of QR so the result is deterministic
    const cmat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < k; ++i) {
        const cplx d = r(i, i);
        if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
    }
    return q;
}

cmat Rng::random_special_unitary(int k) {
    cmat q = random_unitary(k);
    const cplx det = q.determinant();
    q *= std::pow(det, -1.0 / k);
    return q;
}

std::array<cmat, 3> random_commuting_triple(int k, std::uint64_t seed) {
    Rng rng(seed);
    const cmat m = rng.gaussian_matrix(k);
    std::array<cmat, 3> t;
    for (int a = 0; a < 3; ++a) {
        cmat acc = cmat::Zero(k, k);
        cmat power = cmat::Identity(k, k);
        for (int d = 0; d < k; ++d) {
            acc += rng.cgauss() * power;
            power = power * m;
        }
        t[a] = acc / std::max(1.0, acc.norm());
    }
    return t;
}

std::array<cmat, 3> su2_cyclic_basis() {
    const cplx I(0, 1);
    cmat p1(2, 2), p2(2, 2), p3(2, 2);
    p1 << 0, 1, 1, 0;
    p2 << 0, -I, I, 0;
    p3 << 1, 0, 0, -1;
    return {-0.5 * I * p1, -0.5 * I * p2, -0.5 * I * p3};
}

}  // namespace octonahm
