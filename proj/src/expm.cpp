#include <cmath>

#include "sectorcalc/semigroups.hpp"

namespace sectorcalc {

namespace {

double norm1(const Matrix& A) { return A.cwiseAbs().colwise().sum().maxCoeff(); }

void pade_low(const Matrix& A, int m, Matrix& U, Matrix& V) {
    static const double b3[] = {120.0, 60.0, 12.0, 1.0};
    static const double b5[] = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
    static const double b7[] = {17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0};
    static const double b9[] = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                                2162160.0,     110880.0,     3960.0,       90.0,        1.0};
    const double* b = m == 3 ? b3 : m == 5 ? b5 : m == 7 ? b7 : b9;
    const Eigen::Index n = A.rows();
    const Matrix I = Matrix::Identity(n, n);
    const Matrix A2 = A * A;
    Matrix P = I;
    Matrix odd = b[1] * I;
    Matrix even = b[0] * I;
    for (int i = 2; i <= m; i += 2) {
        P = P * A2;
        even += b[i] * P;
        odd += b[i + 1] * P;
    }
    U = A * odd;
    V = even;
}

void pade13(const Matrix& A, Matrix& U, Matrix& V) {
    static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,            16380.0,
                               182.0,               1.0};
    const Eigen::Index n = A.rows();
    const Matrix I = Matrix::Identity(n, n);
    const Matrix A2 = A * A;
    const Matrix A4 = A2 * A2;
    const Matrix A6 = A4 * A2;
    U = A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
    V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
}

}  // namespace

Matrix expm(const Matrix& A) {
    if (A.rows() != A.cols()) throw DomainError("expm: matrix must be square");
    const Eigen::Index n = A.rows();
    if (n == 0) return A;
    if (!A.allFinite()) throw DomainError("expm: non-finite entries");
    static const double theta[] = {1.495585217958292e-2, 2.539398330063230e-1, 9.504178996162932e-1,
                                   2.097847961257068e0};
    static const int orders[] = {3, 5, 7, 9};
    const double nrm = norm1(A);
    Matrix U, V;
    for (int i = 0; i < 4; ++i) {
        if (nrm <= theta[i]) {
            pade_low(A, orders[i], U, V);
            return (V - U).partialPivLu().solve(V + U);
        }
    }
    const double theta13 = 5.371920351148152;
    int s = 0;
    if (nrm > theta13) s = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    const Matrix As = A / std::ldexp(1.0, s);
    pade13(As, U, V);
    Matrix X = (V - U).partialPivLu().solve(V + U);
    for (int i = 0; i < s; ++i) X = X * X;
    return X;
}

double opnorm(const Matrix& A) {
    if (A.size() == 0) return 0.0;
    if (A.rows() <= 64 && A.cols() <= 64) return Eigen::JacobiSVD<Matrix>(A).singularValues()(0);
    return Eigen::BDCSVD<Matrix>(A).singularValues()(0);
}

}  // namespace sectorcalc
