#include <cmath>
#include <random>

#include "doctest.h"
#include "sectorcalc/semigroups.hpp"

using namespace sectorcalc;

namespace {

const double q = kPi / 4.0;

Matrix mat(std::initializer_list<std::initializer_list<Complex>> rows) {
    Matrix m(rows.size(), rows.begin()->size());
    Eigen::Index i = 0;
    for (auto r : rows) {
        Eigen::Index j = 0;
        for (Complex c : r) m(i, j++) = c;
        ++i;
    }
    return m;
}

// Oracle: exp through an eigendecomposition of a diagonalizable matrix.
Matrix exp_by_eigen(const Matrix& A) {
    Eigen::ComplexEigenSolver<Matrix> es(A);
    Matrix D = es.eigenvalues().array().exp().matrix().asDiagonal();
    return es.eigenvectors() * D * es.eigenvectors().inverse();
}

Matrix random_stable(std::mt19937_64& rng, int d, double shift) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix V(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) V(i, j) = Complex(n(rng), n(rng));
    V += 3.0 * Matrix::Identity(d, d);
    Vector ev(d);
    for (int i = 0; i < d; ++i) ev(i) = -(shift + 2.0 * u(rng)) * cis((u(rng) - 0.5) * 0.8);
    return V * ev.asDiagonal() * V.inverse();
}

}  // namespace

TEST_CASE("matrix exponential") {
    auto T = CommutingTuple::make({mat({{0, 1}, {0, 0}})}, {Sector(-q, q)});
    Matrix E = evaluate(T, 0, 2.5);
    CHECK(std::abs(E(0, 1) - 2.5) < 1e-15);
    CHECK(std::abs(E(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(E(1, 0)) < 1e-15);

    auto D = CommutingTuple::make({mat({{-1, 0}, {0, -2}})}, {Sector(-q, q)});
    Matrix Ed = evaluate(D, 0, 1.0);
    CHECK(std::abs(Ed(0, 0) - std::exp(-1.0)) < 1e-15);
    CHECK(std::abs(Ed(1, 1) - std::exp(-2.0)) < 1e-15);
    CHECK((evaluate(D, 0, 0.0) - Matrix::Identity(2, 2)).norm() == 0.0);
    CHECK_THROWS_AS(evaluate(D, 0, -1.0), DomainError);

    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        Matrix A(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) A(i, j) = Complex(n(rng), n(rng));
        A *= 0.5 + trial;  // exercise the scaling path
        Matrix E1 = expm(A), E3 = expm(3.0 * A);
        Matrix E2 = expm(2.0 * A);
        CHECK((E1 * E2 - E3).norm() <= 1e-12 * E3.norm() * std::max(1.0, std::pow(10.0, 0.5 * trial)));
        Matrix O = exp_by_eigen(A);
        CHECK((E1 - O).norm() <= 1e-11 * O.norm() * (1.0 + trial));
    }
}

TEST_CASE("eigenvalue law of the semigroup") {
    std::mt19937_64 rng(12);
    Matrix A = random_stable(rng, 4, 0.5);
    auto T = CommutingTuple::make({A}, {Sector(-q, q)});
    Eigen::ComplexEigenSolver<Matrix> es(A);
    for (double t : {0.5, 1.0, 2.0})
        for (int i = 0; i < 4; ++i) {
            Vector v = es.eigenvectors().col(i);
            Vector lhs = evaluate(T, 0, t) * v;
            CHECK((lhs - std::exp(t * es.eigenvalues()(i)) * v).norm() <= 1e-10 * v.norm());
        }
}

TEST_CASE("commutation is enforced") {
    CHECK_THROWS_AS(CommutingTuple::make({mat({{0, 1}, {0, 0}}), mat({{0, 0}, {1, 0}})}, {Sector(0, 0), Sector(0, 0)}),
                    DomainError);
    CHECK_NOTHROW(CommutingTuple::make({mat({{-1, 0}, {0, -2}}), mat({{-3, 0}, {0, -4}})}, {Sector(0, 0), Sector(0, 0)}));
}

TEST_CASE("resolvent products") {
    auto T1 = CommutingTuple::make({mat({{-2}})}, {Sector(-q, q)});
    CHECK(std::abs(resolvent_product(T1, {1.0}, {1.0})(0, 0) + 1.0) < 1e-15);
    CHECK_THROWS_AS(resolvent_product(T1, {1.0}, {2.0}), SingularError);

    auto T2 = CommutingTuple::make({mat({{-1, 0}, {0, -2}}), mat({{-3, 0}, {0, -4}})}, {Sector(0, 0), Sector(0, 0)});
    Matrix R = resolvent_product(T2, {1.0, 1.0}, {0.0, 0.0});
    CHECK(std::abs(R(0, 0) - 1.0 / 3.0) < 1e-15);
    CHECK(std::abs(R(1, 1) - 1.0 / 8.0) < 1e-15);

    // resolvent identity per axis
    std::mt19937_64 rng(13);
    Matrix A = random_stable(rng, 3, 0.5);
    auto T = CommutingTuple::make({A}, {Sector(-q, q)});
    Complex z1(1.5, 0.3), z2(0.7, -1.1);
    Matrix Ra = resolvent_product(T, {1.0}, {z1}), Rb = resolvent_product(T, {1.0}, {z2});
    CHECK((Ra - Rb - (z2 - z1) * Ra * Rb).norm() <= 1e-10 * Ra.norm());
}

TEST_CASE("resolvent from the Laplace integral") {
    auto T = CommutingTuple::make({mat({{-1}})}, {Sector(-q, q)});
    auto r = resolvent_via_laplace(T, 0, 1.0, 1.0, 1e-10);
    CHECK(std::abs(r.value(0, 0) - 0.5) < 1e-10);
    CHECK(r.bound_holds);
    CHECK_THROWS_AS(resolvent_via_laplace(T, 0, -1.0, 1.0, 1e-8), DomainError);

    auto D = CommutingTuple::make({mat({{-1, 0}, {0, -2}})}, {Sector(-q, q)});
    auto rd = resolvent_via_laplace(D, 0, 0.0, 1.0, 1e-10);
    CHECK(std::abs(rd.value(0, 0) - 1.0) < 1e-9);
    CHECK(std::abs(rd.value(1, 1) - 0.5) < 1e-9);

    // rotated ray inside the domain, random non-normal matrix
    std::mt19937_64 rng(14);
    Matrix A = random_stable(rng, 4, 0.5);
    auto TA = CommutingTuple::make({A}, {Sector(-q, q)});
    auto ra = resolvent_via_laplace(TA, 0, Complex(0.3, 0.2), cis(0.2), 1e-8);
    Matrix oracle = (Complex(0.3, 0.2) * Matrix::Identity(4, 4) - A).inverse();
    CHECK((ra.value - oracle).norm() <= 1e-7 * oracle.norm());
    CHECK(ra.bound_holds);
}

TEST_CASE("generator recovery from weighted integrals") {
    auto N = CommutingTuple::make({mat({{0, 1}, {0, 0}})}, {Sector(-q, q)});
    auto g = generator_from_weighted_integrals(N, 0, 1.0, 1e-12);
    CHECK((g.B - mat({{1, 2}, {0, 1}})).norm() < 1e-10);
    CHECK((g.C - mat({{0, -1}, {0, 0}})).norm() < 1e-10);
    CHECK((g.generator - N.A[0]).norm() < 1e-10);

    auto T3 = CommutingTuple::make({mat({{-3}})}, {Sector(-q, q)});
    CHECK_THROWS_AS(generator_from_weighted_integrals(T3, 0, -4.0, 1e-8), DomainError);

    std::mt19937_64 rng(15);
    Matrix A = random_stable(rng, 3, 0.3);
    auto T = CommutingTuple::make({A}, {Sector(-q, q)});
    auto gr = generator_from_weighted_integrals(T, 0, 1.0, 1e-10);
    CHECK((gr.generator - A).norm() <= 1e-8 * A.norm());

    // additivity: the product semigroup e^{tA}e^{tB} has generator A + B
    Matrix P = random_stable(rng, 3, 0.3);
    Matrix B = P * P + 0.5 * P;  // commutes with P
    Matrix Sum = P + B;
    auto TS = CommutingTuple::make({Sum}, {Sector(0, 0)});
    // t -> e^{tP} e^{tB}: exp of the sum since P and B commute
    CHECK((expm(P) * expm(B) - expm(Sum)).norm() <= 1e-10 * expm(Sum).norm());
    double lam = std::max(1.0, growth_abscissa(TS, 0, 1.0, 0.0) + 1.0);
    auto gs = generator_from_weighted_integrals(TS, 0, lam, 1e-10);
    CHECK((gs.generator - Sum).norm() <= 1e-8 * Sum.norm());
}

TEST_CASE("generator from difference quotients") {
    auto T = CommutingTuple::make({mat({{-1}})}, {Sector(-q, q)});
    Vector u(1);
    u << 1.0;
    auto r = generator_from_difference_quotient(T, 0, u);
    CHECK(std::abs(r.value(0) + 1.0) < 1e-10);

    auto N = CommutingTuple::make({mat({{0, 1}, {0, 0}})}, {Sector(-q, q)});
    Vector v(2);
    v << 0.0, 1.0;
    auto rn = generator_from_difference_quotient(N, 0, v);
    CHECK(std::abs(rn.value(0) - 1.0) < 1e-12);
    CHECK(std::abs(rn.value(1)) < 1e-12);

    std::mt19937_64 rng(16);
    Matrix A = random_stable(rng, 4, 0.5);
    auto TA = CommutingTuple::make({A}, {Sector(-q, q)});
    Vector w = Vector::Random(4);
    auto rw = generator_from_difference_quotient(TA, 0, w);
    CHECK((rw.value - A * w).norm() <= 1e-6 * (A * w).norm());
}

TEST_CASE("holomorphic generator formula") {
    auto T = CommutingTuple::make({mat({{-2}})}, {Sector(-q, q)});
    CHECK(std::abs(generator_holomorphic(T, 0, 1.0)(0, 0) + 2.0) < 1e-10);
    std::mt19937_64 rng(17);
    Matrix A = random_stable(rng, 3, 0.5);
    auto TA = CommutingTuple::make({A}, {Sector(-q, q)});
    Matrix g1 = generator_holomorphic(TA, 0, Complex(1.0, 0.3));
    Matrix g2 = generator_holomorphic(TA, 0, Complex(2.0, 0.6));
    CHECK((g1 - A).norm() <= 1e-10 * A.norm());
    CHECK((g1 - g2).norm() <= 1e-10 * A.norm());
    // the semigroup t -> T(t zeta) has generator zeta A
    Complex zeta = 0.8 * cis(0.4);
    auto Tz = CommutingTuple::make({zeta * A}, {Sector(-0.2, 0.2)});
    CHECK((generator_holomorphic(Tz, 0, 1.0) - zeta * A).norm() <= 1e-10 * A.norm());
    CHECK_THROWS_AS(generator_holomorphic(T, 0, Complex(0, 1)), DomainError);
}

TEST_CASE("growth abscissa matches the observed exponential rate") {
    std::mt19937_64 rng(18);
    Matrix A = random_stable(rng, 3, 0.5);
    auto T = CommutingTuple::make({A}, {Sector(-q, q)});
    for (double om : {-0.5, 0.0, 0.6}) {
        Complex lam = 1.3;
        double h = growth_abscissa(T, 0, lam, om);
        double r20 = std::log(opnorm(expm(20.0 * cis(om) * lam * A))) / 20.0;
        double r40 = std::log(opnorm(expm(40.0 * cis(om) * lam * A))) / 40.0;
        CHECK(std::abs(r40 - h) < std::abs(r20 - h) + 1e-12);
        CHECK(std::abs(r40 - h) < 0.1);
    }
}

TEST_CASE("N-set classification") {
    auto T = CommutingTuple::make({mat({{-1}})}, {Sector(0, 0)});
    ProductSector ab{Sector(0, 0)};
    CHECK(n_set_classify(T, {1.0}, ab, {0.0}) == NClass::InN0);
    CHECK(n_set_classify(T, {1.0}, ab, {1.0}) == NClass::InNOnly);
    CHECK(n_set_classify(T, {1.0}, ab, {2.0}) == NClass::Outside);
    // a Jordan block at the boundary grows polynomially
    auto J = CommutingTuple::make({mat({{-1, 1}, {0, -1}})}, {Sector(0, 0)});
    CHECK(n_set_classify(J, {1.0}, ab, {1.0}) == NClass::Outside);
    CHECK(n_set_classify(J, {1.0}, ab, {0.5}) == NClass::InN0);
    CHECK_THROWS_AS(n_set_classify(T, {Complex(0, 1)}, ab, {0.0}), DomainError);
}

TEST_CASE("multiplication semigroup gap") {
    auto g = mult_semigroup_gap(1.0, 2.0);
    CHECK(std::abs(g.brute_force - 0.25) < 1e-12);
    CHECK(std::abs(g.closed_form - 0.25) < 1e-14);
    auto g3 = mult_semigroup_gap(1.0, 3.0);
    CHECK(std::abs(g3.brute_force - 2.0 / (3.0 * std::sqrt(3.0))) < 1e-12);
    CHECK(std::abs(g3.closed_form - g3.brute_force) < 1e-12);
    auto gs = mult_semigroup_gap(1.0, 1.0 + 1e-4);
    CHECK(gs.brute_force < 1e-4);
    CHECK_THROWS_AS(mult_semigroup_gap(2.0, 1.0), DomainError);
}

TEST_CASE("nilpotent shift gap") {
    CHECK(quasinilpotent_gap(128, 1.0) == 0.0);
    CHECK(quasinilpotent_gap(512, 0.1) > 0.99);
    for (double t : {0.01, 0.05, 0.1, 0.2}) CHECK(quasinilpotent_gap(512, t) > 0.25);
    // the shift matrix moves a bump to the right by t
    Matrix S = shift_matrix(100, 0.25);
    Vector e = Vector::Zero(100);
    e(9) = 1.0;  // grid value at x = 0.10
    Vector s = S * e;
    CHECK(std::abs(s(34) - 1.0) < 1e-12);  // x = 0.35
}
