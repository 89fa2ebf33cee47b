#include <cmath>
#include <random>

#include "doctest.h"
#include "sectorcalc/extrapolation.hpp"
#include "sectorcalc/functionals.hpp"

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

Complex scalar(const Matrix& m) { return m(0, 0); }

RayDensity density(const Point& offset, const std::vector<double>& omega, const Point& s,
                   const std::vector<std::vector<Complex>>& poly) {
    return RayDensity{offset, omega, s, poly};
}

/// Random functional with atoms strictly inside the sector and densities vanishing at t = 0.
Functional random_functional(std::mt19937_64& rng, const ProductSector& ps, bool allow_constant = false) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Functional f;
    f.sectors = ps;
    const int na = 1 + static_cast<int>(u(rng) * 2);
    for (int a = 0; a < na; ++a) {
        Atom at;
        for (const Sector& s : ps) at.eta.push_back((0.2 + u(rng)) * cis(s.alpha + (0.1 + 0.8 * u(rng)) * s.aperture()));
        at.weight = Complex(u(rng) - 0.3, u(rng) - 0.5);
        f.atoms.push_back(at);
    }
    RayDensity d;
    for (const Sector& s : ps) {
        const double om = s.alpha + u(rng) * s.aperture();
        d.offset.push_back(0.3 * u(rng) * cis(s.bisector()));
        d.omega.push_back(om);
        d.s.push_back(Complex(0.8 + u(rng), 0.4 * (u(rng) - 0.5)));
        d.poly.push_back({allow_constant ? Complex(u(rng)) : Complex(0.0), Complex(u(rng), u(rng)), Complex(0.3 * u(rng))});
    }
    f.densities.push_back(d);
    f.validate();
    return f;
}

Point random_dual_point(std::mt19937_64& rng, const ProductSector& ps, double radius) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Point z;
    for (const Sector& s : ps) {
        const Sector d = dual_sector(s);
        z.push_back(radius * u(rng) * cis(d.alpha + u(rng) * d.aperture()));
    }
    return z;
}

}  // namespace

TEST_CASE("fourier-borel transform examples") {
    ProductSector ps{Sector(-q, q), Sector(-q, q)};
    auto d = dirac(ps, Point{1.0, 2.0});
    const Point z{Complex(0.3, 0.2), Complex(-0.1, 0.5)};
    CHECK(std::abs(fb_transform(d, z) - std::exp(-z[0] - 2.0 * z[1])) < 1e-14);

    ProductSector mixed{Sector(-0.3, 0.9), Sector(0.1, 0.2)};
    auto nu = bisector_exponential(mixed);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
        Point zeta = random_dual_point(rng, mixed, 5.0);
        Complex expect = 1.0;
        for (std::size_t j = 0; j < 2; ++j) expect /= 1.0 + zeta[j] * cis(mixed[j].bisector());
        CHECK(std::abs(fb_transform(nu, zeta) - expect) < 1e-13);
    }

    Functional zero;
    zero.sectors = ps;
    CHECK(fb_transform(zero, z) == Complex(0.0));

    CHECK_THROWS_AS(fb_transform(nu, Point{-5.0, -5.0}), DomainError);
    CHECK_THROWS_AS(dirac(ps, Point{-1.0, 1.0}), DomainError);
}

TEST_CASE("domain anchors are cone stable") {
    std::mt19937_64 rng(8);
    ProductSector ps{Sector(-0.4, 0.7), Sector(0.2, 1.0)};
    for (int i = 0; i < 20; ++i) {
        auto phi = random_functional(rng, ps);
        auto dom = phi.domain();
        REQUIRE(dom.anchor);
        for (int m = 0; m < 20; ++m) {
            Point z = random_dual_point(rng, ps, 10.0);
            for (std::size_t j = 0; j < 2; ++j) z[j] += (*dom.anchor)[j];
            CHECK(phi.in_domain(z));
        }
    }
    CHECK_FALSE(dirac(ps, Point{1.0, cis(0.5)}).domain().anchor);
}

TEST_CASE("regularizer W_n") {
    ProductSector ray{Sector(0, 0)};
    CHECK(std::abs(w_n(Point{1.0}, 1, ray) - 0.25) < 1e-15);
    ProductSector ps{Sector(-0.5, 0.8), Sector(0.0, 1.2)};
    std::mt19937_64 rng(5);
    for (double n : {1.0, 3.0, 17.0}) CHECK(w_n(Point{0.0, 0.0}, n, ps) == Complex(1.0));
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) worst = std::max(worst, std::abs(w_n(random_dual_point(rng, ps, 50.0), 4.0, ps)));
    CHECK(worst <= 1.0 + 1e-14);
    for (int i = 0; i < 20; ++i) {
        Point z = random_dual_point(rng, ps, 8.0);
        CHECK(std::abs(fb_transform(regularizer_measure(ps, 6.0), z) - w_n(z, 6.0, ps)) < 1e-13);
    }
}

TEST_CASE("cauchy transform routes") {
    ProductSector ps{Sector(-q, q)};
    auto d = dirac(ps, Point{1.0});
    const Complex expect = 1.0 / (4.0 * kPi * kI);
    CHECK(std::abs(cauchy_transform(d, Point{0.0}, Point{-1.0}, CauchyRoute::Measure) - expect) < 1e-14);
    CHECK(std::abs(cauchy_transform(d, Point{0.0}, Point{-1.0}, CauchyRoute::FourierBorel) - expect) < 1e-10);

    double prev = 1.0;
    for (double r : {10.0, 100.0, 1000.0}) {
        const double v = std::abs(cauchy_transform(d, Point{0.0}, Point{-r}, CauchyRoute::Measure));
        CHECK(v < prev);
        prev = v;
    }
    CHECK(prev < 1e-3);
    CHECK_THROWS_AS(cauchy_transform(d, Point{0.0}, Point{2.0}, CauchyRoute::Measure), DomainError);

    std::mt19937_64 rng(11);
    ProductSector two{Sector(-0.3, 0.6), Sector(0.1, 0.9)};
    const std::vector<Point> lambdas{{Complex(-1.0, 0.3), Complex(0.0, -2.0)},
                                     {Complex(0.2, 1.5), Complex(-0.5, -0.5)},
                                     {Complex(-2.0, -0.1), Complex(1.0, -1.0)}};
    for (int i = 0; i < 3; ++i) {
        auto phi = random_functional(rng, two, true);
        const Point z = *phi.domain().anchor;
        for (const Point& lam : lambdas) {
            const Complex a = cauchy_transform(phi, z, lam, CauchyRoute::Measure);
            const Complex b = cauchy_transform(phi, z, lam, CauchyRoute::FourierBorel);
            CHECK(std::abs(a - b) < 1e-8 * std::max(1.0, std::abs(a)));
        }
    }
}

TEST_CASE("convolution") {
    ProductSector ps{Sector(-q, q), Sector(0.0, 0.5)};
    auto c = convolve(dirac(ps, Point{1.0, 2.0}, 2.0), dirac(ps, Point{Complex(0.5, 0.1), 1.0}, 3.0));
    REQUIRE(c.atoms.size() == 1);
    CHECK(std::abs(c.atoms[0].eta[0] - Complex(1.5, 0.1)) < 1e-15);
    CHECK(std::abs(c.atoms[0].eta[1] - 3.0) < 1e-15);
    CHECK(c.atoms[0].weight == Complex(6.0));

    ProductSector ray{Sector(0, 0)};
    Functional e;
    e.sectors = ray;
    e.densities.push_back(density({0.0}, {0.0}, {1.0}, {{1.0}}));
    auto ee = convolve(e, e);
    REQUIRE(ee.densities.size() == 1);
    REQUIRE(ee.densities[0].poly[0].size() >= 2);
    CHECK(std::abs(ee.densities[0].poly[0][0]) < 1e-15);
    CHECK(std::abs(ee.densities[0].poly[0][1] - 1.0) < 1e-15);
    CHECK(std::abs(ee.densities[0].s[0] - 1.0) < 1e-15);

    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ProductSector two{Sector(-0.5, 0.5), Sector(0.2, 1.1)};
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        auto a = random_functional(rng, two, true);
        auto b = random_functional(rng, two, true);
        b.densities[0].omega = a.densities[0].omega;
        auto ab = convolve(a, b);
        const Point anchor = *convolution_anchor(a, b);
        Point z = random_dual_point(rng, two, 3.0);
        for (std::size_t j = 0; j < 2; ++j) z[j] += anchor[j] + 0.05 * cis(dual_sector(two[j]).bisector());
        const Complex lhs = fb_transform(ab, z);
        const Complex rhs = fb_transform(a, z) * fb_transform(b, z);
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
    CHECK(worst < 1e-11);

    auto a = random_functional(rng, two);
    auto b = random_functional(rng, two);
    b.densities[0].omega[0] = a.densities[0].omega[0] + 0.1;
    CHECK_THROWS_AS(convolve(a, b), DomainError);
    CHECK_THROWS_AS(convolve(a, dirac(ps, Point{1.0, 1.0})), DomainError);
}

TEST_CASE("pairing an exponential returns the transform") {
    ProductSector ps{Sector(-0.4, 0.5)};
    std::mt19937_64 rng(31);
    auto phi = random_functional(rng, ps);
    const Point w{Complex(0.7, 0.2)};
    const Complex expect = fb_transform(phi, w);
    auto f = SectorFunction::exp_poly(w, {{1.0}});
    for (PairRoute r : {PairRoute::Measure, PairRoute::FbEps, PairRoute::FbDirect, PairRoute::WnLimit, PairRoute::Cauchy}) {
        CAPTURE(std::string(to_string(r)));
        auto res = pair_function(f, phi, r);
        const double tol = r == PairRoute::WnLimit ? 1e-5 : 1e-8;
        CHECK(std::abs(scalar(res.value) - expect) < tol * std::max(1.0, std::abs(expect)));
    }
}

SectorFunction inverse_square() {
    SectorFunction f;
    AxisFactor a;
    a.value = [](Complex x) {
        Matrix m(1, 1);
        m(0, 0) = 1.0 / ((x + 1.0) * (x + 1.0));
        return m;
    };
    f.factors.push_back(a);
    f.growth_anchor = Point{0.0};
    f.boundary_integrable = true;
    return f;
}

TEST_CASE("pairing on a half-line") {
    ProductSector ray{Sector(0, 0)};
    const SectorFunction f = inverse_square();
    auto d2 = dirac(ray, Point{2.0});
    CHECK(std::abs(scalar(pair_function(f, d2, PairRoute::Measure).value) - 1.0 / 9.0) < 1e-14);
    // a point mass on a ray has a transform of modulus one on the whole contour
    CHECK_THROWS_AS(pair_function(f, d2, PairRoute::FbDirect), DomainError);
    CHECK_THROWS_AS(pair_function(f, d2, PairRoute::Cauchy), DomainError);

    Functional phi;
    phi.sectors = ray;
    phi.densities.push_back(density({0.0}, {0.0}, {1.0}, {{0.0, 1.0}}));
    // int_0^inf t e^{-t} / (1+t)^2 dt = 2 e E1(1) - 1
    const double e1 = 0.21938393439552027368;
    const Complex ref = scalar(pair_function(f, phi, PairRoute::Measure).value);
    CHECK(std::abs(ref - (2.0 * std::exp(1.0) * e1 - 1.0)) < 1e-12);

    // contour routes on the half-line with a function whose transform is known in closed form
    auto g = SectorFunction::exp_poly(Point{0.5}, {{1.0, 2.0}});
    const Complex gref = 1.0 / 2.25 + 4.0 / std::pow(1.5, 3);
    CHECK(std::abs(scalar(pair_function(g, phi, PairRoute::Measure).value) - gref) < 1e-12);
    for (PairRoute r : {PairRoute::FbEps, PairRoute::FbDirect, PairRoute::WnLimit}) {
        CAPTURE(std::string(to_string(r)));
        CHECK(std::abs(scalar(pair_function(g, phi, r).value) - gref) < 1e-6);
    }
}

TEST_CASE("numerical transform of a rational function") {
    ProductSector ps{Sector(-0.4, 0.4)};
    const SectorFunction f = inverse_square();
    Functional phi;
    phi.sectors = ps;
    phi.densities.push_back(density({0.0}, {0.1}, {Complex(1.0, 0.2)}, {{0.0, 1.0}}));
    phi.atoms.push_back(Atom{{Complex(1.0, 0.2)}, Complex(0.5, -0.1)});
    const Complex ref = scalar(pair_function(f, phi, PairRoute::Measure).value);
    CHECK(std::abs(scalar(pair_function(f, phi, PairRoute::Cauchy).value) - ref) < 1e-8);

    // numerical transform against the closed form of an exponential polynomial
    auto g = SectorFunction::exp_poly(Point{Complex(0.6, 0.3)}, {{1.0, Complex(0.5, 1.0), 0.25}});
    SectorFunction h = g;
    h.factors[0].fb = nullptr;
    for (Complex w : {Complex(0.1, 0.0), Complex(0.3, 2.0), Complex(-0.2, -1.0)}) {
        const Complex a = fb_of_function(g, ps, Point{w})(0, 0);
        const Complex b = fb_of_function(h, ps, Point{w})(0, 0);
        CHECK(std::abs(a - b) < 1e-10 * std::abs(a));
    }
}

TEST_CASE("orbit transform") {
    auto T = CommutingTuple::make({mat({{-1}})}, {Sector(-q, q)});
    ProductSector ray{Sector(0, 0)};
    Vector u(1);
    u(0) = 1.0;
    for (OrbitRoute r : {OrbitRoute::Quadrature, OrbitRoute::Resolvent}) {
        Vector v = fb_of_orbit(T, Point{1.0}, ray, Point{0.0}, Point{1.0}, u, r);
        CHECK(std::abs(v(0) - 0.5) < 1e-10);
        CHECK(fb_of_orbit(T, Point{1.0}, ray, Point{0.0}, Point{1.0}, Vector::Zero(1), r).norm() == 0.0);
    }

    auto D = CommutingTuple::make({mat({{-1, 0}, {0, -2}}), mat({{-3, 0}, {0, -0.5}})}, {Sector(-q, q), Sector(-q, q)});
    ProductSector ps{Sector(-0.2, 0.3), Sector(-0.1, 0.1)};
    const Point lam{1.0, Complex(1.0, 0.1)}, z{0.1, 0.0}, zeta{Complex(1.0, 0.3), 0.7};
    Vector w(2);
    w << 1.0, Complex(0.0, 2.0);
    Vector a = fb_of_orbit(D, lam, ps, z, zeta, w, OrbitRoute::Quadrature);
    Vector b = fb_of_orbit(D, lam, ps, z, zeta, w, OrbitRoute::Resolvent);
    for (int i = 0; i < 2; ++i) {
        Complex expect = w(i);
        for (int j = 0; j < 2; ++j) expect *= 1.0 / (zeta[j] - z[j] - lam[j] * D.A[j](i, i));
        CHECK(std::abs(a(i) - expect) < 1e-9);
        CHECK(std::abs(b(i) - expect) < 1e-12);
    }
}

namespace {

/// f(zeta + shift) for a separable function.
SectorFunction shifted(const SectorFunction& f, const Point& shift) {
    SectorFunction g = f;
    for (std::size_t j = 0; j < g.factors.size(); ++j) {
        auto v = f.factors[j].value;
        const Complex s = shift[j];
        g.factors[j].value = [v, s](Complex x) { return v(x + s); };
        g.factors[j].fb = nullptr;
    }
    return g;
}

SectorFunction damped(const SectorFunction& f, const Point& eps) {
    SectorFunction g = f;
    for (std::size_t j = 0; j < g.factors.size(); ++j) {
        auto v = f.factors[j].value;
        const Complex e = eps[j];
        g.factors[j].value = [v, e](Complex x) { return Matrix(std::exp(-e * x) * v(x)); };
        g.factors[j].fb = nullptr;
    }
    return g;
}

CommutingTuple random_commuting(std::mt19937_64& rng, int d, int k) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix V(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) V(i, j) = 0.3 * Complex(n(rng), n(rng));
    V += Matrix::Identity(d, d);
    std::vector<Matrix> A;
    std::vector<Sector> dom;
    for (int j = 0; j < k; ++j) {
        Vector ev(d);
        for (int i = 0; i < d; ++i) ev(i) = -(0.5 + 1.5 * u(rng)) * cis(0.3 * (u(rng) - 0.5));
        A.push_back(V * ev.asDiagonal() * V.inverse());
        dom.push_back(Sector(-0.8, 0.8));
    }
    return CommutingTuple::make(A, dom);
}

}  // namespace

TEST_CASE("translation law") {
    std::mt19937_64 rng(41);
    ProductSector ps{Sector(-0.4, 0.4), Sector(0.0, 0.6)};
    SectorFunction f = inverse_square();
    f.factors.push_back(f.factors[0]);
    f.growth_anchor = Point{0.0, 0.0};
    for (int i = 0; i < 5; ++i) {
        auto phi = random_functional(rng, ps);
        phi.densities.clear();
        const Point eta{Complex(0.5, 0.1), 0.4 * cis(0.3)};
        const Matrix lhs = pair_function(f, translate(phi, eta), PairRoute::Measure).value;
        const Matrix rhs = pair_function(shifted(f, eta), phi, PairRoute::Measure).value;
        CHECK(std::abs(scalar(lhs) - scalar(rhs)) < 1e-14);
        const Matrix via_conv = pair_function(f, convolve(phi, dirac(ps, eta)), PairRoute::Measure).value;
        CHECK(std::abs(scalar(lhs) - scalar(via_conv)) < 1e-14);
    }
}

TEST_CASE("dilation limit") {
    ProductSector ps{Sector(-0.3, 0.5)};
    const SectorFunction f = SectorFunction::exp_poly(Point{1.0}, {{1.0}});
    std::vector<Point> grid;
    for (double r : {0.0, 0.5, 2.0})
        for (double a : {-0.3, 0.1, 0.5}) grid.push_back(Point{r * cis(a)});
    double prev = std::numeric_limits<double>::infinity();
    for (double R : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
        auto nu = regularizer_measure(ps, R);
        double worst = 0.0;
        for (const Point& x : grid) {
            const Complex smoothed = scalar(pair_function(shifted(f, x), nu, PairRoute::Measure).value);
            worst = std::max(worst, std::abs(smoothed - std::exp(-x[0])));
        }
        CHECK(worst < prev);
        prev = worst;
    }
    CHECK(prev < 0.05);
}

TEST_CASE("joint damping and translation limit") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ProductSector ps{Sector(-0.3, 0.4)};
    const Point b{cis(dual_sector(ps[0]).bisector())};
    for (int i = 0; i < 10; ++i) {
        auto phi = random_functional(rng, ps, true);
        const Point w{Complex(0.3 + u(rng), u(rng) - 0.5)};
        auto f = SectorFunction::exp_poly(w, {{1.0, Complex(u(rng), u(rng))}});
        const Complex ref = scalar(pair_function(f, phi, PairRoute::Measure).value);
        std::vector<Matrix> vals;
        std::vector<double> h;
        for (int m = 0; m < 6; ++m) {
            const double t = 0.2 * std::ldexp(1.0, -m);
            const Point eta{t * cis(ps[0].bisector())};
            vals.push_back(pair_function(damped(shifted(f, eta), Point{t * b[0]}), phi, PairRoute::Measure).value);
            h.push_back(t);
        }
        CHECK(std::abs(scalar(vals.back()) - ref) < 0.05 * std::max(1.0, std::abs(ref)));
        CHECK(std::abs(scalar(extrapolate_to_zero(vals, h).value) - ref) < 1e-8 * std::max(1.0, std::abs(ref)));
    }
}

TEST_CASE("weighted pairing does not depend on the anchor") {
    std::mt19937_64 rng(61);
    ProductSector ps{Sector(-0.3, 0.5)};
    for (int i = 0; i < 3; ++i) {
        auto phi = random_functional(rng, ps);
        const Point w{Complex(0.8, 0.2)};
        auto f = SectorFunction::exp_poly(w, {{1.0, 0.5}});
        const Point za = *phi.domain().anchor;
        PairOptions o1, o2;
        o1.anchor = Point{0.5 * (za[0] + w[0])};
        o2.anchor = Point{0.2 * za[0] + 0.8 * w[0]};
        o1.tol = o2.tol = 1e-12;
        const Complex a = scalar(pair_function(f, phi, PairRoute::FbDirect, o1).value);
        const Complex c = scalar(pair_function(f, phi, PairRoute::FbDirect, o2).value);
        CHECK(std::abs(a - c) < 1e-10);
    }
}

TEST_CASE("semigroup pairing") {
    const Matrix A = mat({{-1.0, 0.5}, {0.0, -2.0}});
    auto T = CommutingTuple::make({A}, {Sector(-q, q)});
    ProductSector ps{Sector(-0.2, 0.3)};
    const Point lam{Complex(1.0, 0.2)};
    const Complex nu = 0.7 * cis(0.1);
    auto atom = dirac(ps, Point{nu});
    CHECK((pair_semigroup(T, lam, atom, SemigroupRoute::Measure).value - expm(nu * lam[0] * A)).norm() < 1e-13);
    for (SemigroupRoute r : {SemigroupRoute::ResolventContour, SemigroupRoute::Regularized, SemigroupRoute::EpsShift}) {
        CAPTURE(std::string(to_string(r)));
        CHECK((pair_semigroup(T, lam, atom, r).value - expm(nu * lam[0] * A)).norm() < 1e-6);
    }

    // bisector exponential density: a resolvent product
    ProductSector two{Sector(-0.2, 0.3), Sector(0.0, 0.4)};
    auto D = CommutingTuple::make({mat({{-1, 1}, {0, -2}}), mat({{-3, 0}, {0, -3}})}, {Sector(-q, q), Sector(-q, q)});
    const Point lam2{1.0, Complex(0.8, -0.1)};
    auto e = bisector_exponential(two);
    Matrix expect = Matrix::Identity(2, 2);
    for (std::size_t j = 0; j < 2; ++j)
        expect *= (Matrix::Identity(2, 2) - lam2[j] * cis(two[j].bisector()) * D.A[j]).inverse();
    CHECK((pair_semigroup(D, lam2, e, SemigroupRoute::Measure).value - expect).norm() < 1e-10);
    CHECK((pair_semigroup(D, lam2, e, SemigroupRoute::Regularized).value - expect).norm() < 1e-5);
    CHECK_THROWS_AS(pair_semigroup(D, lam2, e, SemigroupRoute::ResolventContour), DomainError);
}

TEST_CASE("semigroup pairing is multiplicative and obeys the character law") {
    std::mt19937_64 rng(71);
    ProductSector ps{Sector(-0.3, 0.3), Sector(-0.2, 0.4)};
    const Point lam{1.0, Complex(0.9, 0.2)};
    for (int i = 0; i < 5; ++i) {
        auto T = random_commuting(rng, 3, 2);
        auto a = random_functional(rng, ps);
        auto b = random_functional(rng, ps);
        a.densities.clear();
        b.densities.clear();
        const Matrix pa = pair_semigroup(T, lam, a, SemigroupRoute::Measure).value;
        const Matrix pb = pair_semigroup(T, lam, b, SemigroupRoute::Measure).value;
        const Matrix pab = pair_semigroup(T, lam, convolve(a, b), SemigroupRoute::Measure).value;
        CHECK((pab - pa * pb).norm() < 1e-8 * std::max(1.0, pab.norm()));
        const Matrix contour = pair_semigroup(T, lam, convolve(a, b), SemigroupRoute::ResolventContour).value;
        CHECK((contour - pab).norm() < 1e-6 * std::max(1.0, pab.norm()));

        for (Eigen::Index m = 0; m < 3; ++m) {
            const Vector v = T.eigenvectors[0].col(m);
            Point mu(2);
            for (std::size_t j = 0; j < 2; ++j) mu[j] = -lam[j] * v.dot(T.A[j] * v) / v.squaredNorm();
            const Complex fb = fb_transform(a, mu);
            CHECK((pa * v - fb * v).norm() < 1e-9 * std::max(1.0, std::abs(fb)));
        }
    }
}
