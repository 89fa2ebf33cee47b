#include <cmath>

#include "doctest.h"
#include "sectorcalc/quadrature.hpp"

using namespace sectorcalc;

namespace {
const double q = kPi / 4.0;

Matrix scalar(Complex c) {
    Matrix m(1, 1);
    m(0, 0) = c;
    return m;
}
}  // namespace

TEST_CASE("gauss-legendre rule integrates polynomials exactly") {
    const GaussRule& g = gauss_legendre(16);
    double sw = 0.0;
    for (double w : g.weights) sw += w;
    CHECK(sw == doctest::Approx(1.0).epsilon(1e-15));
    for (int p = 0; p <= 31; ++p) {
        double s = 0.0;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * std::pow(g.nodes[i], p);
        CHECK(s == doctest::Approx(1.0 / (p + 1)).epsilon(1e-13));
    }
}

TEST_CASE("boundary paths") {
    AdmissibleRegion hp = product_region({half_plane(0.0, 0.0)});
    DiscretizeOptions uniform;
    uniform.geometric_tail = false;
    uniform.infinite_tail = false;
    auto segs = build_boundary_path(hp, 0, 1.0, 10.0, 16.0, uniform);
    REQUIRE(segs.size() == 2);
    AxisNodes n = flatten(segs);
    double total_len = segs[0].length + segs[1].length;
    CHECK(total_len == doctest::Approx(2.0 * std::sqrt(99.0)));
    CHECK(n.size() >= 0.9 * 20 * 16);
    CHECK(n.size() <= 1.2 * 20 * 16);
    // orientation: the line Re = 1 is traversed upward
    CHECK(n.points.front().imag() < n.points.back().imag());
    Complex wsum = 0.0;
    for (Complex w : n.weights) wsum += w;
    CHECK(std::abs(wsum - Complex(0.0, 2.0 * std::sqrt(99.0))) < 1e-12);

    AdmissibleRegion cone = product_region({pure_cone(Sector(-q, q), 0.0)});
    auto cs = build_boundary_path(cone, 0, 0.1, 20.0, 8.0);
    REQUIRE(cs.size() == 2);
    CHECK(std::abs(cs[0].start - 0.1) < 1e-15);
    CHECK(std::abs(cs[1].start - 0.1) < 1e-15);
    CHECK_THROWS_AS(build_boundary_path(cone, 0, -1.0, 20.0, 8.0), DomainError);

    AdmissibleRegion disk = product_region({cone_minus_disk(Sector(-q, q), 0.0, 1.0, 1.0, 24)});
    auto ds = build_boundary_path(disk, 0, 0.0, 20.0, 8.0);
    REQUIRE(ds.size() == 2 + 24);
    CHECK(std::abs(ds[0].start - ds[1].start) < 1e-12);
    for (std::size_t i = 1; i <= 24; ++i) {
        CHECK(std::abs(ds[i].start - disk.axes[0].polyline[i - 1]) < 1e-12);
        CHECK(std::abs(ds[i].start + ds[i].length * ds[i].direction - disk.axes[0].polyline[i]) < 1e-12);
    }
    CHECK(std::abs(ds.back().start - disk.axes[0].polyline.back()) < 1e-12);
    CHECK_THROWS_AS(build_boundary_path(disk, 0, 0.0, 0.5, 8.0), DomainError);
}

TEST_CASE("ray integrals") {
    IntegrationConfig cfg;
    cfg.tol = 1e-12;
    DecayEnvelope env{1.0, 1.0, 0.0};
    Complex a = ray_integral_scalar([](Complex s) { return std::exp(-s); }, 0.0, 1.0, cfg, env);
    CHECK(std::abs(a - 1.0) < 1e-12);
    env.rate = std::cos(q);
    Complex b = ray_integral_scalar([](Complex s) { return std::exp(-s); }, 0.0, cis(q), cfg, env);
    CHECK(std::abs(b - 1.0) < 1e-12);
    env.rate = 0.5;
    Complex c = ray_integral_scalar([](Complex s) { return s * std::exp(-s); }, 0.0, 1.0, cfg, env);
    CHECK(std::abs(c - 1.0) < 1e-12);
}

TEST_CASE("contour integrals over a shifted cone") {
    AdmissibleRegion cone = product_region({pure_cone(Sector(-q, q), 0.0)});
    IntegrationConfig cfg;
    cfg.tol = 1e-10;
    ContourQuadrature cq = boundary_quadrature(cone, {0.5}, 1e5, 8.0);

    auto zero = [](std::span<const Complex>, std::span<const std::size_t>) { return scalar(0.0); };
    auto r0 = integrate(zero, cq, cfg);
    CHECK(r0.value(0, 0) == Complex(0.0, 0.0));

    auto f = [](std::span<const Complex> z, std::span<const std::size_t>) {
        return scalar(1.0 / ((z[0] + 2.0) * (z[0] + 2.0)));
    };
    auto r1 = integrate(f, cq, cfg);
    CHECK(std::abs(r1.value(0, 0)) < 1e-9);

    // boundary traversed with the region on the right: the Cauchy integral of f/(1 - sigma)
    // equals 2 pi i f(1)
    auto g = [](std::span<const Complex> z, std::span<const std::size_t>) {
        return scalar(1.0 / ((z[0] + 2.0) * (z[0] + 2.0) * (1.0 - z[0])));
    };
    auto r2 = integrate(g, cq, cfg);
    CHECK(std::abs(r2.value(0, 0) - 2.0 * kPi * kI / 9.0) < 1e-9);
    REQUIRE(r2.history.size() >= 1);
}

TEST_CASE("tensor contour integral is deterministic and thread independent") {
    AdmissibleRegion U = product_region({pure_cone(Sector(-q, q), 0.0), half_plane(0.0, 0.0)});
    ContourQuadrature cq = boundary_quadrature(U, {0.5, 0.5}, 200.0, 4.0);
    auto axes = cq.axes();
    auto f = [](std::span<const Complex> z, std::span<const std::size_t>) {
        Matrix m(2, 2);
        m << 1.0 / ((z[0] + 1.0) * (z[0] + 1.0)), 1.0 / ((z[1] + 2.0) * (z[1] + 2.0)),
            1.0 / ((z[0] + 1.0) * (z[1] + 3.0) * (z[1] + 3.0)), z[0] * 0.0;
        return m;
    };
    Matrix a = quadrature_sum(f, axes, 1);
    Matrix b = quadrature_sum(f, axes, 4);
    Matrix c = quadrature_sum(f, axes, 3);
    CHECK((a - b).norm() == 0.0);
    CHECK((a - c).norm() == 0.0);
}

TEST_CASE("non-finite integrand is reported") {
    AdmissibleRegion cone = product_region({pure_cone(Sector(-q, q), 0.0)});
    ContourQuadrature cq = boundary_quadrature(cone, {0.0}, 50.0, 4.0);
    auto bad = [](std::span<const Complex>, std::span<const std::size_t>) { return scalar(std::nan("")); };
    CHECK_THROWS_AS(integrate(bad, cq, IntegrationConfig{}), ConvergenceError);
}
