#include "sectorcalc/scenarios.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "sectorcalc/calculus.hpp"
#include "sectorcalc/extrapolation.hpp"
#include "sectorcalc/functionals.hpp"
#include "sectorcalc/semigroups.hpp"

namespace sectorcalc {

namespace {

using json = nlohmann::json;
const double q = kPi / 4.0;

std::string fmt(double x) { return format_double(x); }
std::string fmt(Complex z) { return format_complex(z); }

/// Runs one check, timing it and turning exceptions into a failed row.
ReportRow guarded(const std::string& scenario, const std::string& check, const std::string& params,
                  const std::function<ReportRow()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    ReportRow row;
    try {
        row = body();
    } catch (const std::exception& e) {
        row = ReportRow{};
        row.passed = false;
        row.abs_error = row.rel_error = std::numeric_limits<double>::quiet_NaN();
        row.note = std::string("error: ") + e.what();
    }
    row.scenario = scenario;
    row.check = check;
    if (row.parameters.empty()) row.parameters = params;
    row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

ReportRow row_of(std::vector<Complex> computed, std::vector<Complex> oracle, CheckKind kind, double tol,
                 double error_estimate = 0.0) {
    return make_row("", "", "", std::move(computed), std::move(oracle), kind, tol, error_estimate);
}

ReportRow scalar_row(double computed, double oracle, CheckKind kind, double tol) {
    return row_of({Complex(computed)}, {Complex(oracle)}, kind, tol);
}

// ---------------------------------------------------------------------------------------------
// random banks

/// V (D + N) V^{-1} with spectrum D in Re < -0.5 and a nilpotent perturbation N.
Matrix random_sectorial(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix D = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        D(i, i) = Complex(-1.8 + 1.2 * u(rng), 0.6 * u(rng));
        for (int j = i + 1; j < n; ++j) D(i, j) = 0.3 * Complex(u(rng), u(rng));
    }
    Matrix V = Matrix::Identity(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) V(i, j) += 0.3 * Complex(u(rng), u(rng));
    return V * D * V.inverse();
}

/// k commuting diagonalizable matrices V D_j V^{-1} with spectra in Re < -0.5, |Im| <= 0.5.
CommutingTuple random_commuting(std::mt19937_64& rng, int n, std::size_t k,
                                std::vector<Sector> domains = {}) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix V = Matrix::Identity(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) V(i, j) += 0.3 * Complex(u(rng), u(rng));
    const Matrix Vinv = V.inverse();
    std::vector<Matrix> A;
    for (std::size_t j = 0; j < k; ++j) {
        Vector d(n);
        for (int i = 0; i < n; ++i) d(i) = Complex(-1.5 + 0.8 * u(rng), 0.5 * u(rng));
        A.push_back(V * d.asDiagonal() * Vinv);
    }
    if (domains.empty()) domains.assign(k, Sector(-1.0, 1.0));
    return CommutingTuple::make(A, domains);
}

Matrix diag(std::initializer_list<Complex> d) {
    Matrix m = Matrix::Zero(d.size(), d.size());
    Eigen::Index i = 0;
    for (Complex c : d) m(i, i) = c, ++i;
    return m;
}

Functional random_functional(std::mt19937_64& rng, const ProductSector& ps, bool with_density) {
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
    if (with_density) {
        RayDensity d;
        for (const Sector& s : ps) {
            d.offset.push_back(0.3 * u(rng) * cis(s.bisector()));
            d.omega.push_back(s.alpha + u(rng) * s.aperture());
            d.s.push_back(Complex(0.8 + u(rng), 0.4 * (u(rng) - 0.5)));
            d.poly.push_back({Complex(u(rng)), Complex(u(rng), u(rng)), Complex(0.3 * u(rng))});
        }
        f.densities.push_back(d);
    }
    f.validate();
    return f;
}

/// Pure cones around -lambda sigma(A_j) with half-aperture pi/4 and the vertex 0.5 to the left.
AdmissibleRegion cone_region_for(const CommutingTuple& T, const Point& lambda) {
    std::vector<AxisRegion> axes;
    for (std::size_t j = 0; j < T.k(); ++j) {
        double v = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < T.eigenvalues[j].size(); ++i) {
            const Complex p = -lambda[j] * T.eigenvalues[j](i);
            v = std::min(v, p.real() - std::abs(p.imag()));
        }
        axes.push_back(pure_cone(Sector(-q, q), v - 0.5));
    }
    return product_region(std::move(axes));
}

Evaluator inverse_square(std::vector<double> s) {
    return [s](const Point& z) {
        Complex r = 1.0;
        for (std::size_t j = 0; j < z.size(); ++j) r /= (z[j] + s[j]) * (z[j] + s[j]);
        return r;
    };
}

HoloFunction holo(Evaluator f, FunctionClass cls, const AdmissibleRegion& U) {
    HoloFunction F;
    F.f = std::move(f);
    F.cls = cls;
    F.region = U;
    if (cls == FunctionClass::H1) F.decay = DecayCertificate{1.0, 2.0};
    return F;
}

CalculusOptions calc_opts(const RunContext& ctx) {
    CalculusOptions o;
    o.threads = ctx.threads;
    o.tol = 1e-10;
    return o;
}

Point zeros(std::size_t k) { return Point(k, 0.0); }

// ---------------------------------------------------------------------------------------------
// suites

using SuiteFn = std::function<void(const RunContext&, const std::string&, Report&)>;

void suite_resolvent(const RunContext& ctx, const std::string& name, Report& rep) {
    std::mt19937_64 rng(ctx.seed);
    const Complex lam(0.3, 0.2);
    for (int i = 0; i < 20; ++i) {
        const int n = 2 + i % 5;
        const Matrix A = random_sectorial(rng, n);
        std::ostringstream p;
        p << "matrix=" << i << " dim=" << n << " lambda=" << fmt(lam);
        rep.rows.push_back(guarded(name, "laplace resolvent vs direct solve", p.str(), [&] {
            auto T = CommutingTuple::make({A}, {Sector(-q, q)});
            const auto r = resolvent_via_laplace(T, 0, lam, 1.0, 1e-10);
            const Matrix direct = (lam * Matrix::Identity(n, n) - A).partialPivLu().inverse();
            return row_of(flatten(r.value), flatten(direct), CheckKind::Relative, ctx.tol(1e-6), r.error_estimate);
        }));
    }
}

void suite_generator(const RunContext& ctx, const std::string& name, Report& rep) {
    std::mt19937_64 rng(ctx.seed);
    for (int i = 0; i < 20; ++i) {
        const int n = 2 + i % 5;
        const Matrix A = random_sectorial(rng, n);
        std::ostringstream p;
        p << "matrix=" << i << " dim=" << n << " lambda=1";
        rep.rows.push_back(guarded(name, "generator from weighted integrals", p.str(), [&] {
            auto T = CommutingTuple::make({A}, {Sector(-q, q)});
            const auto g = generator_from_weighted_integrals(T, 0, 1.0, 1e-10);
            return row_of(flatten(g.generator), flatten(A), CheckKind::Relative, ctx.tol(1e-6));
        }));
    }
    rep.rows.push_back(guarded(name, "nilpotent generator", "A=[[0,1],[0,0]] lambda=1", [&] {
        Matrix N = Matrix::Zero(2, 2);
        N(0, 1) = 1.0;
        auto T = CommutingTuple::make({N}, {Sector(-q, q)});
        const auto g = generator_from_weighted_integrals(T, 0, 1.0, 1e-12);
        return row_of(flatten(g.generator), flatten(N), CheckKind::Absolute, ctx.tol(1e-10));
    }));
}

void suite_duality(const RunContext& ctx, const std::string& name, Report& rep) {
    std::mt19937_64 rng(ctx.seed + 1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const ProductSector ps{Sector(-0.3, 0.6)};
    const Functional phi = random_functional(rng, ps, false);
    const Point z = phi.domain().anchor.value_or(Point{0.0});
    for (int i = 0; i < 20; ++i) {
        // directions outside the closed sector, away from its edges
        const double th = 0.9 + u(rng) * (2.0 * kPi - 1.5);
        const Point lam{(0.5 + 2.5 * u(rng)) * cis(th)};
        rep.rows.push_back(guarded(name, "cauchy transform: measure vs fourier-borel", "lambda=" + fmt(lam[0]), [&] {
            const Complex a = cauchy_transform(phi, z, lam, CauchyRoute::Measure);
            const Complex b = cauchy_transform(phi, z, lam, CauchyRoute::FourierBorel);
            return row_of({b}, {a}, CheckKind::Absolute, ctx.tol(1e-8) * std::max(1.0, std::abs(a)));
        }));
    }
}

void suite_convolution(const RunContext& ctx, const std::string& name, Report& rep) {
    std::mt19937_64 rng(ctx.seed + 2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const ProductSector two{Sector(-0.5, 0.5), Sector(0.2, 1.1)};
    std::vector<std::pair<Functional, Functional>> pairs;
    for (int i = 0; i < 100; ++i) {
        auto a = random_functional(rng, two, i % 2 == 0);
        auto b = random_functional(rng, two, i % 4 == 0);
        if (!a.densities.empty() && !b.densities.empty()) b.densities[0].omega = a.densities[0].omega;
        pairs.emplace_back(a, b);
    }
    rep.rows.push_back(guarded(name, "fourier-borel multiplicativity (worst of 100)", "pairs=100", [&] {
        double worst = 0.0;
        for (const auto& [a, b] : pairs) {
            const Functional ab = convolve(a, b);
            Point zeta;
            const auto anchor = convolution_anchor(a, b);
            for (std::size_t j = 0; j < 2; ++j) {
                const Sector d = dual_sector(two[j]);
                zeta.push_back((anchor ? (*anchor)[j] : 0.0) + 0.05 * cis(d.bisector()) +
                               3.0 * u(rng) * cis(d.alpha + u(rng) * d.aperture()));
            }
            const Complex lhs = fb_transform(ab, zeta);
            const Complex rhs = fb_transform(a, zeta) * fb_transform(b, zeta);
            worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
        }
        return scalar_row(worst, 0.0, CheckKind::Absolute, ctx.tol(1e-8));
    }));
    rep.rows.push_back(guarded(name, "semigroup pairing multiplicativity (worst of 100)", "pairs=100 dim=3 k=2", [&] {
        auto T = random_commuting(rng, 3, 2, {two[0], two[1]});
        const Point lam{1.0, 1.0};
        double worst = 0.0;
        for (const auto& [a, b] : pairs) {
            const Matrix pa = pair_semigroup(T, lam, a, SemigroupRoute::Measure).value;
            const Matrix pb = pair_semigroup(T, lam, b, SemigroupRoute::Measure).value;
            const Matrix pab = pair_semigroup(T, lam, convolve(a, b), SemigroupRoute::Measure).value;
            worst = std::max(worst, (pab - pa * pb).norm() / std::max(1.0, pab.norm()));
        }
        return scalar_row(worst, 0.0, CheckKind::Absolute, ctx.tol(1e-8));
    }));
}

void suite_wn(const RunContext& ctx, const std::string& name, Report& rep) {
    PairOptions opt;
    opt.threads = ctx.threads;
    rep.rows.push_back(guarded(name, "W_n limit vs measure (half-line)", "phi=t e^{-t} dt f=(1+2t)e^{-t/2}", [&] {
        Functional phi;
        phi.sectors = {Sector(0.0, 0.0)};
        phi.densities.push_back(RayDensity{{0.0}, {0.0}, {1.0}, {{0.0, 1.0}}});
        const auto g = SectorFunction::exp_poly(Point{0.5}, {{1.0, 2.0}});
        const auto m = pair_function(g, phi, PairRoute::Measure, opt);
        const auto w = pair_function(g, phi, PairRoute::WnLimit, opt);
        return row_of(flatten(w.value), flatten(m.value), CheckKind::Relative, ctx.tol(1e-5), w.error_estimate);
    }));
    rep.rows.push_back(guarded(name, "W_n limit vs measure (sector)", "sector=(-pi/4,pi/4) atom+density", [&] {
        Functional phi;
        phi.sectors = {Sector(-q, q)};
        phi.atoms.push_back(Atom{{Complex(0.8, 0.3)}, Complex(0.5, -0.2)});
        phi.densities.push_back(RayDensity{{0.0}, {0.2}, {Complex(1.2, 0.1)}, {{0.0, 1.0, 0.5}}});
        const auto g = SectorFunction::exp_poly(Point{Complex(0.6, 0.1)}, {{1.0, Complex(0.5, 0.5)}});
        const auto m = pair_function(g, phi, PairRoute::Measure, opt);
        const auto w = pair_function(g, phi, PairRoute::WnLimit, opt);
        return row_of(flatten(w.value), flatten(m.value), CheckKind::Relative, ctx.tol(1e-5), w.error_estimate);
    }));
}

ReportRow calculus_vs_oracle(const RunContext& ctx, const HoloFunction& F, const CommutingTuple& T, const Point& lam,
                             const AdmissibleRegion& U, double tol) {
    const CalculusResult r = apply_calculus(F, T, lam, U, calc_opts(ctx));
    const Matrix oracle = spectral_oracle(F.f, T, lam);
    return row_of(flatten(r.value), flatten(oracle), CheckKind::Relative, tol, r.error_estimate);
}

void suite_calculus_k1(const RunContext& ctx, const std::string& name, Report& rep) {
    rep.rows.push_back(guarded(name, "contour calculus vs scalar oracle", "A=[[-2]] lambda=1 F=1/(z+1)^2", [&] {
        auto T = CommutingTuple::make({diag({-2.0})}, {Sector(-q, q)});
        const auto U = product_region({pure_cone(Sector(-q, q), 0.0)});
        const CalculusResult r = functional_calculus(holo(inverse_square({1.0}), FunctionClass::H1, U), T, {1.0}, U,
                                                     {0.0}, calc_opts(ctx));
        return row_of(flatten(r.value), {Complex(1.0 / 9.0)}, CheckKind::Relative, ctx.tol(1e-6), r.error_estimate);
    }));
    rep.rows.push_back(guarded(name, "contour calculus vs eigen oracle", "A=[[0,1],[-2,-3]] lambda=1 F=1/(z+1)^2", [&] {
        Matrix A(2, 2);
        A << 0.0, 1.0, -2.0, -3.0;
        auto T = CommutingTuple::make({A}, {Sector(-q, q)});
        const auto U = product_region({pure_cone(Sector(-q, q), 0.0)});
        return calculus_vs_oracle(ctx, holo(inverse_square({1.0}), FunctionClass::H1, U), T, {1.0}, U, ctx.tol(1e-6));
    }));
    std::mt19937_64 rng(ctx.seed + 3);
    for (int i = 0; i < 3; ++i) {
        auto T = random_commuting(rng, 4, 1);
        const Point lam{i == 2 ? Complex(0.9, 0.15) : Complex(1.0)};
        std::ostringstream p;
        p << "random dim=4 trial=" << i << " lambda=" << fmt(lam[0]) << " F=1/(z+1.5)^2";
        rep.rows.push_back(guarded(name, "contour calculus vs eigen oracle", p.str(), [&] {
            const auto U = cone_region_for(T, lam);
            return calculus_vs_oracle(ctx, holo(inverse_square({1.5 - U.axes[0].vertex.real()}), FunctionClass::H1, U),
                                      T, lam, U, ctx.tol(1e-6));
        }));
    }
}

void suite_calculus_k2(const RunContext& ctx, const std::string& name, Report& rep) {
    rep.rows.push_back(guarded(name, "contour calculus vs separable oracle", "A1=[[-2]] A2=[[-3]] lambda=(1,1)", [&] {
        auto T = CommutingTuple::make({diag({-2.0}), diag({-3.0})}, {Sector(-q, q), Sector(-q, q)});
        const auto U = product_region({pure_cone(Sector(-q, q), 0.0), pure_cone(Sector(-q, q), 0.0)});
        const CalculusResult r = functional_calculus(holo(inverse_square({1.0, 1.0}), FunctionClass::H1, U), T,
                                                     {1.0, 1.0}, U, zeros(2), calc_opts(ctx));
        return row_of(flatten(r.value), {Complex(1.0 / 144.0)}, CheckKind::Relative, ctx.tol(1e-6), r.error_estimate);
    }));
    std::mt19937_64 rng(ctx.seed + 4);
    for (int i = 0; i < 2; ++i) {
        auto T = random_commuting(rng, 3, 2);
        const Point lam{1.0, Complex(0.9, -0.1)};
        std::ostringstream p;
        p << "random dim=3 trial=" << i << " lambda=(1," << fmt(lam[1]) << ")";
        rep.rows.push_back(guarded(name, "contour calculus vs eigen oracle", p.str(), [&] {
            const auto U = cone_region_for(T, lam);
            const auto f = inverse_square({1.0 - U.axes[0].vertex.real(), 0.7 - U.axes[1].vertex.real()});
            return calculus_vs_oracle(ctx, holo(f, FunctionClass::H1, U), T, lam, U, ctx.tol(1e-6));
        }));
    }
}

void suite_independence(const RunContext& ctx, const std::string& name, Report& rep) {
    std::mt19937_64 rng(ctx.seed + 5);
    for (std::size_t k : {std::size_t(1), std::size_t(2)}) {
        auto T = random_commuting(rng, 3, k);
        const Point lam(k, 1.0);
        std::ostringstream p;
        p << "k=" << k << " dim=3 pure cone vs excised cone + eps";
        rep.rows.push_back(guarded(name, "contour independence", p.str(), [&] {
            const AdmissibleRegion U = cone_region_for(T, lam);
            std::vector<AxisRegion> alt;
            Point eps;
            std::vector<double> shifts;
            for (std::size_t j = 0; j < k; ++j) {
                const Complex v = U.axes[j].vertex;
                alt.push_back(j == 0 ? cone_minus_disk(Sector(-q, q), v - 0.6, 0.3, 0.4)
                                     : cone_minus_rectangle(Sector(-0.6, 0.6), v - 0.4, 0.2, 0.3));
                eps.push_back(j == 0 ? Complex(0.1, 0.03) : Complex(0.05, 0.0));
                shifts.push_back(1.2 - v.real());
            }
            const AdmissibleRegion V = product_region(alt);
            const auto f = inverse_square(shifts);
            const Matrix a = functional_calculus(holo(f, FunctionClass::H1, U), T, lam, U, zeros(k), calc_opts(ctx)).value;
            const Matrix b = functional_calculus(holo(f, FunctionClass::H1, V), T, lam, V, eps, calc_opts(ctx)).value;
            return row_of(flatten(b), flatten(a), CheckKind::Absolute, ctx.tol(2e-6) * std::max(1.0, a.norm()));
        }));
    }
}

void suite_calculus(const RunContext& ctx, const std::string& name, Report& rep) {
    suite_calculus_k1(ctx, name, rep);
    suite_calculus_k2(ctx, name, rep);
    suite_independence(ctx, name, rep);
}

void suite_special(const RunContext& ctx, const std::string& name, Report& rep) {
    std::mt19937_64 rng(ctx.seed + 6);
    const double nu = 0.7;
    for (std::size_t k : {std::size_t(1), std::size_t(2)}) {
        auto T = random_commuting(rng, 3, k);
        const Point lam = k == 1 ? Point{1.0} : Point{1.0, 0.8};
        const std::size_t j = k - 1;
        const AdmissibleRegion U = cone_region_for(T, lam);
        std::ostringstream p;
        p << "k=" << k << " axis=" << j << " nu=" << fmt(nu) << " dim=3";
        rep.rows.push_back(guarded(name, "exponential reproduces the semigroup", p.str(), [&] {
            auto F = holo([j, nu](const Point& z) { return std::exp(-nu * z[j]); }, FunctionClass::Hinf, U);
            const auto r = functional_calculus_hinf(F, T, lam, U, calc_opts(ctx));
            const Matrix expect = expm(nu * lam[j] * T.A[j]);
            return row_of(flatten(r.value), flatten(expect), CheckKind::Relative, ctx.tol(1e-6), r.error_estimate);
        }));
        p.str("");
        p << "k=" << k << " axis=" << j << " dim=3 witness=1/(z+nu0)^2";
        rep.rows.push_back(guarded(name, "projection via the Smirnov quotient", p.str(), [&] {
            const double nu0 = 2.0 + growth_abscissa(T, j, lam[j], U.axes[j].sector.bisector());
            HoloFunction F = holo([j](const Point& z) { return -z[j]; }, FunctionClass::Smirnov, U);
            F.witness = [j, nu0](const Point& z) { return 1.0 / ((z[j] + nu0) * (z[j] + nu0)); };
            F.witness_product = [j, nu0](const Point& z) { return -z[j] / ((z[j] + nu0) * (z[j] + nu0)); };
            F.validate(200);
            const auto r = functional_calculus_smirnov(F, T, lam, U, calc_opts(ctx));
            const Matrix expect = lam[j] * T.A[j];
            ReportRow row = row_of(flatten(r.value), flatten(expect), CheckKind::Relative, ctx.tol(1e-6), r.error_estimate);
            row.note = "nu0=" + fmt(nu0);
            return row;
        }));
    }
}

void suite_spectral(const RunContext& ctx, const std::string& name, Report& rep) {
    auto eigen_rows = [&](const std::string& params, const HoloFunction& F, const CommutingTuple& T, const Point& lam,
                          const AdmissibleRegion& U) {
        SpectralMapReport s;
        std::string err;
        try {
            s = spectral_map_check(F, T, lam, U, calc_opts(ctx));
        } catch (const std::exception& e) {
            err = e.what();
        }
        if (!err.empty()) {
            rep.rows.push_back(guarded(name, "eigenvalue of the calculus", params, [&]() -> ReportRow {
                throw std::runtime_error(err);
            }));
            return;
        }
        for (std::size_t i = 0; i < s.eigen_value.size(); ++i)
            rep.rows.push_back(guarded(name, "eigenvalue of the calculus", params + " index=" + std::to_string(i), [&] {
                return row_of({s.eigen_value[i]}, {s.eigen_oracle[i]}, CheckKind::Relative, ctx.tol(1e-6));
            }));
    };
    {
        Matrix A(2, 2);
        A << 0.0, 1.0, -2.0, -3.0;
        auto T = CommutingTuple::make({A}, {Sector(-q, q)});
        const auto U = product_region({pure_cone(Sector(-q, q), 0.0)});
        eigen_rows("A=[[0,1],[-2,-3]] F=1/(z+1)^2", holo(inverse_square({1.0}), FunctionClass::H1, U), T, {1.0}, U);
        eigen_rows("A=[[0,1],[-2,-3]] F=1", holo([](const Point&) { return Complex(1.0); }, FunctionClass::Hinf, U), T,
                   {1.0}, U);
    }
    {
        auto T = CommutingTuple::make({diag({-1.0, -2.5, Complex(-1.5, 0.3)})}, {Sector(-q, q)});
        const auto U = cone_region_for(T, {1.0});
        eigen_rows("diag(-1,-2.5,-1.5+0.3i) F=exp(-z)",
                   holo([](const Point& z) { return std::exp(-z[0]); }, FunctionClass::Hinf, U), T, {1.0}, U);
    }
    std::mt19937_64 rng(ctx.seed + 7);
    auto T = random_commuting(rng, 4, 2);
    const Point lam{1.0, 0.9};
    const auto U = cone_region_for(T, lam);
    const auto f = inverse_square({1.0 - U.axes[0].vertex.real(), 1.0 - U.axes[1].vertex.real()});
    eigen_rows("random commuting pair dim=4 F=prod 1/(z_j+s_j)^2", holo(f, FunctionClass::H1, U), T, lam, U);
}

void suite_hardy(const RunContext& ctx, const std::string& name, Report& rep) {
    struct Preset {
        std::string label;
        AdmissibleRegion U;
        Point eps;
        std::vector<Point> interior;
    };
    const std::vector<Preset> presets{
        {"pure cone", product_region({pure_cone(Sector(-q, q), 0.0)}), {0.5}, {{1.0}, {Complex(2.0, 0.5)}}},
        {"cone minus disk", product_region({cone_minus_disk(Sector(-q, q), 0.0, 0.5, 0.5)}), {0.3}, {{Complex(1.5, 0.2)}}},
        {"cone minus rectangle", product_region({cone_minus_rectangle(Sector(-q, q), 0.0, 0.4, 0.6)}), {0.2},
         {{Complex(1.5, -0.3)}}},
        {"half-plane", product_region({half_plane(0.0, 0.0)}), {0.25}, {{Complex(1.0, 1.0)}}},
        {"cone x half-plane", product_region({pure_cone(Sector(-q, q), 0.0), half_plane(0.0, 0.0)}), {0.3, 0.2},
         {{Complex(1.2, 0.1), Complex(0.8, -0.5)}}},
    };
    IntegrationConfig cfg;
    cfg.tol = 1e-12;
    cfg.relative = true;
    cfg.scale_floor = 1.0;
    cfg.threads = ctx.threads;
    for (const Preset& pr : presets) {
        const std::size_t k = pr.U.k();
        const std::vector<std::vector<double>> bank = k == 1
                                                          ? std::vector<std::vector<double>>{{1.0}, {2.0}, {0.5}}
                                                          : std::vector<std::vector<double>>{{1.0, 1.0}, {0.5, 2.0}};
        for (const auto& s : bank) {
            std::ostringstream p;
            p << "region=" << pr.label << " F=prod 1/(z_j+s_j)^2 s=(";
            for (std::size_t j = 0; j < s.size(); ++j) p << (j ? "," : "") << fmt(s[j]);
            p << ")";
            const Evaluator f = inverse_square(s);
            rep.rows.push_back(guarded(name, "boundary integral vanishes", p.str(), [&] {
                ContourQuadrature cq = boundary_quadrature(pr.U, pr.eps, 16.0, 4.0);
                auto integrand = [&](std::span<const Complex> z, std::span<const std::size_t>) {
                    return Matrix::Constant(1, 1, f(Point(z.begin(), z.end())));
                };
                const auto r = integrate(integrand, cq, cfg);
                return row_of(flatten(r.value), {Complex(0.0)}, CheckKind::Absolute, ctx.tol(1e-8), r.error_estimate);
            }));
            for (const Point& zeta : pr.interior) {
                std::ostringstream pz;
                pz << p.str() << " zeta=" << fmt(zeta[0]);
                rep.rows.push_back(guarded(name, "interior cauchy reproduction", pz.str(), [&] {
                    ContourQuadrature cq = boundary_quadrature(pr.U, pr.eps, 16.0, 4.0);
                    const Complex c = std::pow(2.0 * kPi * kI, -static_cast<int>(k));
                    auto integrand = [&](std::span<const Complex> z, std::span<const std::size_t>) {
                        Complex kernel = c;
                        for (std::size_t j = 0; j < k; ++j) kernel /= zeta[j] - z[j];
                        return Matrix::Constant(1, 1, kernel * f(Point(z.begin(), z.end())));
                    };
                    const auto r = integrate(integrand, cq, cfg);
                    return row_of(flatten(r.value), {f(zeta)}, CheckKind::Absolute, ctx.tol(1e-8), r.error_estimate);
                }));
            }
        }
    }
    const auto H = product_region({half_plane(0.0, 0.0)});
    const Evaluator f = inverse_square({1.0});
    const H1Norm norm = h1_norm(f, H, default_eps_grid(H), 1e-10);
    rep.rows.push_back(guarded(name, "half-plane H1 norm of 1/(z+1)^2", "grid=default", [&] {
        return scalar_row(norm.value, kPi, CheckKind::Absolute, ctx.tol(1e-4));
    }));
    struct BoundCase {
        std::string label;
        AdmissibleRegion U;
        Evaluator f;
    };
    const std::vector<BoundCase> cases{
        {"half-plane F=1/(z+1)^2", H, f},
        {"pure cone F=1/(z+1)^2", product_region({pure_cone(Sector(-q, q), 0.0)}), f},
        {"cone x half-plane F=1/((z1+1)^2 (z2+2)^2)",
         product_region({pure_cone(Sector(-q, q), 0.0), half_plane(0.0, 0.0)}), inverse_square({1.0, 2.0})},
    };
    for (const BoundCase& bc : cases) {
        rep.rows.push_back(guarded(name, "pointwise bound ratio", bc.label + " samples=60", [&] {
            const H1Norm n = h1_norm(bc.f, bc.U, default_eps_grid(bc.U), 1e-8);
            const PointwiseBound b = pointwise_bound_check(bc.f, bc.U, sample_region(bc.U, 60, ctx.seed), n.value);
            ReportRow row = scalar_row(b.worst_ratio, 1.0, CheckKind::AtMost, 1e-3);
            row.note = "norm lower bound " + fmt(n.value);
            return row;
        }));
    }
}

void suite_gaps(const RunContext& ctx, const std::string& name, Report& rep) {
    rep.rows.push_back(guarded(name, "multiplication semigroup gap", "t=1 s=2 brute force", [&] {
        const auto g = mult_semigroup_gap(1.0, 2.0);
        ReportRow row = scalar_row(g.brute_force, 0.25, CheckKind::Absolute, ctx.tol(1e-8));
        row.note = "closed form " + fmt(g.closed_form);
        return row;
    }));
    for (double t : {0.01, 0.02, 0.05, 0.1, 0.2})
        rep.rows.push_back(guarded(name, "quasinilpotent shift gap exceeds 1/4", "n=512 t=" + fmt(t), [&] {
            const double g = quasinilpotent_gap(512, t);
            ReportRow row = scalar_row(g, 0.25, CheckKind::AtLeast, 0.0);
            row.passed = g > 0.25;
            return row;
        }));
}

void suite_outer(const RunContext& ctx, const std::string& name, Report& rep) {
    (void)ctx;
    std::vector<Point> disk, rim;
    for (int i = 0; i < 16; ++i)
        for (double r : {0.0, 0.3, 0.6, 0.9}) disk.push_back({r * cis(2.0 * kPi * i / 16.0)});
    for (int i = 0; i < 256; ++i) rim.push_back({0.999 * cis(2.0 * kPi * (i + 0.5) / 256.0)});
    WitnessSequence lin;
    for (int n = 1; n <= 512; n *= 2) lin.members.push_back([n](const Point& z) { return (1.0 + 1.0 / n - z[0]) / 2.0; });
    const OuterReport disk_rep = strongly_outer_check([](const Point& z) { return (1.0 - z[0]) / 2.0; }, lin, disk, rim);
    const std::string dp = "F=(1-z)/2 F_n=(1+1/n-z)/2 n=1..512";
    rep.rows.push_back(guarded(name, "disk witness: domination |F| <= |F_n|", dp, [&] {
        return scalar_row(disk_rep.worst_domination, 0.0, CheckKind::AtMost, 1e-12);
    }));
    rep.rows.push_back(guarded(name, "disk witness: F/F_n -> 1", dp, [&] {
        ReportRow row = scalar_row(disk_rep.worst_final_ratio, 0.05, CheckKind::AtMost, 0.0);
        row.passed = row.passed && disk_rep.ratio_converges;
        return row;
    }));
    rep.rows.push_back(guarded(name, "disk witness: invertibility proxy", dp + " rim r=0.999", [&] {
        ReportRow row = scalar_row(disk_rep.min_witness_modulus, 0.0, CheckKind::AtLeast, 0.0);
        row.passed = disk_rep.min_witness_modulus > 0.0;
        row.note = disk_rep.verdict;
        return row;
    }));

    const auto inner = [](Complex z) { return std::exp((z + 1.0) / (z - 1.0)); };
    const std::vector<double> radii{0.0, 0.5, 0.9, 0.95};
    std::optional<DiskDiagnostic> d;
    std::string err;
    try {
        d = outer_diagnostic_disk(inner, radii, 1 << 16);
    } catch (const std::exception& e) {
        err = e.what();
    }
    for (std::size_t i = 0; i < radii.size(); ++i)
        rep.rows.push_back(guarded(name, "singular inner slice: circle mean of log|f|",
                                   "f=exp((z+1)/(z-1)) r=" + fmt(radii[i]), [&] {
                                       if (!d) throw std::runtime_error(err);
                                       return scalar_row(d->circle_means[i], -1.0, CheckKind::Absolute, ctx.tol(1e-3));
                                   }));
    rep.rows.push_back(guarded(name, "singular inner slice: boundary mean of log|f|", "f=exp((z+1)/(z-1)) r=1", [&] {
        if (!d) throw std::runtime_error(err);
        ReportRow row = scalar_row(d->boundary_mean, 0.0, CheckKind::Absolute, ctx.tol(1e-3));
        row.note = "gap " + fmt(d->gap);
        return row;
    }));
    rep.rows.push_back(guarded(name, "singular inner slice: shifted witnesses rejected", "F_n=exp((z+1)/(z-1-1/n))", [&] {
        std::vector<Point> near1 = disk;
        near1.push_back({0.99});
        near1.push_back({0.999});
        WitnessSequence sh;
        for (int n = 1; n <= 512; n *= 2)
            sh.members.push_back([n](const Point& z) { return std::exp((z[0] + 1.0) / (z[0] - 1.0 - 1.0 / n)); });
        const OuterReport r =
            strongly_outer_check([&](const Point& z) { return inner(z[0]); }, sh, near1, rim);
        ReportRow row = scalar_row(r.passed() ? 1.0 : 0.0, 0.0, CheckKind::Absolute, 0.0);
        row.note = r.verdict;
        return row;
    }));
}

// ---------------------------------------------------------------------------------------------
// convergence studies

struct StudyPoint {
    double param;
    std::vector<Complex> computed;
    std::vector<Complex> oracle;
    double estimate = 0.0;
};

void study_rows(const std::string& name, const std::string& check, const std::string& param,
                const std::vector<StudyPoint>& pts, double tol, Report& rep, bool monotone_row) {
    std::vector<double> errs;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        ReportRow row = row_of(pts[i].computed, pts[i].oracle, CheckKind::Absolute, std::numeric_limits<double>::infinity(),
                               pts[i].estimate);
        row.scenario = name;
        row.check = check;
        row.parameters = param + "=" + fmt(pts[i].param);
        errs.push_back(row.abs_error);
        if (i > 0 && errs[i] > 0.0 && errs[i - 1] > 0.0) row.observed_order = std::log2(errs[i - 1] / errs[i]);
        row.tolerance = tol;
        row.passed = std::isfinite(row.abs_error);
        rep.rows.push_back(row);
    }
    if (monotone_row) {
        bool mono = true;
        for (std::size_t i = 1; i < errs.size(); ++i) mono = mono && errs[i] < errs[i - 1];
        ReportRow row = scalar_row(mono ? 1.0 : 0.0, 1.0, CheckKind::Absolute, 0.0);
        row.scenario = name;
        row.check = "errors decrease monotonically";
        row.parameters = param + " sweep";
        rep.rows.push_back(row);
    }
}

void study_cauchy(const RunContext& ctx, const std::string& name, const std::vector<double>& values, Report& rep) {
    const auto U = product_region({pure_cone(Sector(-q, q), 0.0)});
    const Complex expect = 2.0 * kPi * kI / 9.0;
    std::vector<StudyPoint> pts;
    for (double n : values) {
        ContourQuadrature cq = boundary_quadrature(U, {0.5}, 16.0, n);
        auto g = [](std::span<const Complex> z, std::span<const std::size_t>) {
            return Matrix::Constant(1, 1, 1.0 / ((z[0] + 2.0) * (z[0] + 2.0) * (1.0 - z[0])));
        };
        const Matrix v = quadrature_sum(g, cq.axes(), ctx.threads);
        pts.push_back({n, flatten(v), {expect}});
    }
    study_rows(name, "cauchy reproduction 2 pi i f(1) at fixed node density", "n_per_unit", pts, ctx.tol(1e-8), rep, true);
    ReportRow& last = rep.rows[rep.rows.size() - 2];
    last.passed = last.abs_error <= last.tolerance;
}

void study_eps(const RunContext& ctx, const std::string& name, const std::vector<double>& values, Report& rep) {
    std::mt19937_64 rng(ctx.seed + 8);
    auto T = random_commuting(rng, 3, 1);
    const Point lam{1.0};
    const ProductSector ps{Sector(-q, q)};
    Functional phi = dirac(ps, Point{Complex(0.8, 0.2)}, Complex(0.5, 0.1));
    phi.atoms.push_back(Atom{{Complex(1.3, -0.4)}, Complex(-0.2, 0.3)});
    const Matrix ref = pair_semigroup(T, lam, phi, SemigroupRoute::Measure).value;
    const AdmissibleRegion U = cone_region_for(T, lam);
    std::vector<StudyPoint> pts;
    std::vector<Matrix> samples;
    for (double e : values) {
        auto F = holo([&phi, e](const Point& z) { return fb_transform(phi, Point{z[0] + e}); }, FunctionClass::Hinf, U);
        const auto r = functional_calculus_hinf(F, T, lam, U, calc_opts(ctx));
        pts.push_back({e, flatten(r.value), flatten(ref), r.error_estimate});
        samples.push_back(r.value);
    }
    study_rows(name, "shifted transform vs semigroup pairing", "eps", pts, 0.0, rep, true);
    const LimitResult lim = extrapolate_to_zero(samples, values);
    ReportRow row = row_of(flatten(lim.value), flatten(ref), CheckKind::Relative, ctx.tol(1e-6), lim.error_estimate);
    row.scenario = name;
    row.check = "extrapolated eps -> 0 limit vs semigroup pairing";
    row.parameters = "eps sweep (Neville)";
    rep.rows.push_back(row);
}

void suite_cauchy_study(const RunContext& ctx, const std::string& name, Report& rep) {
    study_cauchy(ctx, name, find_suite("cauchy-reproduction")->default_sweep, rep);
}

void suite_eps_study(const RunContext& ctx, const std::string& name, Report& rep) {
    study_eps(ctx, name, find_suite("eps-limit")->default_sweep, rep);
}

const std::vector<std::string>& acceptance_suites() {
    static const std::vector<std::string> s{"resolvent", "generator", "duality", "convolution", "wn",    "calculus",
                                            "special",   "spectral",  "hardy",   "gaps",        "outer"};
    return s;
}

void suite_acceptance(const RunContext& ctx, const std::string&, Report& rep) {
    for (const std::string& s : acceptance_suites()) {
        Report r = run_builtin(s, ctx);
        rep.rows.insert(rep.rows.end(), r.rows.begin(), r.rows.end());
    }
}

void suite_determinism(const RunContext& ctx, const std::string& name, Report& rep) {
    rep.rows.push_back(guarded(name, "repeated acceptance runs are byte-identical", "format=csv,json", [&] {
        const Report a = run_builtin("acceptance", ctx);
        const Report b = run_builtin("acceptance", ctx);
        const bool same = a.to_csv() == b.to_csv() && a.to_json() == b.to_json();
        return scalar_row(same ? 1.0 : 0.0, 1.0, CheckKind::Absolute, 0.0);
    }));
}

const std::map<std::string, SuiteFn>& suite_table() {
    static const std::map<std::string, SuiteFn> t{
        {"resolvent", suite_resolvent},
        {"generator", suite_generator},
        {"duality", suite_duality},
        {"convolution", suite_convolution},
        {"wn", suite_wn},
        {"calculus-k1", suite_calculus_k1},
        {"calculus-k2", suite_calculus_k2},
        {"contour-independence", suite_independence},
        {"calculus", suite_calculus},
        {"special", suite_special},
        {"spectral", suite_spectral},
        {"hardy", suite_hardy},
        {"gaps", suite_gaps},
        {"outer", suite_outer},
        {"cauchy-reproduction", suite_cauchy_study},
        {"eps-limit", suite_eps_study},
        {"acceptance", suite_acceptance},
        {"determinism", suite_determinism},
    };
    return t;
}

// ---------------------------------------------------------------------------------------------
// user-defined calculus scenarios

Complex parse_complex(const json& j, const std::string& what) {
    if (j.is_number()) return Complex(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return Complex(j[0].get<double>(), j[1].get<double>());
    throw ScenarioError(what + ": expected a number or an [re, im] pair");
}

Point parse_point(const json& j, const std::string& what) {
    if (!j.is_array()) throw ScenarioError(what + ": expected an array");
    Point p;
    for (const auto& e : j) p.push_back(parse_complex(e, what));
    return p;
}

Matrix parse_matrix(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) throw ScenarioError(what + ": expected an array of rows");
    const Eigen::Index n = static_cast<Eigen::Index>(j.size());
    Matrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != n)
            throw ScenarioError(what + ": matrix must be square");
        for (Eigen::Index c = 0; c < n; ++c) m(r, c) = parse_complex(j[r][c], what);
    }
    return m;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        std::ostringstream msg;
        msg << path << ": parse error at byte " << e.byte << ": " << e.what();
        throw ScenarioError(msg.str());
    }
}

CommutingTuple parse_tuple(const json& spec, const std::string& base_dir) {
    json j = spec;
    if (spec.is_string()) {
        std::filesystem::path p(spec.get<std::string>());
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        j = read_json_file(p.string());
    }
    if (!j.is_object() || !j.contains("matrices")) throw ScenarioError("tuple: expected an object with 'matrices'");
    std::vector<Matrix> A;
    for (const auto& m : j["matrices"]) A.push_back(parse_matrix(m, "tuple matrix"));
    std::vector<Sector> dom;
    if (j.contains("domains")) {
        for (const auto& d : j["domains"]) dom.emplace_back(d.at(0).get<double>(), d.at(1).get<double>());
    } else {
        dom.assign(A.size(), Sector(-q, q));
    }
    try {
        return CommutingTuple::make(A, dom);
    } catch (const DomainError& e) {
        throw ScenarioError(std::string("tuple: ") + e.what());
    }
}

AxisRegion parse_axis(const json& j) {
    const std::string kind = j.value("kind", "cone");
    const double alpha = j.value("alpha", -q), beta = j.value("beta", q);
    const Complex v = j.contains("vertex") ? parse_complex(j["vertex"], "region vertex") : Complex(0.0);
    if (kind == "cone") return pure_cone(Sector(alpha, beta), v);
    if (kind == "cone_minus_disk") return cone_minus_disk(Sector(alpha, beta), v, j.at("r0").get<double>(), j.at("r1").get<double>());
    if (kind == "cone_minus_rectangle")
        return cone_minus_rectangle(Sector(alpha, beta), v, j.at("s0").get<double>(), j.at("s1").get<double>());
    if (kind == "half_plane") return half_plane(alpha, v);
    throw ScenarioError("region: unknown kind '" + kind + "'");
}

Evaluator parse_function(const json& j, std::size_t k) {
    const std::string kind = j.value("kind", "inverse_square");
    if (kind == "inverse_square") {
        std::vector<double> s = j.contains("shifts") ? j["shifts"].get<std::vector<double>>() : std::vector<double>(k, 1.0);
        if (s.size() != k) throw ScenarioError("function: one shift per axis is required");
        return inverse_square(s);
    }
    if (kind == "exp") {
        const std::size_t axis = j.value("axis", 0u);
        const double nu = j.value("nu", 1.0);
        if (axis >= k) throw ScenarioError("function: axis out of range");
        return [axis, nu](const Point& z) { return std::exp(-nu * z[axis]); };
    }
    if (kind == "constant") {
        const Complex c = j.contains("value") ? parse_complex(j["value"], "constant") : Complex(1.0);
        return [c](const Point&) { return c; };
    }
    throw ScenarioError("function: unknown kind '" + kind + "'");
}

struct CustomCalculus {
    CommutingTuple T;
    Point lambda;
    AdmissibleRegion U;
    Point eps;
    HoloFunction F;
};

CustomCalculus parse_custom(const Scenario& sc) {
    const json& in = sc.inputs;
    CustomCalculus c;
    try {
        c.T = parse_tuple(in.at("tuple"), sc.base_dir);
        const std::size_t k = c.T.k();
        c.lambda = in.contains("lambda") ? parse_point(in["lambda"], "lambda") : Point(k, 1.0);
        if (c.lambda.size() != k) throw ScenarioError("lambda: one entry per matrix is required");
        std::vector<AxisRegion> axes;
        if (in.contains("region")) {
            for (const auto& a : in["region"]) axes.push_back(parse_axis(a));
            c.U = product_region(axes);
        } else {
            c.U = cone_region_for(c.T, c.lambda);
        }
        if (c.U.k() != k) throw ScenarioError("region: one axis per matrix is required");
        c.eps = in.contains("eps") ? parse_point(in["eps"], "eps") : Point(k, 0.0);
        const std::string cls = in.value("class", "H1");
        const json fj = in.contains("function") ? in["function"] : json::object();
        c.F = holo(parse_function(fj, k), cls == "Hinf" ? FunctionClass::Hinf : FunctionClass::H1, c.U);
        if (cls != "H1" && cls != "Hinf") throw ScenarioError("class: expected H1 or Hinf");
    } catch (const json::exception& e) {
        throw ScenarioError(sc.name + ": " + e.what());
    }
    return c;
}

Report run_custom(const Scenario& sc, const RunContext& ctx) {
    const CustomCalculus c = parse_custom(sc);
    Report rep;
    const double tol = ctx.tol(sc.tol.value_or(1e-6));
    std::optional<Matrix> oracle;
    if (sc.inputs.contains("oracle")) oracle = parse_matrix(sc.inputs["oracle"], "oracle");
    rep.rows.push_back(guarded(sc.name, "contour calculus vs oracle", "user scenario", [&] {
        CalculusOptions o = calc_opts(ctx);
        const CalculusResult r = c.F.cls == FunctionClass::H1 ? functional_calculus(c.F, c.T, c.lambda, c.U, c.eps, o)
                                                               : functional_calculus_hinf(c.F, c.T, c.lambda, c.U, o);
        const Matrix ref = oracle ? *oracle : spectral_oracle(c.F.f, c.T, c.lambda);
        return row_of(flatten(r.value), flatten(ref), CheckKind::Relative, tol, r.error_estimate);
    }));
    return rep;
}

Report study_custom(const Scenario& sc, const RunContext& ctx) {
    const CustomCalculus c = parse_custom(sc);
    const Sweep& sw = *sc.sweep;
    if (sw.param != "n_per_unit" && sw.param != "radius")
        throw ScenarioError(sc.name + ": calculus sweeps support 'n_per_unit' or 'radius'");
    if (c.F.cls != FunctionClass::H1) throw ScenarioError(sc.name + ": sweeps need an H1 function");
    const Matrix ref = sc.inputs.contains("oracle") ? parse_matrix(sc.inputs["oracle"], "oracle")
                                                    : spectral_oracle(c.F.f, c.T, c.lambda);
    std::vector<StudyPoint> pts;
    for (double v : sw.values) {
        CalculusOptions o = calc_opts(ctx);
        o.fixed_rule = true;
        (sw.param == "n_per_unit" ? o.n_per_unit : o.radius_margin) = v;
        const Matrix m = functional_calculus(c.F, c.T, c.lambda, c.U, c.eps, o).value;
        pts.push_back({v, flatten(m), flatten(ref)});
    }
    Report rep;
    study_rows(sc.name, "fixed-rule contour calculus vs oracle", sw.param, pts, 0.0, rep, false);
    return rep;
}

}  // namespace

const std::vector<SuiteInfo>& builtin_suites() {
    static const std::vector<SuiteInfo> s{
        {"resolvent", "Laplace-integral resolvent vs direct solve on 20 random sectorial matrices", 1, "", {}},
        {"generator", "generator recovery from weighted integrals; nilpotent closed form", 2, "", {}},
        {"duality", "Cauchy transform: measure vs Fourier-Borel route at 20 points", 3, "", {}},
        {"convolution", "transform and pairing multiplicativity on 100 random pairs", 4, "", {}},
        {"wn", "W_n regularized pairing vs measure route", 5, "", {}},
        {"calculus-k1", "contour calculus, one variable, vs scalar/eigen oracle", 0, "", {}},
        {"calculus-k2", "contour calculus, two variables, vs separable/eigen oracle", 0, "", {}},
        {"contour-independence", "calculus over two admissible (U, eps) choices", 0, "", {}},
        {"calculus", "calculus-k1 + calculus-k2 + contour-independence", 6, "", {}},
        {"special", "exponential and projection special cases", 7, "", {}},
        {"spectral", "eigenvalue-wise spectral mapping", 8, "", {}},
        {"hardy", "boundary integrals, Cauchy reproduction, pointwise bound, H1 norm", 9, "", {}},
        {"gaps", "multiplication and quasinilpotent semigroup gaps", 10, "", {}},
        {"outer", "strongly outer witnesses and the disk diagnostic", 11, "", {}},
        {"determinism", "two acceptance runs produce identical reports", 12, "", {}},
        {"acceptance", "criteria 1-11", 0, "", {}},
        {"cauchy-reproduction", "convergence in node density of a Cauchy integral", 0, "n_per_unit",
         {0.25, 0.5, 1.0, 2.0, 4.0}},
        {"eps-limit", "shifted transforms approaching the semigroup pairing", 0, "eps", {0.4, 0.2, 0.1, 0.05, 0.025}},
    };
    return s;
}

const SuiteInfo* find_suite(const std::string& name) {
    for (const auto& s : builtin_suites())
        if (s.name == name) return &s;
    return nullptr;
}

Report run_builtin(const std::string& suite, const RunContext& ctx) {
    const auto& t = suite_table();
    auto it = t.find(suite);
    if (it == t.end()) throw ScenarioError("unknown suite '" + suite + "'");
    Report rep;
    it->second(ctx, suite, rep);
    return rep;
}

std::vector<Scenario> parse_scenarios(const std::string& text, const std::string& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        std::ostringstream msg;
        msg << "parse error at byte " << e.byte << ": " << e.what();
        throw ScenarioError(msg.str());
    }
    std::vector<json> items;
    if (doc.is_object() && doc.contains("scenarios")) {
        if (!doc["scenarios"].is_array()) throw ScenarioError("'scenarios' must be an array");
        for (const auto& s : doc["scenarios"]) items.push_back(s);
    } else if (doc.is_object()) {
        items.push_back(doc);
    } else {
        throw ScenarioError("scenario document must be an object");
    }
    if (items.empty()) throw ScenarioError("no scenarios given");
    std::vector<Scenario> out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const json& j = items[i];
        if (!j.is_object()) throw ScenarioError("scenario " + std::to_string(i) + ": expected an object");
        Scenario sc;
        sc.base_dir = base_dir;
        try {
            sc.suite = j.at("suite").get<std::string>();
            sc.name = j.value("name", sc.suite);
            if (j.contains("tol")) sc.tol = j["tol"].get<double>();
            sc.inputs = j;
            if (j.contains("sweep")) {
                Sweep sw;
                const json& s = j["sweep"];
                const SuiteInfo* info = find_suite(sc.suite);
                sw.param = s.value("param", info ? info->sweep_param : std::string());
                sw.values = s.at("values").get<std::vector<double>>();
                if (sw.values.empty()) throw ScenarioError(sc.name + ": empty sweep");
                sc.sweep = sw;
            }
        } catch (const json::exception& e) {
            throw ScenarioError("scenario " + std::to_string(i) + ": " + e.what());
        }
        if (sc.suite != "calculus-custom" && !find_suite(sc.suite))
            throw ScenarioError(sc.name + ": unknown suite '" + sc.suite + "'");
        if (sc.suite == "calculus-custom") (void)parse_custom(sc);  // validate inputs and referenced files early
        out.push_back(std::move(sc));
    }
    return out;
}

std::vector<Scenario> load_scenarios(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string dir = std::filesystem::path(path).parent_path().string();
    try {
        return parse_scenarios(ss.str(), dir.empty() ? "." : dir);
    } catch (const ScenarioError& e) {
        throw ScenarioError(path + ": " + e.what());
    }
}

std::vector<Scenario> resolve_scenarios(const std::string& arg) {
    if (find_suite(arg)) {
        Scenario sc;
        sc.name = arg;
        sc.suite = arg;
        return {sc};
    }
    if (std::filesystem::exists(arg)) return load_scenarios(arg);
    throw ScenarioError("'" + arg + "' is neither a built-in suite nor a readable scenario file");
}

Report run_scenario(const Scenario& sc, const RunContext& ctx) {
    RunContext c = ctx;
    if (sc.tol && c.tol_override <= 0.0) c.tol_override = *sc.tol;
    if (sc.suite == "calculus-custom") return sc.sweep ? study_custom(sc, c) : run_custom(sc, c);
    if (sc.sweep) return convergence_study(sc, c);
    Report rep = run_builtin(sc.suite, c);
    if (sc.name != sc.suite)
        for (auto& r : rep.rows) r.scenario = sc.name;
    return rep;
}

Report convergence_study(const Scenario& sc, const RunContext& ctx) {
    if (sc.suite == "calculus-custom") {
        if (!sc.sweep) throw ScenarioError(sc.name + ": no sweep given");
        return study_custom(sc, ctx);
    }
    const SuiteInfo* info = find_suite(sc.suite);
    if (!info || info->sweep_param.empty()) throw ScenarioError(sc.name + ": suite '" + sc.suite + "' cannot be swept");
    const std::vector<double> values = sc.sweep ? sc.sweep->values : info->default_sweep;
    if (values.empty()) throw ScenarioError(sc.name + ": empty sweep");
    if (sc.sweep && sc.sweep->param != info->sweep_param)
        throw ScenarioError(sc.name + ": suite '" + sc.suite + "' sweeps '" + info->sweep_param + "'");
    Report rep;
    if (sc.suite == "cauchy-reproduction") study_cauchy(ctx, sc.name, values, rep);
    if (sc.suite == "eps-limit") study_eps(ctx, sc.name, values, rep);
    return rep;
}

}  // namespace sectorcalc
