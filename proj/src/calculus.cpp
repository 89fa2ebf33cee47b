#include "sectorcalc/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace sectorcalc {

namespace {

// The AxisRegion boundary runs clockwise around U_j; each axis is turned to the counterclockwise sense.
double orientation(std::size_t k) { return k % 2 == 0 ? 1.0 : -1.0; }

Matrix mul_or_first(const Matrix& acc, const Matrix& m) { return acc.size() == 0 ? m : Matrix(acc * m); }

double region_radius(const AdmissibleRegion& U, const Point& eps) {
    double r = 0.0;
    for (std::size_t j = 0; j < U.k(); ++j)
        r = std::max(r, std::abs(U.axes[j].vertex + eps[j]) + U.axes[j].excision_extent());
    return r;
}

void require_same_sectors(const AdmissibleRegion& U, const ProductSector& ab) {
    if (U.k() != ab.size()) throw DomainError("region and sector dimensions differ");
    for (std::size_t j = 0; j < ab.size(); ++j)
        if (!(U.axes[j].sector == ab[j])) throw DomainError("region sectors differ from the declared (alpha, beta)");
}

/// A point strictly inside the (translated) dual cone of axis j, at distance `r` along a fraction of its aperture.
Complex interior_point(const AxisRegion& a, double frac, double r) {
    const Sector d = dual_sector(a.sector);
    const double lo = d.alpha, hi = d.beta;
    return a.vertex + r * cis(lo + (0.05 + 0.9 * frac) * (hi - lo));
}

}  // namespace

const char* to_string(FunctionClass c) {
    switch (c) {
        case FunctionClass::H1: return "H1";
        case FunctionClass::Hinf: return "Hinf";
        case FunctionClass::Smirnov: return "Smirnov";
    }
    return "?";
}

std::vector<Point> sample_region(const AdmissibleRegion& U, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Point> out;
    std::size_t attempts = 0;
    while (out.size() < count && attempts < 50 * count + 100) {
        ++attempts;
        Point z;
        for (const AxisRegion& a : U.axes) {
            const double r = a.excision_extent() + 0.02 + 20.0 * std::pow(u(rng), 2.0);
            z.push_back(interior_point(a, u(rng), r));
        }
        if (U.contains(z)) out.push_back(z);
    }
    return out;
}

void HoloFunction::validate(std::size_t samples, std::uint64_t seed) const {
    if (!f) throw DomainError("holomorphic function: no evaluator");
    if (cls == FunctionClass::Smirnov && (!witness || !witness_product))
        throw DomainError("Smirnov-class function needs a witness pair");
    if (cls == FunctionClass::H1 && decay && decay->p < 2.0)
        throw DomainError("H1 function: decay certificate must have p >= 2");
    double worst = 0.0;
    for (const Point& z : sample_region(region, samples, seed)) {
        const Complex v = f(z);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            std::ostringstream msg;
            msg << "holomorphic function: non-finite value at sample " << z[0];
            throw DomainError(msg.str());
        }
        if (cls == FunctionClass::Smirnov) worst = std::max(worst, std::abs(witness_product(z)));
    }
    if (cls == FunctionClass::Smirnov && !std::isfinite(worst))
        throw DomainError("Smirnov witness: F*G is not bounded on the sample");
}

AdmissibilityReport check_admissible_for(const AdmissibleRegion& U, const CommutingTuple& T, const Point& lambda,
                                         const ProductSector& ab) {
    AdmissibilityReport rep;
    std::ostringstream msg;
    try {
        require_same_sectors(U, ab);
        U.validate();
        rep.region_ok = true;
    } catch (const DomainError& e) {
        msg << "(a) " << e.what() << "; ";
    }
    if (U.k() != T.k() || lambda.size() != T.k()) {
        rep.message = "dimension mismatch between region, tuple and lambda";
        return rep;
    }
    try {
        rep.anchor_class = n_set_classify(T, lambda, U.sectors(), U.vertex());
        rep.anchor_ok = rep.anchor_class == NClass::InN0;
        if (!rep.anchor_ok) msg << "(b) vertex is " << to_string(rep.anchor_class) << ", not in N0; ";
    } catch (const DomainError& e) {
        msg << "(b) " << e.what() << "; ";
    }
    rep.spectrum_ok = true;
    for (std::size_t j = 0; j < T.k(); ++j) {
        double margin = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < T.eigenvalues[j].size(); ++i) {
            const Complex p = -lambda[j] * T.eigenvalues[j](i);
            const double d = U.axes[j].dist_to_boundary(p);
            margin = std::min(margin, U.axes[j].contains(p) ? d : -d);
        }
        rep.margins.push_back(margin);
        if (!(margin > 0.0)) {
            rep.spectrum_ok = false;
            msg << "(c) -lambda sigma(A_" << j << ") is not inside U_" << j << "; ";
        }
    }
    rep.message = rep.ok() ? "admissible" : msg.str();
    return rep;
}

namespace {

void require_admissible(const AdmissibleRegion& U, const CommutingTuple& T, const Point& lambda) {
    const AdmissibilityReport rep = check_admissible_for(U, T, lambda, U.sectors());
    if (!rep.ok()) throw DomainError("region not admissible: " + rep.message);
}

CalculusResult contour_calculus(const Evaluator& F, const CommutingTuple& T, const Point& lambda,
                                const AdmissibleRegion& U, const Point& eps, const CalculusOptions& opt) {
    const std::size_t k = T.k();
    const Eigen::Index d = T.dim();
    const double r0 = region_radius(U, eps);
    ContourQuadrature cq = boundary_quadrature(U, eps, r0 + opt.radius_margin, opt.n_per_unit);
    std::vector<std::vector<Matrix>> res(k);
    auto prepare = [&](const std::vector<AxisNodes>& axes) {
        for (std::size_t j = 0; j < k; ++j) {
            res[j].resize(axes[j].size());
            for (std::size_t i = 0; i < axes[j].size(); ++i)
                res[j][i] = resolvent_factor(T, j, lambda[j], axes[j].points[i]);
        }
    };
    const Complex norm = orientation(k) * std::pow(2.0 * kPi * kI, -static_cast<int>(k));
    auto integrand = [&](std::span<const Complex> z, std::span<const std::size_t> idx) -> Matrix {
        const Complex fv = F(Point(z.begin(), z.end()));
        if (fv == Complex(0.0)) return Matrix::Zero(d, d);
        Matrix m;
        for (std::size_t j = 0; j < k; ++j) m = mul_or_first(m, res[j][idx[j]]);
        return (norm * fv) * m;
    };
    IntegrationConfig cfg;
    cfg.tol = opt.tol;
    cfg.relative = true;
    cfg.scale_floor = 1.0;
    cfg.threads = opt.threads;
    cfg.max_rounds = 8;
    CalculusResult out;
    if (opt.fixed_rule) {
        const auto axes = cq.axes();
        prepare(axes);
        out.value = quadrature_sum(integrand, axes, opt.threads);
        out.rounds = 1;
        out.nodes = 1;
        for (const auto& a : axes) out.nodes *= a.size();
        return out;
    }
    IntegrationResult r = integrate(integrand, cq, cfg, prepare);
    out.value = r.value;
    out.error_estimate = r.error_estimate;
    out.rounds = r.rounds;
    out.nodes = r.nodes;
    return out;
}

Matrix checked_inverse(const Matrix& M, double max_condition, const char* what) {
    Eigen::JacobiSVD<Matrix> svd(M);
    const auto& sv = svd.singularValues();
    const double smax = sv(0), smin = sv(sv.size() - 1);
    if (!(smin > 0.0) || smax / smin > max_condition) {
        std::ostringstream msg;
        msg << what << ": image of the regularizer is numerically singular (condition "
            << (smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity()) << ")";
        throw SingularError(msg.str());
    }
    return M.partialPivLu().inverse();
}

}  // namespace

CalculusResult functional_calculus(const HoloFunction& F, const CommutingTuple& T, const Point& lambda,
                                   const AdmissibleRegion& U, const Point& eps, const CalculusOptions& opt) {
    if (U.k() != T.k() || lambda.size() != T.k() || eps.size() != T.k())
        throw DomainError("functional_calculus: dimension mismatch");
    if (!F.f) throw DomainError("functional_calculus: no evaluator");
    if (F.decay && F.decay->p < 2.0) throw DomainError("functional_calculus: decay certificate must have p >= 2");
    require_admissible(U, T, lambda);
    require_admissible(U.translated(eps), T, lambda);
    return contour_calculus(F.f, T, lambda, U, eps, opt);
}

Complex Regularizer::operator()(const Point& z) const {
    Complex r = 1.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
        const Complex q = z[j] * cis(theta[j]) + s[j];
        r /= q * q;
    }
    return r;
}

Matrix Regularizer::at_tuple(const CommutingTuple& T, const Point& lambda) const {
    const Eigen::Index d = T.dim();
    Matrix m = Matrix::Identity(d, d);
    for (std::size_t j = 0; j < T.k(); ++j) {
        const Matrix q = (s[j] * Matrix::Identity(d, d) - lambda[j] * cis(theta[j]) * T.A[j]).inverse();
        m = m * q * q;
    }
    return m;
}

Regularizer make_regularizer(const CommutingTuple& T, const Point& lambda, const AdmissibleRegion& U) {
    Regularizer g;
    for (std::size_t j = 0; j < U.k(); ++j) {
        const double th = U.axes[j].sector.bisector();
        const double h = growth_abscissa(T, j, lambda[j], th);
        const double v = -std::real(U.axes[j].vertex * cis(th));
        g.theta.push_back(th);
        g.s.push_back(1.0 + std::max(h, v));
    }
    return g;
}

CalculusResult functional_calculus_hinf(const HoloFunction& F, const CommutingTuple& T, const Point& lambda,
                                        const AdmissibleRegion& U, const CalculusOptions& opt) {
    if (!F.f) throw DomainError("functional_calculus_hinf: no evaluator");
    if (U.k() != T.k() || lambda.size() != T.k()) throw DomainError("functional_calculus_hinf: dimension mismatch");
    require_admissible(U, T, lambda);
    const Regularizer G = make_regularizer(T, lambda, U);
    const Point zero(T.k(), 0.0);
    const Evaluator f = F.f;
    CalculusResult fg = contour_calculus([&](const Point& z) { return f(z) * G(z); }, T, lambda, U, zero, opt);
    CalculusResult g = contour_calculus([&](const Point& z) { return G(z); }, T, lambda, U, zero, opt);
    const Matrix ginv = checked_inverse(g.value, opt.max_condition, "functional_calculus_hinf");
    CalculusResult out;
    out.value = fg.value * ginv;
    out.error_estimate = (fg.error_estimate + out.value.norm() * g.error_estimate) * ginv.norm();
    out.rounds = std::max(fg.rounds, g.rounds);
    out.nodes = fg.nodes + g.nodes;
    return out;
}

CalculusResult functional_calculus_smirnov(const HoloFunction& F, const CommutingTuple& T, const Point& lambda,
                                           const AdmissibleRegion& U, const CalculusOptions& opt) {
    if (!F.witness || !F.witness_product) throw DomainError("functional_calculus_smirnov: witness pair missing");
    HoloFunction fw, w;
    fw.f = F.witness_product;
    fw.cls = FunctionClass::Hinf;
    fw.region = U;
    w.f = F.witness;
    w.cls = FunctionClass::Hinf;
    w.region = U;
    CalculusResult a = functional_calculus_hinf(fw, T, lambda, U, opt);
    CalculusResult b = functional_calculus_hinf(w, T, lambda, U, opt);
    const Matrix binv = checked_inverse(b.value, opt.max_condition, "functional_calculus_smirnov");
    CalculusResult out;
    out.value = a.value * binv;
    out.error_estimate = (a.error_estimate + out.value.norm() * b.error_estimate) * binv.norm();
    out.rounds = std::max(a.rounds, b.rounds);
    out.nodes = a.nodes + b.nodes;
    return out;
}

CalculusResult apply_calculus(const HoloFunction& F, const CommutingTuple& T, const Point& lambda,
                              const AdmissibleRegion& U, const CalculusOptions& opt) {
    switch (F.cls) {
        case FunctionClass::H1: return functional_calculus(F, T, lambda, U, Point(T.k(), 0.0), opt);
        case FunctionClass::Hinf: return functional_calculus_hinf(F, T, lambda, U, opt);
        case FunctionClass::Smirnov: return functional_calculus_smirnov(F, T, lambda, U, opt);
    }
    throw DomainError("apply_calculus: unknown class");
}

JointEigenbasis joint_eigenbasis(const CommutingTuple& T) {
    const Eigen::Index d = T.dim();
    // a generic combination separates joint eigenvalues that coincide for a single A_j
    Matrix B = Matrix::Zero(d, d);
    for (std::size_t j = 0; j < T.k(); ++j) B += Complex(1.0 + 0.37 * j, 0.11 * (j + 1)) * T.A[j];
    Eigen::ComplexEigenSolver<Matrix> es(B);
    JointEigenbasis out;
    out.V = es.eigenvectors();
    Eigen::JacobiSVD<Matrix> svd(out.V);
    const auto& sv = svd.singularValues();
    if (!(sv(d - 1) > 1e-10 * sv(0))) throw DomainError("joint eigenbasis: tuple is not diagonalizable");
    for (Eigen::Index i = 0; i < d; ++i) {
        const Vector v = out.V.col(i);
        Point mu(T.k());
        for (std::size_t j = 0; j < T.k(); ++j) {
            const Vector Av = T.A[j] * v;
            mu[j] = v.dot(Av) / v.squaredNorm();
            if ((Av - mu[j] * v).norm() > 1e-8 * (1.0 + T.A[j].norm()) * v.norm())
                throw DomainError("joint eigenbasis: the eigenvectors are not common to the tuple");
        }
        out.mu.push_back(mu);
    }
    return out;
}

Matrix spectral_oracle(const Evaluator& F, const CommutingTuple& T, const Point& lambda) {
    const JointEigenbasis jb = joint_eigenbasis(T);
    Vector diag(T.dim());
    for (Eigen::Index i = 0; i < T.dim(); ++i) {
        Point z(T.k());
        for (std::size_t j = 0; j < T.k(); ++j) z[j] = -lambda[j] * jb.mu[i][j];
        diag(i) = F(z);
    }
    return jb.V * diag.asDiagonal() * jb.V.inverse();
}

SpectralMapReport spectral_map_check(const HoloFunction& F, const CommutingTuple& T, const Point& lambda,
                                     const AdmissibleRegion& U, const CalculusOptions& opt) {
    SpectralMapReport rep;
    const JointEigenbasis jb = joint_eigenbasis(T);
    rep.oracle = spectral_oracle(F.f, T, lambda);
    rep.value = apply_calculus(F, T, lambda, U, opt).value;
    const Matrix Vinv = jb.V.inverse();
    const Matrix Dv = Vinv * rep.value * jb.V;
    for (Eigen::Index i = 0; i < T.dim(); ++i) {
        Point z(T.k());
        for (std::size_t j = 0; j < T.k(); ++j) z[j] = -lambda[j] * jb.mu[i][j];
        const Complex o = F.f(z);
        rep.eigen_value.push_back(Dv(i, i));
        rep.eigen_oracle.push_back(o);
        rep.max_rel_error = std::max(rep.max_rel_error, std::abs(Dv(i, i) - o) / std::max(std::abs(o), 1e-300));
    }
    return rep;
}

double boundary_resolvent_bound(const CommutingTuple& T, const Point& lambda, const AdmissibleRegion& U,
                                const CalculusOptions& opt) {
    ContourQuadrature cq = boundary_quadrature(U, Point(U.k(), 0.0), region_radius(U, Point(U.k(), 0.0)) + opt.radius_margin,
                                               opt.n_per_unit);
    const auto axes = cq.axes();
    double K = 1.0;
    for (std::size_t j = 0; j < U.k(); ++j) {
        double m = 0.0;
        for (Complex z : axes[j].points) m = std::max(m, opnorm(resolvent_factor(T, j, lambda[j], z)));
        // the resolvent product is bounded by the product of per-axis sup norms
        K *= m;
    }
    return K;
}

std::vector<Point> default_eps_grid(const AdmissibleRegion& U) {
    std::vector<Point> grid{Point(U.k(), 0.0)};
    for (int dir = 0; dir < 8; ++dir)
        for (int e = -3; e <= 2; ++e) {
            Point p;
            for (const AxisRegion& a : U.axes) {
                const Sector d = dual_sector(a.sector);
                p.push_back(std::ldexp(1.0, e) * cis(d.alpha + (d.beta - d.alpha) * dir / 7.0));
            }
            grid.push_back(p);
        }
    return grid;
}

H1Norm h1_norm(const Evaluator& F, const AdmissibleRegion& U, const std::vector<Point>& eps_grid, double tol) {
    H1Norm out;
    const std::size_t k = U.k();
    for (const Point& eps : eps_grid) {
        ContourQuadrature cq = boundary_quadrature(U, eps, region_radius(U, eps) + 16.0, 4.0);
        double prev = -1.0, val = 0.0;
        for (int round = 0; round < 9; ++round) {
            const auto axes = cq.axes();
            // sum of |F| |d zeta| over the tensor grid, in a fixed order
            std::vector<std::size_t> idx(k, 0);
            double s = 0.0, c = 0.0;
            while (true) {
                Point z(k);
                double w = 1.0;
                for (std::size_t j = 0; j < k; ++j) {
                    z[j] = axes[j].points[idx[j]];
                    w *= std::abs(axes[j].weights[idx[j]]);
                }
                const double term = std::abs(F(z)) * w - c;
                const double t = s + term;
                c = (t - s) - term;
                s = t;
                std::size_t j = 0;
                while (j < k && ++idx[j] == axes[j].size()) idx[j++] = 0;
                if (j == k) break;
            }
            val = s;
            if (round > 0 && std::abs(val - prev) <= tol * std::max(1.0, val)) break;
            prev = val;
            cq = cq.refined();
        }
        if (val > out.value) {
            out.value = val;
            out.argmax = eps;
        }
    }
    return out;
}

PointwiseBound pointwise_bound_check(const Evaluator& F, const AdmissibleRegion& U, const std::vector<Point>& samples,
                                     double norm) {
    PointwiseBound out;
    if (!(norm > 0.0)) throw DomainError("pointwise_bound_check: norm must be positive");
    const double scale = norm * std::pow(2.0 * kPi, -static_cast<double>(U.k()));
    for (const Point& z : samples) {
        if (!U.contains(z)) throw DomainError("pointwise_bound_check: sample outside the region");
        double dist = 1.0;
        for (std::size_t j = 0; j < U.k(); ++j) dist *= U.axes[j].dist_to_boundary(z[j]);
        const double r = std::abs(F(z)) * dist / scale;
        out.ratios.push_back(r);
        out.worst_ratio = std::max(out.worst_ratio, r);
    }
    return out;
}

OuterReport strongly_outer_check(const Evaluator& F, const WitnessSequence& witness, const std::vector<Point>& grid,
                                 const std::vector<Point>& boundary_grid, double final_tol) {
    OuterReport rep;
    if (witness.members.empty()) throw DomainError("strongly_outer_check: empty witness sequence");
    rep.dominated = true;
    rep.ratio_converges = true;
    for (const Point& z : grid) {
        const Complex fz = F(z);
        double prev = std::numeric_limits<double>::infinity();
        double last = 0.0;
        for (const Evaluator& Fn : witness.members) {
            const Complex gz = Fn(z);
            const double excess = std::abs(fz) - std::abs(gz);
            rep.worst_domination = std::max(rep.worst_domination, excess);
            if (excess > 1e-12 * (1.0 + std::abs(gz))) rep.dominated = false;
            const double dev = gz == Complex(0.0) ? std::numeric_limits<double>::infinity() : std::abs(fz / gz - 1.0);
            if (dev > prev * (1.0 + 1e-9) + 1e-14) rep.ratio_converges = false;
            prev = dev;
            last = dev;
        }
        rep.worst_final_ratio = std::max(rep.worst_final_ratio, last);
    }
    if (rep.worst_final_ratio > final_tol) rep.ratio_converges = false;
    rep.min_witness_modulus = std::numeric_limits<double>::infinity();
    for (const Point& z : boundary_grid)
        for (const Evaluator& Fn : witness.members) rep.min_witness_modulus = std::min(rep.min_witness_modulus, std::abs(Fn(z)));
    if (boundary_grid.empty()) rep.min_witness_modulus = 0.0;
    std::ostringstream v;
    if (rep.passed())
        v << "consistent with strong outerness on the grid";
    else
        v << "not consistent on the grid:" << (rep.dominated ? "" : " domination fails;")
          << (rep.ratio_converges ? "" : " ratio does not converge to 1;")
          << (rep.min_witness_modulus > 0.0 ? "" : " witness vanishes near the boundary;");
    rep.verdict = v.str();
    return rep;
}

DiskDiagnostic outer_diagnostic_disk(const std::function<Complex(Complex)>& f, const std::vector<double>& radii,
                                     int angles) {
    if (angles < 8) throw DomainError("outer_diagnostic_disk: need at least 8 angles");
    DiskDiagnostic out;
    auto circle_mean = [&](double r, bool interior) {
        double s = 0.0, winding = 0.0;
        Complex prev_value = f(r * cis(2.0 * kPi * (angles - 0.5) / angles));
        for (int i = 0; i < angles; ++i) {
            // midpoint nodes keep the sample off the positive real axis
            const Complex z = r * cis(2.0 * kPi * (i + 0.5) / angles);
            const Complex fz = f(z);
            const double m = std::abs(fz);
            if (!(m > 0.0)) {
                if (interior) {
                    std::ostringstream msg;
                    msg << "outer_diagnostic_disk: zero of f detected at " << z;
                    throw DomainError(msg.str());
                }
                return -std::numeric_limits<double>::infinity();
            }
            s += std::log(m);
            winding += std::arg(fz / prev_value);
            prev_value = fz;
        }
        if (interior && std::abs(winding) > kPi) {
            std::ostringstream msg;
            msg << "outer_diagnostic_disk: f has a zero inside the circle of radius " << r;
            throw DomainError(msg.str());
        }
        return s / angles;
    };
    for (double r : radii) {
        if (!(r >= 0.0 && r < 1.0)) throw DomainError("outer_diagnostic_disk: radii must lie in [0, 1)");
        out.radii.push_back(r);
        out.circle_means.push_back(circle_mean(r, true));
    }
    out.boundary_mean = circle_mean(1.0, false);
    out.gap = out.circle_means.empty() ? 0.0 : std::abs(out.circle_means.back() - out.boundary_mean);
    return out;
}

}  // namespace sectorcalc
