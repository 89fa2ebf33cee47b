#include "sectorcalc/semigroups.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sectorcalc {

CommutingTuple CommutingTuple::make(std::vector<Matrix> A, std::vector<Sector> domains) {
    if (A.empty()) throw DomainError("commuting tuple needs at least one matrix");
    if (domains.size() != A.size()) throw DomainError("commuting tuple: one domain sector per matrix is required");
    const Eigen::Index d = A.front().rows();
    for (const auto& M : A)
        if (M.rows() != d || M.cols() != d) throw DomainError("commuting tuple: matrices must be square of a common size");
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t j = i + 1; j < A.size(); ++j) {
            const double c = opnorm(A[i] * A[j] - A[j] * A[i]);
            if (c > 1e-10 * opnorm(A[i]) * opnorm(A[j])) {
                std::ostringstream msg;
                msg << "matrices " << i << " and " << j << " do not commute (commutator norm " << c << ")";
                throw DomainError(msg.str());
            }
        }
    CommutingTuple T;
    T.A = std::move(A);
    T.domains = std::move(domains);
    for (const auto& M : T.A) {
        Eigen::ComplexEigenSolver<Matrix> es(M);
        T.eigenvalues.push_back(es.eigenvalues());
        T.eigenvectors.push_back(es.eigenvectors());
        Eigen::JacobiSVD<Matrix> svd(es.eigenvectors());
        const auto& sv = svd.singularValues();
        const double smin = sv(sv.size() - 1);
        T.eigvec_condition.push_back(smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity());
    }
    return T;
}

Matrix evaluate(const CommutingTuple& T, std::size_t j, Complex zeta) {
    if (j >= T.k()) throw DomainError("evaluate: axis out of range");
    if (zeta == Complex(0.0, 0.0)) return Matrix::Identity(T.dim(), T.dim());
    if (!contains(T.domains[j], zeta, true)) {
        std::ostringstream msg;
        msg << "evaluate: " << zeta << " lies outside the closed domain sector of axis " << j;
        throw DomainError(msg.str());
    }
    return expm(zeta * T.A[j]);
}

Matrix resolvent_factor(const CommutingTuple& T, std::size_t j, Complex lambda, Complex zeta) {
    const Vector& ev = T.eigenvalues[j];
    double dist = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        double d = lambda != Complex(0.0, 0.0) ? std::abs(ev(i) + zeta / lambda) : std::abs(zeta);
        dist = std::min(dist, d);
    }
    if (dist < 1e-10) {
        std::ostringstream msg;
        msg << "resolvent factor on axis " << j << " is singular: distance to the spectrum " << dist;
        throw SingularError(msg.str());
    }
    const Eigen::Index d = T.dim();
    Matrix M = lambda * T.A[j] + zeta * Matrix::Identity(d, d);
    return M.partialPivLu().inverse();
}

Matrix resolvent_product(const CommutingTuple& T, const Point& lambda, const Point& zeta) {
    if (lambda.size() != T.k() || zeta.size() != T.k()) throw DomainError("resolvent_product: dimension mismatch");
    Matrix R = resolvent_factor(T, 0, lambda[0], zeta[0]);
    for (std::size_t j = 1; j < T.k(); ++j) R = R * resolvent_factor(T, j, lambda[j], zeta[j]);
    return R;
}

double growth_abscissa(const CommutingTuple& T, std::size_t j, Complex lambda, double omega) {
    const Vector& ev = T.eigenvalues.at(j);
    double h = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < ev.size(); ++i) h = std::max(h, std::real(cis(omega) * lambda * ev(i)));
    return h;
}

namespace {

// Rough constant for the envelope K e^{-c t} of a decaying matrix-valued integrand.
double transient_constant(const Matrix& G, double rate) {
    double K = 1.0;
    for (double t : {0.5, 1.0, 2.0, 4.0, 8.0})
        K = std::max(K, opnorm(expm(t * G)) * std::exp(rate * t));
    return K;
}

}  // namespace

LaplaceResolvent resolvent_via_laplace(const CommutingTuple& T, std::size_t j, Complex lambda, Complex direction,
                                       double tol) {
    if (j >= T.k()) throw DomainError("resolvent_via_laplace: axis out of range");
    if (std::abs(direction) == 0.0) throw DomainError("resolvent_via_laplace: zero direction");
    const Complex dir = direction / std::abs(direction);
    if (!contains(T.domains[j], dir, true)) throw DomainError("resolvent_via_laplace: ray leaves the semigroup domain");
    const double h = growth_abscissa(T, j, 1.0, std::arg(dir));
    const double c = std::real(lambda * dir) - h;
    if (!(c > 0.0)) {
        std::ostringstream msg;
        msg << "resolvent_via_laplace: Re(lambda zeta) = " << std::real(lambda * dir)
            << " does not exceed the growth abscissa " << h << "; the Laplace integral diverges";
        throw DomainError(msg.str());
    }
    const Eigen::Index d = T.dim();
    const Matrix& A = T.A[j];
    const Matrix G = dir * (A - lambda * Matrix::Identity(d, d));
    DecayEnvelope env;
    env.rate = c;
    env.constant = transient_constant(G, c);

    IntegrationConfig cfg;
    cfg.tol = tol * 0.1;
    cfg.relative = true;
    cfg.max_rounds = 10;
    const Matrix shifted = A - lambda * Matrix::Identity(d, d);
    auto f = [&](Complex s) -> Matrix { return expm(s * shifted); };
    IntegrationResult r = ray_integral(f, 0.0, dir, cfg, env);

    LaplaceResolvent out;
    out.value = r.value;
    out.error_estimate = r.error_estimate;
    out.direct = (lambda * Matrix::Identity(d, d) - A).partialPivLu().inverse();
    out.rel_error = opnorm(out.value - out.direct) / opnorm(out.direct);
    out.norm = opnorm(out.direct);

    auto g = [&](Complex s) -> Complex {
        return opnorm(expm(s * (dir * A - std::real(lambda * dir) * Matrix::Identity(d, d))));
    };
    IntegrationConfig bcfg = cfg;
    out.norm_bound = std::real(ray_integral_scalar(g, 0.0, 1.0, bcfg, env));
    out.bound_holds = out.norm <= out.norm_bound * (1.0 + 1e-8);
    return out;
}

WeightedGenerator generator_from_weighted_integrals(const CommutingTuple& T, std::size_t j, double lambda, double tol) {
    if (j >= T.k()) throw DomainError("generator_from_weighted_integrals: axis out of range");
    if (!contains(T.domains[j], 1.0, true))
        throw DomainError("generator_from_weighted_integrals: the positive axis is outside the semigroup domain");
    const double h = growth_abscissa(T, j, 1.0, 0.0);
    if (!(lambda > h)) {
        std::ostringstream msg;
        msg << "generator_from_weighted_integrals: lambda = " << lambda << " must exceed the spectral abscissa " << h;
        throw DomainError(msg.str());
    }
    const Eigen::Index d = T.dim();
    const Matrix& A = T.A[j];
    DecayEnvelope env;
    env.rate = 0.5 * (lambda - h);
    env.constant = transient_constant(A - lambda * Matrix::Identity(d, d), env.rate) / env.rate;

    IntegrationConfig cfg;
    cfg.tol = tol * 0.1;
    cfg.relative = true;
    cfg.max_rounds = 10;
    const Matrix shifted = A - lambda * Matrix::Identity(d, d);
    auto fb = [&](Complex s) -> Matrix { return s * expm(s * shifted); };
    auto fc = [&](Complex s) -> Matrix { return (1.0 - lambda * s) * expm(s * shifted); };
    WeightedGenerator out;
    out.B = ray_integral(fb, 0.0, 1.0, cfg, env).value;
    IntegrationConfig ccfg = cfg;
    ccfg.relative = false;
    ccfg.tol = tol * 0.1 * std::max(1.0, out.B.norm());
    out.C = ray_integral(fc, 0.0, 1.0, ccfg, env).value;
    Eigen::JacobiSVD<Matrix> svd(out.B);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 1e-12 * sv(0)) throw SingularError("generator_from_weighted_integrals: B is numerically singular");
    out.generator = -(out.B.transpose().partialPivLu().solve(out.C.transpose())).transpose();
    return out;
}

std::vector<double> default_difference_steps() {
    std::vector<double> t;
    for (int m = 3; m <= 12; ++m) t.push_back(std::ldexp(1.0, -m));
    return t;
}

DifferenceQuotient generator_from_difference_quotient(const CommutingTuple& T, std::size_t j, const Vector& u,
                                                      const std::vector<double>& steps) {
    if (j >= T.k()) throw DomainError("generator_from_difference_quotient: axis out of range");
    if (steps.empty()) throw DomainError("generator_from_difference_quotient: empty step sequence");
    for (std::size_t i = 0; i < steps.size(); ++i)
        if (!(steps[i] > 0.0) || (i > 0 && !(steps[i] < steps[i - 1])))
            throw DomainError("generator_from_difference_quotient: steps must be positive and decreasing");
    const std::size_t n = steps.size();
    std::vector<std::vector<Vector>> tab(n);
    for (std::size_t i = 0; i < n; ++i) {
        tab[i].push_back((evaluate(T, j, steps[i]) * u - u) / steps[i]);
        for (std::size_t p = 1; p <= i; ++p) {
            const double r = steps[i - p] / steps[i] - 1.0;
            tab[i].push_back(tab[i][p - 1] + (tab[i][p - 1] - tab[i - 1][p - 1]) / r);
        }
    }
    DifferenceQuotient best;
    best.value = tab[n - 1][0];
    best.residual = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t p = 0; p < i; ++p) {
            const double diff = (tab[i][p] - tab[i - 1][p]).norm();
            if (diff < best.residual) {
                best.residual = diff;
                best.value = tab[i][p];
            }
        }
    if (n == 1) best.residual = 0.0;
    return best;
}

Matrix generator_holomorphic(const CommutingTuple& T, std::size_t j, Complex zeta0) {
    if (j >= T.k()) throw DomainError("generator_holomorphic: axis out of range");
    const Sector& s = T.domains[j];
    if (!contains(s, zeta0, false)) throw DomainError("generator_holomorphic: zeta0 must lie inside the open domain sector");
    const double dist = std::min(distance_to_ray(zeta0, 0.0, cis(s.alpha)), distance_to_ray(zeta0, 0.0, cis(s.beta)));
    const Matrix& A = T.A[j];
    const double r = std::min(0.5 * dist, 1.0 / (1.0 + opnorm(A)));
    const int M = 64;
    const Eigen::Index d = T.dim();
    Matrix D = Matrix::Zero(d, d);
    for (int m = 0; m < M; ++m) {
        const Complex e = cis(2.0 * kPi * m / M);
        D += expm((zeta0 + r * e) * A) * (1.0 / e);
    }
    D /= (M * r);
    const Matrix E = expm(zeta0 * A);
    return E.transpose().partialPivLu().solve(D.transpose()).transpose();
}

const char* to_string(NClass c) {
    switch (c) {
        case NClass::InN0: return "in_N0";
        case NClass::InNOnly: return "in_N_only";
        case NClass::Outside: return "outside";
    }
    return "?";
}

void validate_lambda(const CommutingTuple& T, const Point& lambda, const ProductSector& ab) {
    if (lambda.size() != T.k() || ab.size() != T.k()) throw DomainError("lambda/sector dimension mismatch with the tuple");
    for (std::size_t j = 0; j < T.k(); ++j) {
        if (lambda[j] == Complex(0.0, 0.0)) continue;
        for (double w : {ab[j].alpha, ab[j].beta})
            if (!contains(T.domains[j], lambda[j] * cis(w), true)) {
                std::ostringstream msg;
                msg << "lambda_" << j << " = " << lambda[j] << " maps the edge angle " << w
                    << " outside the semigroup domain";
                throw DomainError(msg.str());
            }
    }
}

NClass n_set_classify(const CommutingTuple& T, const Point& lambda, const ProductSector& ab, const Point& z) {
    validate_lambda(T, lambda, ab);
    if (z.size() != T.k()) throw DomainError("n_set_classify: anchor dimension mismatch");
    bool boundary = false;
    const Eigen::Index d = T.dim();
    for (std::size_t j = 0; j < T.k(); ++j)
        for (double w : {ab[j].alpha, ab[j].beta}) {
            const double h = growth_abscissa(T, j, lambda[j], w);
            const double c = std::real(z[j] * cis(w)) + h;
            const double tol = 1e-12 * (1.0 + std::abs(z[j]) + std::abs(h));
            if (c > tol) return NClass::Outside;
            if (c >= -tol) {
                const Matrix G = z[j] * cis(w) * Matrix::Identity(d, d) + lambda[j] * cis(w) * T.A[j];
                const double g20 = opnorm(expm(20.0 * G)), g40 = opnorm(expm(40.0 * G));
                if (g40 > 1.5 * g20 + 1e-12) return NClass::Outside;
                boundary = true;
            }
        }
    return boundary ? NClass::InNOnly : NClass::InN0;
}

GapResult mult_semigroup_gap(double t, double s) {
    if (!(t > 0.0 && s > t)) throw DomainError("mult_semigroup_gap: need 0 < t < s");
    auto f = [&](double x) { return std::abs(std::pow(x, t) - std::pow(x, s)); };
    const int N = 10000;
    int best = 1;
    for (int i = 1; i <= N; ++i)
        if (f(static_cast<double>(i) / N) > f(static_cast<double>(best) / N)) best = i;
    double a = static_cast<double>(std::max(best - 1, 0)) / N;
    double b = static_cast<double>(std::min(best + 1, N)) / N;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), dd = a + g * (b - a);
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        if (f(c) > f(dd)) {
            b = dd;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        dd = a + g * (b - a);
    }
    GapResult r;
    r.argmax = 0.5 * (a + b);
    r.brute_force = std::max(f(r.argmax), f(static_cast<double>(best) / N));
    r.closed_form = std::exp(std::log(s - t) + (t * std::log(t) - s * std::log(s)) / (s - t));
    return r;
}

namespace {

Eigen::MatrixXd shift_matrix_real(int n, double t) {
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const double y = static_cast<double>(i + 1) / n - t;
        if (y <= 0.0) continue;
        const double p = y * n;
        int m0 = static_cast<int>(std::floor(p));
        double frac = p - m0;
        if (m0 >= n) {
            m0 = n;
            frac = 0.0;
        }
        // grid value at m/n lives in column m-1; the value at 0 is zero
        if (m0 >= 1) S(i, m0 - 1) += 1.0 - frac;
        if (frac > 0.0 && m0 + 1 <= n) S(i, m0) += frac;
    }
    return S;
}

}  // namespace

Matrix shift_matrix(int n, double t) { return shift_matrix_real(n, t).cast<Complex>(); }

double quasinilpotent_gap(int n, double t) {
    if (n < 64) throw DomainError("quasinilpotent_gap: grid must have at least 64 cells");
    if (!(t > 0.0)) throw DomainError("quasinilpotent_gap: t must be positive");
    const Eigen::MatrixXd D = shift_matrix_real(n, t) - shift_matrix_real(n, 2.0 * t);
    if (D.isZero(0.0)) return 0.0;
    return Eigen::BDCSVD<Eigen::MatrixXd>(D).singularValues()(0);
}

}  // namespace sectorcalc
