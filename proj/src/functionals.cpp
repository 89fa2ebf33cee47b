#include "sectorcalc/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sectorcalc/extrapolation.hpp"

namespace sectorcalc {

namespace {

constexpr double kAngleTol = 1e-12;

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

double binomial(int n, int r) { return factorial(n) / (factorial(r) * factorial(n - r)); }

Complex poly_eval(const std::vector<Complex>& p, Complex t) {
    Complex r = 0.0;
    for (std::size_t m = p.size(); m-- > 0;) r = r * t + p[m];
    return r;
}

/// int_0^inf p(t) e^{-w t} dt for Re(w) > 0.
Complex poly_laplace(const std::vector<Complex>& p, Complex w) {
    Complex r = 0.0;
    Complex wp = w;
    for (std::size_t m = 0; m < p.size(); ++m) {
        r += p[m] * factorial(static_cast<int>(m)) / wp;
        wp *= w;
    }
    return r;
}

Complex dot(const Point& a, const Point& b) {
    Complex r = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) r += a[j] * b[j];
    return r;
}

Matrix scalar_matrix(Complex c) {
    Matrix m(1, 1);
    m(0, 0) = c;
    return m;
}

/// Product treating 1x1 operands as scalars.
Matrix mul(const Matrix& a, const Matrix& b) {
    if (b.rows() == 1 && b.cols() == 1) return a * b(0, 0);
    if (a.rows() == 1 && a.cols() == 1) return a(0, 0) * b;
    return a * b;
}

void check_dim(const Point& p, std::size_t k, const char* what) {
    if (p.size() != k) {
        std::ostringstream msg;
        msg << what << ": expected " << k << " coordinates, got " << p.size();
        throw DomainError(msg.str());
    }
}

bool same_sectors(const ProductSector& a, const ProductSector& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t j = 0; j < a.size(); ++j)
        if (std::abs(a[j].alpha - b[j].alpha) > kAngleTol || std::abs(a[j].beta - b[j].beta) > kAngleTol) return false;
    return true;
}

Point dual_bisector_direction(const ProductSector& ps) {
    Point d(ps.size());
    for (std::size_t j = 0; j < ps.size(); ++j) d[j] = cis(dual_sector(ps[j]).bisector());
    return d;
}

struct AxisTerm {
    Complex s;
    std::vector<Complex> poly;
};

/// One-dimensional convolution of p1(t)e^{-s1 t} and p2(t)e^{-s2 t} on [0, inf).
std::vector<AxisTerm> convolve_axis(const std::vector<Complex>& p1, Complex s1, const std::vector<Complex>& p2,
                                    Complex s2) {
    const Complex delta = s1 - s2;
    if (std::abs(delta) < 0.2 * std::min(std::real(s1), std::real(s2))) {
        // Close rates: expand e^{-delta u} in powers of delta and use
        // int_0^t u^p (t-u)^n du = p! n! / (p+n+1)! t^{p+n+1}.  The closed form below cancels badly here.
        constexpr int kTerms = 40;
        std::vector<Complex> r(p1.size() + p2.size() + kTerms, 0.0);
        Complex dq = 1.0;
        for (int qd = 0; qd < kTerms; ++qd) {
            for (std::size_t m = 0; m < p1.size(); ++m)
                for (std::size_t n = 0; n < p2.size(); ++n) {
                    const int p = static_cast<int>(m) + qd;
                    const int nn = static_cast<int>(n);
                    r[p + nn + 1] += p1[m] * p2[n] * dq * (factorial(p) / factorial(qd)) *
                                     (factorial(nn) / factorial(p + nn + 1));
                }
            dq *= -delta;
            if (delta == Complex(0.0)) break;
        }
        while (r.size() > 1 && r.back() == Complex(0.0)) r.pop_back();
        return {AxisTerm{s2, r}};
    }
    // e^{-s2 t} int_0^t u^m (t-u)^n e^{-delta u} du, expanding (t-u)^n and using
    // int_0^t u^p e^{-delta u} du = p!/delta^{p+1} (1 - e^{-delta t} sum_{i<=p} (delta t)^i / i!)
    const std::size_t deg = p1.size() + p2.size();
    std::vector<Complex> slow(deg + 1, 0.0), fast(deg + 1, 0.0);
    for (std::size_t m = 0; m < p1.size(); ++m)
        for (std::size_t n = 0; n < p2.size(); ++n) {
            const Complex ab = p1[m] * p2[n];
            if (ab == Complex(0.0)) continue;
            for (std::size_t r = 0; r <= n; ++r) {
                const int p = static_cast<int>(m + r);
                const Complex c = ab * binomial(static_cast<int>(n), static_cast<int>(r)) * ((r % 2) ? -1.0 : 1.0) *
                                  factorial(p) / std::pow(delta, p + 1);
                slow[n - r] += c;
                Complex dpow = 1.0;
                for (int i = 0; i <= p; ++i) {
                    fast[n - r + i] -= c * dpow / factorial(i);
                    dpow *= delta;
                }
            }
        }
    return {AxisTerm{s2, slow}, AxisTerm{s1, fast}};
}

/// Rays from `start` along `dir`, one per axis, as a tensor quadrature.
ContourQuadrature tensor_rays(const Point& start, const Point& dir, double feature) {
    ContourQuadrature cq;
    double far = 0.0;
    for (std::size_t j = 0; j < start.size(); ++j) {
        PathPiece p;
        p.kind = PathPiece::Kind::Ray;
        p.a = start[j];
        p.dir = dir[j] / std::abs(dir[j]);
        p.grade_at_start = true;
        cq.specs.push_back(PathSpec{p});
        far = std::max(far, std::abs(start[j]));
    }
    cq.R = far + 16.0 + feature;
    cq.n_per_unit = 4.0;
    cq.options.feature_radius = far + feature;
    return cq;
}

IntegrationConfig make_cfg(double tol, int threads) {
    IntegrationConfig cfg;
    cfg.tol = tol;
    cfg.relative = true;
    cfg.scale_floor = 1.0;
    cfg.max_rounds = 9;
    cfg.threads = threads;
    return cfg;
}

/// Angle in [alpha, beta] maximizing Re(w e^{i omega}); returns the angle and the maximum.
std::pair<double, double> best_angle(const Sector& s, Complex w) {
    double best = s.alpha, val = std::real(w * cis(s.alpha));
    // Re(w e^{i omega}) = |w| cos(arg w + omega) peaks at omega = -arg w (mod 2 pi)
    const double target = -std::arg(w);
    for (int m = -2; m <= 2; ++m) {
        const double om = target + 2.0 * kPi * m;
        if (om > s.alpha && om < s.beta) {
            best = om;
            val = std::abs(w);
        }
    }
    const double vb = std::real(w * cis(s.beta));
    if (vb > val) {
        best = s.beta;
        val = vb;
    }
    return {best, val};
}

bool atoms_strictly_inside(const Functional& phi) {
    for (const Atom& a : phi.atoms)
        for (std::size_t j = 0; j < phi.k(); ++j)
            if (!contains(phi.sectors[j], a.eta[j], false)) return false;
    return true;
}

/// Hypothesis (ii) of the direct and shifted transform routes: |FB(phi)| integrable on the shifted
/// distinguished boundary of the dual cone.  Atoms decay only when strictly inside a proper sector;
/// densities need a vanishing constant coefficient so that their transform decays like |sigma|^{-2}.
void require_fb_integrable(const Functional& phi, const char* route) {
    if (!atoms_strictly_inside(phi)) {
        std::ostringstream msg;
        msg << route << ": atoms must lie in the open sector on every axis (transform not integrable on the contour)";
        throw DomainError(msg.str());
    }
    for (const RayDensity& d : phi.densities)
        for (const auto& p : d.poly)
            if (p.empty() || p[0] != Complex(0.0)) {
                std::ostringstream msg;
                msg << route << ": density polynomials must vanish at t = 0 (transform not integrable on the contour)";
                throw DomainError(msg.str());
            }
}

void require_proper_dual(const ProductSector& ps, const char* route) {
    for (const Sector& s : ps)
        if (dual_is_degenerate(s)) {
            std::ostringstream msg;
            msg << route << ": the dual cone of a half-plane sector is a ray and has no boundary contour";
            throw DomainError(msg.str());
        }
}

AdmissibleRegion anchored_dual_cone(const ProductSector& ps, const Point& z) {
    std::vector<AxisRegion> axes;
    for (std::size_t j = 0; j < ps.size(); ++j) axes.push_back(pure_cone(ps[j], z[j]));
    return product_region(std::move(axes));
}

/// Numeric transform of one factor: int_0^{e^{i omega} inf} e^{-w s} F(s) ds.
Matrix numeric_factor_fb(const std::function<Matrix(Complex)>& F, const Sector& s, Complex growth, Complex w, double tol) {
    auto [om, rate] = best_angle(s, w + growth);
    if (!(rate > 1e-12)) {
        std::ostringstream msg;
        msg << "fb_of_function: no ray of the sector gives a convergent transform at " << w;
        throw DomainError(msg.str());
    }
    IntegrationConfig cfg = make_cfg(tol, 1);
    cfg.scale_floor = 1e-300;
    DecayEnvelope env{1.0, rate, 0.0};
    const Complex dir = cis(om);
    return ray_integral([&](Complex sig) -> Matrix { return std::exp(-w * sig) * F(sig); }, 0.0, dir, cfg, env).value;
}

std::vector<std::function<Matrix(Complex)>> factor_values(const SectorFunction& f) {
    std::vector<std::function<Matrix(Complex)>> v;
    if (f.separable()) {
        for (const auto& a : f.factors) v.push_back(a.value);
    } else if (f.general) {
        auto g = f.general;
        v.push_back([g](Complex s) { return g(Point{s}); });
    }
    return v;
}

Matrix factor_fb(const SectorFunction& f, std::size_t j, const Sector& s, Complex growth, Complex w, double tol) {
    if (f.separable()) {
        if (f.factors[j].fb) return f.factors[j].fb(w);
        return numeric_factor_fb(f.factors[j].value, s, growth, w, tol);
    }
    auto g = f.general;
    return numeric_factor_fb([g](Complex x) { return g(Point{x}); }, s, growth, w, tol);
}

Matrix coefficient_of(const SectorFunction& f) {
    return f.separable() ? f.coefficient : Matrix::Identity(1, 1);
}

Complex fb_density_term(const RayDensity& d, const Point& z) {
    Complex v = std::exp(-dot(z, d.offset));
    for (std::size_t j = 0; j < z.size(); ++j) v *= poly_laplace(d.poly[j], d.s[j] + z[j] * cis(d.omega[j]));
    return v;
}

Complex fb_unchecked(const Functional& phi, const Point& z) {
    Complex v = 0.0;
    for (const Atom& a : phi.atoms) v += a.weight * std::exp(-dot(z, a.eta));
    for (const RayDensity& d : phi.densities) v += fb_density_term(d, z);
    return v;
}

}  // namespace

void Functional::validate() const {
    const std::size_t kk = k();
    if (kk == 0) throw DomainError("functional: no axes");
    for (const Atom& a : atoms) {
        check_dim(a.eta, kk, "functional atom");
        for (std::size_t j = 0; j < kk; ++j)
            if (!contains(sectors[j], a.eta[j], true)) {
                std::ostringstream msg;
                msg << "functional: atom coordinate " << a.eta[j] << " lies outside the closed sector on axis " << j;
                throw DomainError(msg.str());
            }
    }
    for (const RayDensity& d : densities) {
        check_dim(d.offset, kk, "functional density offset");
        check_dim(d.s, kk, "functional density rate");
        if (d.omega.size() != kk || d.poly.size() != kk) throw DomainError("functional density: dimension mismatch");
        for (std::size_t j = 0; j < kk; ++j) {
            if (!contains(sectors[j], d.offset[j], true))
                throw DomainError("functional density: offset outside the closed sector");
            if (d.omega[j] < sectors[j].alpha - kAngleTol || d.omega[j] > sectors[j].beta + kAngleTol)
                throw DomainError("functional density: ray direction outside [alpha, beta]");
            if (!(std::real(d.s[j]) > 0.0)) throw DomainError("functional density: rate must have positive real part");
            if (d.poly[j].empty()) throw DomainError("functional density: empty polynomial");
        }
    }
}

FBDomainInfo Functional::domain() const {
    FBDomainInfo info;
    for (const RayDensity& d : densities) {
        Point c(k());
        for (std::size_t j = 0; j < k(); ++j) c[j] = -0.5 * std::real(d.s[j]) * cis(-d.omega[j]);
        info.candidates.push_back(c);
    }
    if (!info.candidates.empty()) info.anchor = sup_points(info.candidates, sectors).point;
    return info;
}

bool Functional::in_domain(const Point& z) const {
    if (z.size() != k()) return false;
    for (const RayDensity& d : densities)
        for (std::size_t j = 0; j < k(); ++j)
            if (!(std::real(d.s[j] + z[j] * cis(d.omega[j])) > 0.0)) return false;
    return true;
}

Functional dirac(const ProductSector& sectors, const Point& eta, Complex weight) {
    Functional f;
    f.sectors = sectors;
    f.atoms.push_back(Atom{eta, weight});
    f.validate();
    return f;
}

Functional bisector_exponential(const ProductSector& sectors) {
    Functional f;
    f.sectors = sectors;
    RayDensity d;
    for (const Sector& s : sectors) {
        d.offset.push_back(0.0);
        d.omega.push_back(s.bisector());
        d.s.push_back(1.0);
        d.poly.push_back({1.0});
    }
    f.densities.push_back(d);
    return f;
}

Functional regularizer_measure(const ProductSector& sectors, double n) {
    if (!(n > 0.0)) throw DomainError("regularizer_measure: n must be positive");
    Functional f;
    f.sectors = sectors;
    RayDensity d;
    for (const Sector& s : sectors) {
        d.offset.push_back(0.0);
        d.omega.push_back(s.bisector());
        d.s.push_back(n);
        d.poly.push_back({0.0, n * n});
    }
    f.densities.push_back(d);
    return f;
}

Functional dilate(const Functional& phi, double c) {
    if (!(c > 0.0)) throw DomainError("dilate: factor must be positive");
    Functional r = phi;
    for (Atom& a : r.atoms)
        for (Complex& x : a.eta) x *= c;
    for (RayDensity& d : r.densities)
        for (std::size_t j = 0; j < r.k(); ++j) {
            d.offset[j] *= c;
            d.s[j] /= c;
            double cp = c;
            for (Complex& coef : d.poly[j]) {
                coef /= cp;
                cp *= c;
            }
        }
    return r;
}

Functional translate(const Functional& phi, const Point& eta) {
    check_dim(eta, phi.k(), "translate");
    for (std::size_t j = 0; j < phi.k(); ++j)
        if (!contains(phi.sectors[j], eta[j], true)) throw DomainError("translate: shift outside the closed sector");
    Functional r = phi;
    for (Atom& a : r.atoms)
        for (std::size_t j = 0; j < r.k(); ++j) a.eta[j] += eta[j];
    for (RayDensity& d : r.densities)
        for (std::size_t j = 0; j < r.k(); ++j) d.offset[j] += eta[j];
    return r;
}

Functional scaled(const Functional& phi, Complex c) {
    Functional r = phi;
    for (Atom& a : r.atoms) a.weight *= c;
    for (RayDensity& d : r.densities)
        for (Complex& coef : d.poly[0]) coef *= c;
    return r;
}

Functional sum(const Functional& a, const Functional& b) {
    if (!same_sectors(a.sectors, b.sectors)) throw DomainError("sum: functionals belong to different sector classes");
    Functional r = a;
    r.atoms.insert(r.atoms.end(), b.atoms.begin(), b.atoms.end());
    r.densities.insert(r.densities.end(), b.densities.begin(), b.densities.end());
    return r;
}

Complex fb_transform(const Functional& phi, const Point& z) {
    check_dim(z, phi.k(), "fb_transform");
    if (!phi.in_domain(z)) {
        std::ostringstream msg;
        msg << "fb_transform: point outside the domain of the transform";
        throw DomainError(msg.str());
    }
    return fb_unchecked(phi, z);
}

Complex w_n(const Point& zeta, double n, const ProductSector& sectors) {
    check_dim(zeta, sectors.size(), "w_n");
    Complex r = 1.0;
    for (std::size_t j = 0; j < zeta.size(); ++j) {
        const Complex q = n + zeta[j] * cis(sectors[j].bisector());
        r *= n * n / (q * q);
    }
    return r;
}

Functional convolve(const Functional& a, const Functional& b) {
    if (!same_sectors(a.sectors, b.sectors))
        throw DomainError("convolve: functionals belong to different sector classes");
    const std::size_t k = a.k();
    Functional r;
    r.sectors = a.sectors;
    for (const Atom& x : a.atoms)
        for (const Atom& y : b.atoms) {
            Atom c;
            c.weight = x.weight * y.weight;
            for (std::size_t j = 0; j < k; ++j) c.eta.push_back(x.eta[j] + y.eta[j]);
            r.atoms.push_back(c);
        }
    auto shift = [&](const Atom& x, const RayDensity& d) {
        RayDensity s = d;
        for (std::size_t j = 0; j < k; ++j) s.offset[j] += x.eta[j];
        for (Complex& c : s.poly[0]) c *= x.weight;
        r.densities.push_back(s);
    };
    for (const Atom& x : a.atoms)
        for (const RayDensity& d : b.densities) shift(x, d);
    for (const Atom& x : b.atoms)
        for (const RayDensity& d : a.densities) shift(x, d);
    for (const RayDensity& d1 : a.densities)
        for (const RayDensity& d2 : b.densities) {
            std::vector<std::vector<AxisTerm>> per_axis(k);
            for (std::size_t j = 0; j < k; ++j) {
                if (std::abs(d1.omega[j] - d2.omega[j]) > kAngleTol)
                    throw DomainError("convolve: densities on different ray directions are not representable");
                per_axis[j] = convolve_axis(d1.poly[j], d1.s[j], d2.poly[j], d2.s[j]);
            }
            std::vector<std::size_t> pick(k, 0);
            while (true) {
                RayDensity c;
                for (std::size_t j = 0; j < k; ++j) {
                    c.offset.push_back(d1.offset[j] + d2.offset[j]);
                    c.omega.push_back(d1.omega[j]);
                    c.s.push_back(per_axis[j][pick[j]].s);
                    c.poly.push_back(per_axis[j][pick[j]].poly);
                }
                r.densities.push_back(c);
                std::size_t j = 0;
                while (j < k && ++pick[j] == per_axis[j].size()) pick[j++] = 0;
                if (j == k) break;
            }
        }
    return r;
}

std::optional<Point> convolution_anchor(const Functional& a, const Functional& b) {
    auto da = a.domain().anchor, db = b.domain().anchor;
    if (!da) return db;
    if (!db) return da;
    return sup_points({*da, *db}, a.sectors).point;
}

double cauchy_window_angle(const Sector& s, Complex lambda) {
    if (contains(s, lambda, true)) throw DomainError("cauchy_transform: lambda lies in the closed sector");
    double eta = s.alpha + std::fmod(std::arg(lambda) - s.alpha, 2.0 * kPi);
    if (eta < s.alpha) eta += 2.0 * kPi;
    double lo, hi;
    if (eta > s.beta && eta <= s.alpha + kPi) {
        lo = 0.5 * kPi - eta;
        hi = 0.5 * kPi - s.beta;
    } else if (eta > s.alpha + kPi && eta <= s.beta + kPi) {
        lo = -0.5 * kPi - s.alpha;
        hi = 0.5 * kPi - s.beta;
    } else if (eta > s.beta + kPi && eta < s.alpha + 2.0 * kPi) {
        lo = -0.5 * kPi - s.alpha;
        hi = 1.5 * kPi - eta;
    } else {
        throw DomainError("cauchy_transform: empty angle window");
    }
    if (!(hi > lo) && !(hi == lo && eta <= s.alpha + kPi)) throw DomainError("cauchy_transform: empty angle window");
    return 0.5 * (lo + hi);
}

Complex cauchy_transform(const Functional& phi, const Point& z, const Point& lambda, CauchyRoute route, double tol) {
    phi.validate();
    const std::size_t k = phi.k();
    check_dim(z, k, "cauchy_transform anchor");
    check_dim(lambda, k, "cauchy_transform");
    if (!phi.in_domain(z)) throw DomainError("cauchy_transform: anchor outside the domain of the transform");
    for (std::size_t j = 0; j < k; ++j)
        if (contains(phi.sectors[j], lambda[j], true)) throw DomainError("cauchy_transform: lambda lies in the closed sector");
    const Complex norm = std::pow(2.0 * kPi * kI, -static_cast<int>(k));

    if (route == CauchyRoute::Measure) {
        Complex v = 0.0;
        for (const Atom& a : phi.atoms) {
            Complex t = a.weight * std::exp(-dot(z, a.eta));
            for (std::size_t j = 0; j < k; ++j) t /= (a.eta[j] - lambda[j]);
            v += t;
        }
        IntegrationConfig cfg = make_cfg(tol, 1);
        for (const RayDensity& d : phi.densities) {
            Complex t = std::exp(-dot(z, d.offset));
            for (std::size_t j = 0; j < k; ++j) {
                const Complex dir = cis(d.omega[j]);
                const Complex sp = d.s[j] + z[j] * dir;
                const auto& p = d.poly[j];
                const Complex o = d.offset[j], lam = lambda[j];
                DecayEnvelope env{1.0, std::real(sp), 0.0};
                t *= ray_integral_scalar(
                    [&](Complex tt) { return poly_eval(p, tt) * std::exp(-sp * tt) / (o + tt * dir - lam); }, 0.0, 1.0,
                    cfg, env, std::abs(lam - o) + 1.0);
            }
            v += t;
        }
        return norm * v;
    }

    Point dir(k), start(k, 0.0);
    double feature = 0.0;
    double rate = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
        dir[j] = cis(cauchy_window_angle(phi.sectors[j], lambda[j]));
        rate = std::min(rate, -std::real(lambda[j] * dir[j]));
        feature = std::max(feature, std::abs(z[j]));
    }
    ContourQuadrature cq = tensor_rays(start, dir, feature + 1.0 / std::max(rate, 1e-3));
    IntegrationConfig cfg = make_cfg(tol, 1);
    auto f = [&](std::span<const Complex> sig, std::span<const std::size_t>) {
        Point w(k);
        Complex e = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            w[j] = sig[j] + z[j];
            e += lambda[j] * sig[j];
        }
        return scalar_matrix(std::exp(e) * fb_unchecked(phi, w));
    };
    return norm * integrate(f, cq, cfg).value(0, 0);
}

std::size_t SectorFunction::k() const {
    if (separable()) return factors.size();
    return growth_anchor.size();
}

Matrix SectorFunction::value(const Point& zeta) const {
    if (!separable()) {
        if (!general) throw DomainError("sector function: no definition");
        return general(zeta);
    }
    check_dim(zeta, factors.size(), "sector function");
    Matrix v = coefficient;
    for (std::size_t j = 0; j < factors.size(); ++j) v = mul(v, factors[j].value(zeta[j]));
    return v;
}

bool SectorFunction::closed_form_fb() const {
    if (!separable()) return false;
    for (const auto& a : factors)
        if (!a.fb) return false;
    return true;
}

SectorFunction SectorFunction::exp_poly(const Point& w, const std::vector<std::vector<Complex>>& poly,
                                        const Matrix& coefficient) {
    if (w.size() != poly.size() || w.empty()) throw DomainError("exp_poly: dimension mismatch");
    SectorFunction f;
    f.coefficient = coefficient;
    for (std::size_t j = 0; j < w.size(); ++j) {
        const Complex wj = w[j];
        const std::vector<Complex> p = poly[j];
        AxisFactor a;
        a.value = [wj, p](Complex x) { return scalar_matrix(poly_eval(p, x) * std::exp(-wj * x)); };
        a.fb = [wj, p](Complex u) { return scalar_matrix(poly_laplace(p, u + wj)); };
        f.factors.push_back(a);
    }
    f.growth_anchor = w;
    f.boundary_integrable = true;
    return f;
}

Point orbit_growth_anchor(const CommutingTuple& T, const Point& lambda, const ProductSector& sectors) {
    check_dim(lambda, T.k(), "orbit_growth_anchor");
    if (sectors.size() != T.k()) throw DomainError("orbit_growth_anchor: sector count mismatch");
    Point z(T.k());
    for (std::size_t j = 0; j < T.k(); ++j) {
        std::vector<Point> pts;
        for (Eigen::Index i = 0; i < T.eigenvalues[j].size(); ++i) pts.push_back(Point{lambda[j] * T.eigenvalues[j](i)});
        z[j] = -sup_points(pts, ProductSector{sectors[j]}).point[0];
    }
    return z;
}

SectorFunction SectorFunction::semigroup_orbit(const CommutingTuple& T, const Point& lambda, const ProductSector& sectors) {
    validate_lambda(T, lambda, sectors);
    SectorFunction f;
    const Eigen::Index d = T.dim();
    f.coefficient = Matrix::Identity(d, d);
    for (std::size_t j = 0; j < T.k(); ++j) {
        const Matrix A = lambda[j] * T.A[j];
        const Complex lam = lambda[j];
        const CommutingTuple* tp = &T;
        AxisFactor a;
        a.value = [A](Complex x) { return expm(x * A); };
        a.fb = [tp, j, lam](Complex u) { return Matrix(-resolvent_factor(*tp, j, lam, -u)); };
        f.factors.push_back(a);
    }
    f.growth_anchor = orbit_growth_anchor(T, lambda, sectors);
    f.boundary_integrable = true;
    return f;
}

Matrix fb_of_function(const SectorFunction& f, const ProductSector& sectors, const Point& w, double tol) {
    const std::size_t k = sectors.size();
    check_dim(w, k, "fb_of_function");
    if (!f.separable() && k != 1) throw DomainError("fb_of_function: non-separable functions are supported for k = 1 only");
    const Point g = f.growth_anchor.empty() ? Point(k, 0.0) : f.growth_anchor;
    Matrix v = coefficient_of(f);
    for (std::size_t j = 0; j < k; ++j) v = mul(v, factor_fb(f, j, sectors[j], g[j], w[j], tol));
    return v;
}

const char* to_string(PairRoute r) {
    switch (r) {
        case PairRoute::Measure: return "measure";
        case PairRoute::FbEps: return "fb_eps";
        case PairRoute::FbDirect: return "fb_direct";
        case PairRoute::WnLimit: return "wn_limit";
        case PairRoute::Cauchy: return "cauchy";
    }
    return "?";
}

const char* to_string(SemigroupRoute r) {
    switch (r) {
        case SemigroupRoute::Measure: return "measure";
        case SemigroupRoute::ResolventContour: return "resolvent_contour";
        case SemigroupRoute::Regularized: return "regularized";
        case SemigroupRoute::EpsShift: return "eps_shift";
    }
    return "?";
}

Point pairing_anchor(const SectorFunction& f, const Functional& phi) {
    const std::size_t k = phi.k();
    const Point zf = f.growth_anchor.empty() ? Point(k, 0.0) : f.growth_anchor;
    check_dim(zf, k, "pairing anchor");
    const auto dom = phi.domain();
    Point z(k);
    if (!dom.anchor) {
        const Point b = dual_bisector_direction(phi.sectors);
        for (std::size_t j = 0; j < k; ++j) z[j] = zf[j] - 0.5 * b[j];
        return z;
    }
    if (!preceq(*dom.anchor, zf, phi.sectors))
        throw DomainError("pairing: no admissible anchor (the function grows faster than the functional decays)");
    for (std::size_t j = 0; j < k; ++j) z[j] = 0.5 * ((*dom.anchor)[j] + zf[j]);
    if (!phi.in_domain(z)) throw DomainError("pairing: no admissible anchor inside the transform domain");
    return z;
}

namespace {

/// Distance along the dual-cone boundary after which the slowest atom term e^{-eta sigma} drops below tol.
/// Atoms close to a sector edge decay slowly there, and the mapped tail alone cannot resolve the oscillation.
double atom_decay_length(const Functional& phi, double tol) {
    double rate = std::numeric_limits<double>::infinity();
    for (const Atom& a : phi.atoms)
        for (std::size_t j = 0; j < phi.k(); ++j) {
            const Sector d = dual_sector(phi.sectors[j]);
            for (double om : {d.alpha, d.beta}) rate = std::min(rate, std::real(a.eta[j] * cis(om)));
        }
    if (!(rate > 0.0) || std::isinf(rate)) return 0.0;
    return std::min(2000.0, std::log(1.0 / tol) / rate);
}

struct Engine {
    const SectorFunction& f;
    const Functional& phi;
    const PairOptions& opt;
    std::size_t k;
    Point z;
    Point growth;
    std::size_t integrals = 0;

    Engine(const SectorFunction& f_, const Functional& phi_, const PairOptions& o)
        : f(f_), phi(phi_), opt(o), k(phi_.k()) {
        phi.validate();
        if (f.separable() && f.factors.size() != k) throw DomainError("pairing: function and functional dimensions differ");
        if (!f.separable() && !f.general) throw DomainError("pairing: function has no definition");
        growth = f.growth_anchor.empty() ? Point(k, 0.0) : f.growth_anchor;
        z = opt.anchor ? *opt.anchor : pairing_anchor(f, phi);
        check_dim(z, k, "pairing anchor");
        if (!phi.in_domain(z)) throw DomainError("pairing: anchor outside the domain of the transform");
    }

    Matrix measure() {
        Matrix total;
        auto add = [&](const Matrix& m) { total = total.size() == 0 ? m : Matrix(total + m); };
        for (const Atom& a : phi.atoms) add(a.weight * f.value(a.eta));
        IntegrationConfig cfg = make_cfg(opt.tol * 0.1, opt.threads);
        cfg.relative = true;
        const auto vals = factor_values(f);
        for (const RayDensity& d : phi.densities) {
            if (f.separable() || k == 1) {
                Matrix v = coefficient_of(f);
                for (std::size_t j = 0; j < k; ++j) {
                    const Complex dir = cis(d.omega[j]);
                    const Complex sp = d.s[j] + growth[j] * dir;
                    const double rate = std::real(sp);
                    if (!(rate > 0.0))
                        throw DomainError("pairing (measure): the density does not dominate the growth of the function");
                    const auto& p = d.poly[j];
                    const Complex o = d.offset[j], s = d.s[j];
                    const auto& F = vals[j];
                    auto g = [&](Complex t) -> Matrix { return (poly_eval(p, t) * std::exp(-s * t)) * F(o + t * dir); };
                    DecayEnvelope env{1.0, rate, 0.0};
                    v = mul(v, ray_integral(g, 0.0, 1.0, cfg, env).value);
                    ++integrals;
                }
                add(v);
            } else {
                ContourQuadrature cq = tensor_rays(Point(k, 0.0), Point(k, 1.0), 0.0);
                auto g = [&](std::span<const Complex> t, std::span<const std::size_t>) -> Matrix {
                    Point x(k);
                    Complex w = 1.0;
                    for (std::size_t j = 0; j < k; ++j) {
                        x[j] = d.offset[j] + t[j] * cis(d.omega[j]);
                        w *= poly_eval(d.poly[j], t[j]) * std::exp(-d.s[j] * t[j]);
                    }
                    return w * f.value(x);
                };
                add(integrate(g, cq, cfg).value);
                ++integrals;
            }
        }
        if (total.size() == 0) {
            Matrix c = coefficient_of(f);
            total = Matrix::Zero(c.rows(), f.separable() ? c.cols() : c.cols());
            if (!f.separable()) total = 0.0 * f.value(Point(k, 0.0));
        }
        return total;
    }

    /// (2 i pi)^{-k} int_{z + dist. boundary of the dual cone} W_n(sigma - z) FB(phi)(sigma) FB(f)(eps - sigma) d sigma,
    /// with n <= 0 meaning no regularizer.
    Matrix fb_contour(const Point& eps, double n) {
        require_proper_dual(phi.sectors, "pairing");
        if (!f.separable() && k != 1) throw DomainError("pairing: transform routes need a separable function when k > 1");
        AdmissibleRegion U = anchored_dual_cone(phi.sectors, z);
        double far = 0.0;
        for (std::size_t j = 0; j < k; ++j) far = std::max(far, std::abs(z[j]) + std::abs(growth[j]) + std::abs(eps[j]));
        const double R = far + std::max(16.0, atom_decay_length(phi, opt.tol)) + (n > 0.0 ? 2.0 * n : 0.0);
        DiscretizeOptions dopt;
        ContourQuadrature cq = boundary_quadrature(U, Point(k, 0.0), R, 4.0, dopt);
        cq.options.feature_radius = std::max(cq.options.feature_radius, far + 1.0);
        const Complex norm = std::pow(2.0 * kPi * kI, -static_cast<int>(k));
        const Matrix coef = coefficient_of(f);
        std::vector<std::vector<Matrix>> cache(k);
        auto prepare = [&](const std::vector<AxisNodes>& axes) {
            for (std::size_t j = 0; j < k; ++j) {
                cache[j].resize(axes[j].size());
                for (std::size_t i = 0; i < axes[j].size(); ++i)
                    cache[j][i] = factor_fb(f, j, phi.sectors[j], growth[j], eps[j] - axes[j].points[i], opt.tol * 1e-2);
            }
        };
        auto integrand = [&](std::span<const Complex> sig, std::span<const std::size_t> idx) -> Matrix {
            Point s(sig.begin(), sig.end());
            Complex c = norm * fb_unchecked(phi, s);
            if (n > 0.0) {
                Point d(k);
                for (std::size_t j = 0; j < k; ++j) d[j] = s[j] - z[j];
                c *= w_n(d, n, phi.sectors);
            }
            Matrix v = c * coef;
            for (std::size_t j = 0; j < k; ++j) v = mul(v, cache[j][idx[j]]);
            return v;
        };
        IntegrationConfig cfg = make_cfg(opt.tol, opt.threads);
        ++integrals;
        return integrate(integrand, cq, cfg, prepare).value;
    }

    std::vector<Point> eps_schedule(std::vector<double>& h) const {
        const Point b = dual_bisector_direction(phi.sectors);
        std::vector<Point> out;
        for (int m = 0; m < opt.eps_levels; ++m) {
            const double t = opt.eps0 * std::ldexp(1.0, -m);
            Point e(k);
            for (std::size_t j = 0; j < k; ++j) e[j] = t * b[j];
            out.push_back(e);
            h.push_back(t);
        }
        return out;
    }

    LimitResult fb_eps() {
        require_fb_integrable(phi, "pairing (fb_eps)");
        std::vector<double> h;
        std::vector<Matrix> vals;
        for (const Point& e : eps_schedule(h)) vals.push_back(fb_contour(e, 0.0));
        return extrapolate_to_zero(vals, h);
    }

    LimitResult fb_direct() {
        require_fb_integrable(phi, "pairing (fb_direct)");
        if (!f.boundary_integrable)
            throw DomainError("pairing (fb_direct): the function is not certified integrable on the sector boundary");
        LimitResult r;
        r.value = fb_contour(Point(k, 0.0), 0.0);
        r.error_estimate = opt.tol;
        return r;
    }

    LimitResult wn_limit() {
        std::vector<double> h;
        std::vector<Matrix> outer;
        double inner_err = 0.0;
        for (const Point& e : eps_schedule(h)) {
            std::vector<Matrix> vals;
            std::vector<double> hn;
            for (double n : opt.wn_orders) {
                vals.push_back(fb_contour(e, n));
                hn.push_back(1.0 / n);
            }
            LimitResult in = extrapolate_to_zero(vals, hn);
            inner_err = std::max(inner_err, in.error_estimate);
            outer.push_back(in.value);
        }
        LimitResult r = extrapolate_to_zero(outer, h);
        r.error_estimate = std::max(r.error_estimate, inner_err);
        return r;
    }

    LimitResult cauchy() {
        for (const Sector& s : phi.sectors)
            if (!(s.alpha < s.beta && s.beta < s.alpha + kPi))
                throw DomainError("pairing (cauchy): needs alpha_j < beta_j < alpha_j + pi on every axis");
        if (!f.boundary_integrable)
            throw DomainError("pairing (cauchy): the function is not certified integrable on the sector boundary");
        std::vector<double> h;
        std::vector<Matrix> vals;
        for (int m = 0; m < opt.eta_levels; ++m) {
            const double t = opt.eta0 * std::ldexp(1.0, -m);
            Point eta(k);
            for (std::size_t j = 0; j < k; ++j) eta[j] = t * cis(phi.sectors[j].bisector());
            vals.push_back(cauchy_at(eta, t));
            h.push_back(t);
        }
        return extrapolate_to_zero(vals, h);
    }

    /// int over the distinguished boundary of the sector of e^{z(sigma-eta)} C_z(phi)(sigma - eta) f(sigma) d sigma.
    Matrix cauchy_at(const Point& eta, double size) {
        std::vector<AxisRegion> axes;
        double far = 0.0;
        for (const Atom& a : phi.atoms)
            for (Complex x : a.eta) far = std::max(far, std::abs(x));
        for (const RayDensity& d : phi.densities)
            for (Complex x : d.offset) far = std::max(far, std::abs(x));
        for (std::size_t j = 0; j < k; ++j) axes.push_back(pure_cone(dual_sector(phi.sectors[j]), 0.0));
        AdmissibleRegion U = product_region(std::move(axes));
        DiscretizeOptions dopt;
        const double n_per_unit = 4.0;
        const double panel = dopt.panel_points / n_per_unit;
        dopt.grading_levels =
            std::max(4, static_cast<int>(std::ceil(std::log(panel / (0.25 * size)) / std::log(dopt.grading_ratio))));
        ContourQuadrature cq = boundary_quadrature(U, Point(k, 0.0), far + 16.0, n_per_unit, dopt);
        cq.options.feature_radius = far + 1.0;

        const Complex norm = std::pow(2.0 * kPi * kI, -static_cast<int>(k));
        const auto vals = factor_values(f);
        const std::size_t nd = phi.densities.size();
        std::vector<std::vector<Matrix>> fcache(k);
        std::vector<std::vector<std::vector<Complex>>> dcache(k);  // [axis][node][density]
        IntegrationConfig icfg = make_cfg(opt.tol * 1e-2, 1);
        auto prepare = [&](const std::vector<AxisNodes>& ax) {
            for (std::size_t j = 0; j < k; ++j) {
                const std::size_t m = ax[j].size();
                dcache[j].assign(m, std::vector<Complex>(nd));
                if (f.separable() || k == 1) fcache[j].resize(m);
                for (std::size_t i = 0; i < m; ++i) {
                    const Complex sig = ax[j].points[i];
                    if (f.separable() || k == 1) fcache[j][i] = vals[j](sig);
                    const Complex lam = sig - eta[j];
                    for (std::size_t q = 0; q < nd; ++q) {
                        const RayDensity& d = phi.densities[q];
                        const Complex dir = cis(d.omega[j]);
                        const Complex sp = d.s[j] + z[j] * dir;
                        const auto& p = d.poly[j];
                        const Complex o = d.offset[j];
                        DecayEnvelope env{1.0, std::real(sp), 0.0};
                        dcache[j][i][q] = ray_integral_scalar(
                            [&](Complex tt) { return poly_eval(p, tt) * std::exp(-sp * tt) / (o + tt * dir - lam); }, 0.0,
                            1.0, icfg, env, std::abs(lam - o) + 1.0);
                    }
                }
            }
        };
        const Matrix coef = coefficient_of(f);
        auto integrand = [&](std::span<const Complex> sig, std::span<const std::size_t> idx) -> Matrix {
            Matrix fv;
            if (f.separable() || k == 1) {
                fv = coef;
                for (std::size_t j = 0; j < k; ++j) fv = mul(fv, fcache[j][idx[j]]);
            } else {
                fv = f.value(Point(sig.begin(), sig.end()));
            }
            // e^{z(sigma - eta)} grows along the boundary while f decays; split the exponential so
            // that neither factor overflows on its own.
            const double fnorm = fv.norm();
            Matrix acc = Matrix::Zero(fv.rows(), fv.cols());
            auto add_term = [&](Complex t, Complex ex) {
                if (t == Complex(0.0) || fnorm == 0.0) return;
                const double lm = std::real(ex) + std::log(std::abs(t)) + std::log(fnorm);
                if (lm < -700.0) return;
                const Complex half = std::exp(0.5 * ex);
                acc += ((t * half) * fv) * half;
            };
            for (const Atom& a : phi.atoms) {
                Complex t = a.weight;
                Complex ex = 0.0;
                for (std::size_t j = 0; j < k; ++j) {
                    t /= (a.eta[j] - (sig[j] - eta[j]));
                    ex += z[j] * (sig[j] - eta[j] - a.eta[j]);
                }
                add_term(t, ex);
            }
            for (std::size_t q = 0; q < nd; ++q) {
                const RayDensity& d = phi.densities[q];
                Complex t = 1.0;
                Complex ex = 0.0;
                for (std::size_t j = 0; j < k; ++j) {
                    t *= dcache[j][idx[j]][q];
                    ex += z[j] * (sig[j] - eta[j] - d.offset[j]);
                }
                add_term(t, ex);
            }
            return Matrix(norm * acc);
        };
        IntegrationConfig cfg = make_cfg(opt.tol, opt.threads);
        ++integrals;
        return integrate(integrand, cq, cfg, prepare).value;
    }
};

}  // namespace

PairResult pair_function(const SectorFunction& f, const Functional& phi, PairRoute route, const PairOptions& opt) {
    Engine e(f, phi, opt);
    PairResult r;
    r.anchor = e.z;
    switch (route) {
        case PairRoute::Measure:
            r.value = e.measure();
            r.error_estimate = opt.tol;
            break;
        case PairRoute::FbEps: {
            auto l = e.fb_eps();
            r.value = l.value;
            r.error_estimate = l.error_estimate;
            break;
        }
        case PairRoute::FbDirect: {
            auto l = e.fb_direct();
            r.value = l.value;
            r.error_estimate = l.error_estimate;
            break;
        }
        case PairRoute::WnLimit: {
            auto l = e.wn_limit();
            r.value = l.value;
            r.error_estimate = l.error_estimate;
            break;
        }
        case PairRoute::Cauchy: {
            auto l = e.cauchy();
            r.value = l.value;
            r.error_estimate = l.error_estimate;
            break;
        }
    }
    r.integrals = e.integrals;
    return r;
}

PairResult pair_semigroup(const CommutingTuple& T, const Point& lambda, const Functional& phi, SemigroupRoute route,
                          const PairOptions& opt) {
    phi.validate();
    if (phi.k() != T.k()) throw DomainError("pair_semigroup: functional and tuple dimensions differ");
    const SectorFunction f = SectorFunction::semigroup_orbit(T, lambda, phi.sectors);
    PairOptions o = opt;
    if (route != SemigroupRoute::Measure) {
        const Point z = o.anchor ? *o.anchor : pairing_anchor(f, phi);
        const NClass c = n_set_classify(T, lambda, phi.sectors, z);
        if (route == SemigroupRoute::ResolventContour && c != NClass::InN0)
            throw DomainError("pair_semigroup (resolvent_contour): anchor is not in N0");
        if (c == NClass::Outside) throw DomainError("pair_semigroup: no admissible anchor");
        o.anchor = z;
    }
    switch (route) {
        case SemigroupRoute::Measure: return pair_function(f, phi, PairRoute::Measure, o);
        case SemigroupRoute::ResolventContour: return pair_function(f, phi, PairRoute::FbDirect, o);
        case SemigroupRoute::Regularized: return pair_function(f, phi, PairRoute::WnLimit, o);
        case SemigroupRoute::EpsShift: return pair_function(f, phi, PairRoute::FbEps, o);
    }
    throw DomainError("pair_semigroup: unknown route");
}

Vector fb_of_orbit(const CommutingTuple& T, const Point& lambda, const ProductSector& sectors, const Point& z,
                   const Point& zeta, const Vector& u, OrbitRoute route, double tol) {
    const std::size_t k = T.k();
    check_dim(z, k, "fb_of_orbit anchor");
    check_dim(zeta, k, "fb_of_orbit");
    if (u.size() != T.dim()) throw DomainError("fb_of_orbit: vector dimension mismatch");
    if (n_set_classify(T, lambda, sectors, z) == NClass::Outside) throw DomainError("fb_of_orbit: anchor invalid");
    for (std::size_t j = 0; j < k; ++j)
        if (!contains(dual_sector(sectors[j]), zeta[j], true))
            throw DomainError("fb_of_orbit: zeta outside the closed dual cone");
    Vector v = u;
    if (route == OrbitRoute::Resolvent) {
        for (std::size_t j = 0; j < k; ++j) v = -(resolvent_factor(T, j, lambda[j], z[j] - zeta[j]) * v);
        return v;
    }
    IntegrationConfig cfg = make_cfg(tol, 1);
    for (std::size_t j = 0; j < k; ++j) {
        // ray of the sector with the widest decay margin for e^{(z - zeta) s} T(lambda s)
        double best = -std::numeric_limits<double>::infinity(), om = sectors[j].alpha;
        for (int i = 0; i <= 64; ++i) {
            const double w = sectors[j].alpha + sectors[j].aperture() * i / 64.0;
            const double margin = std::real((zeta[j] - z[j]) * cis(w)) - growth_abscissa(T, j, lambda[j], w);
            if (margin > best) {
                best = margin;
                om = w;
            }
        }
        if (!(best > 0.0)) throw DomainError("fb_of_orbit: the weighted orbit does not decay on any ray");
        const Matrix A = lambda[j] * T.A[j];
        const Complex a = z[j] - zeta[j];
        const Vector vin = v;
        DecayEnvelope env{1.0, best, 0.0};
        v = ray_integral([&](Complex s) -> Matrix { return std::exp(a * s) * (expm(s * A) * vin); }, 0.0, cis(om), cfg, env)
                .value;
    }
    return v;
}

}  // namespace sectorcalc
