#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sectorcalc/geometry.hpp"
#include "sectorcalc/quadrature.hpp"
#include "sectorcalc/semigroups.hpp"
#include "sectorcalc/types.hpp"

namespace sectorcalc {

struct Atom {
    Point eta;
    Complex weight{1.0, 0.0};
};

/// Tensor density on the product of rays offset_j + t e^{i omega_j}, t >= 0, with weight
/// prod_j p_j(t_j) e^{-s_j t_j} dt_j.  poly[j][m] is the coefficient of t^m.
struct RayDensity {
    Point offset;
    std::vector<double> omega;
    Point s;
    std::vector<std::vector<Complex>> poly;
};

/// Points z with z + closed dual cone inside the domain of the Fourier-Borel transform.
struct FBDomainInfo {
    /// Per-density candidates; empty when the transform is entire.
    std::vector<Point> candidates;
    std::optional<Point> anchor;
};

/// A linear functional represented by a finite measure: atoms plus tensor ray densities.
struct Functional {
    ProductSector sectors;
    std::vector<Atom> atoms;
    std::vector<RayDensity> densities;

    std::size_t k() const { return sectors.size(); }
    /// Checks support, integrability and dimensions; throws DomainError.
    void validate() const;
    bool empty() const { return atoms.empty() && densities.empty(); }
    FBDomainInfo domain() const;
    bool in_domain(const Point& z) const;
};

Functional dirac(const ProductSector& sectors, const Point& eta, Complex weight = 1.0);
/// prod_j e^{-t_j} dt_j along the bisector of each sector.
Functional bisector_exponential(const ProductSector& sectors);
/// Probability measure whose transform is the regularizer W_n.
Functional regularizer_measure(const ProductSector& sectors, double n);
/// Push-forward under zeta -> c zeta, c > 0.
Functional dilate(const Functional& phi, double c);
/// phi * delta_eta.
Functional translate(const Functional& phi, const Point& eta);
Functional scaled(const Functional& phi, Complex c);
Functional sum(const Functional& a, const Functional& b);

Complex fb_transform(const Functional& phi, const Point& z);

/// prod_j n^2 / (n + zeta_j e^{i(alpha_j+beta_j)/2})^2.
Complex w_n(const Point& zeta, double n, const ProductSector& sectors);

Functional convolve(const Functional& a, const Functional& b);
/// Anchor of the convolution domain computed from the anchors of the factors.
std::optional<Point> convolution_anchor(const Functional& a, const Functional& b);

enum class CauchyRoute { Measure, FourierBorel };

/// (2 i pi)^{-k} <prod_j (zeta_j - lambda_j)^{-1} e_{-z}, phi>.
Complex cauchy_transform(const Functional& phi, const Point& z, const Point& lambda, CauchyRoute route,
                         double tol = 1e-11);

/// Ray direction used by the Fourier-Borel route for lambda_j outside the closed sector.
double cauchy_window_angle(const Sector& s, Complex lambda);

/// One factor of a separable function: value(zeta_j) and optionally its Laplace transform
/// along rays of the sector, fb(w) = int_0^{e^{i omega} inf} e^{-w t} value(t) dt.
struct AxisFactor {
    std::function<Matrix(Complex)> value;
    std::function<Matrix(Complex)> fb;
};

/// A function on the closed product sector, coefficient * prod_j factor_j(zeta_j).  Factors are
/// square matrices of a common size or 1x1 scalars.  `general` replaces the factors for functions
/// that do not split; Fourier-Borel based routes then need k = 1.
struct SectorFunction {
    Matrix coefficient = Matrix::Identity(1, 1);
    std::vector<AxisFactor> factors;
    std::function<Matrix(const Point&)> general;
    /// e_{z} f is bounded on the closed sector for z = growth_anchor (and every z below it).
    Point growth_anchor;
    /// Integrability of e^{Re(z sigma)} f(sigma) along the boundary of the sector.
    bool boundary_integrable = false;

    std::size_t k() const;
    Matrix value(const Point& zeta) const;
    bool separable() const { return !factors.empty(); }
    bool closed_form_fb() const;

    /// coefficient * prod_j p_j(zeta_j) e^{-w_j zeta_j}.
    static SectorFunction exp_poly(const Point& w, const std::vector<std::vector<Complex>>& poly,
                                   const Matrix& coefficient = Matrix::Identity(1, 1));
    /// zeta -> T(lambda zeta) = prod_j exp(lambda_j zeta_j A_j).
    static SectorFunction semigroup_orbit(const CommutingTuple& T, const Point& lambda, const ProductSector& sectors);
};

/// Transform of f at w via its closed form or a ray quadrature per axis.
Matrix fb_of_function(const SectorFunction& f, const ProductSector& sectors, const Point& w, double tol = 1e-12);

enum class PairRoute { Measure, FbEps, FbDirect, WnLimit, Cauchy };
const char* to_string(PairRoute r);

struct PairOptions {
    std::optional<Point> anchor;
    double tol = 1e-10;
    double eps0 = 0.5;
    int eps_levels = 7;
    std::vector<double> wn_orders{8.0, 16.0, 32.0, 64.0, 128.0};
    double eta0 = 0.2;
    int eta_levels = 6;
    int threads = 1;
};

struct PairResult {
    Matrix value;
    double error_estimate = 0.0;
    Point anchor;
    std::size_t integrals = 0;
};

PairResult pair_function(const SectorFunction& f, const Functional& phi, PairRoute route, const PairOptions& opt = {});

/// The anchor used by the contour routes: between the domain anchor of phi and the growth anchor of f.
Point pairing_anchor(const SectorFunction& f, const Functional& phi);

enum class SemigroupRoute { Measure, ResolventContour, Regularized, EpsShift };
const char* to_string(SemigroupRoute r);

/// Anchor z with e_z T(lambda .) bounded (the edge of N(T, lambda, alpha, beta)).
Point orbit_growth_anchor(const CommutingTuple& T, const Point& lambda, const ProductSector& sectors);

PairResult pair_semigroup(const CommutingTuple& T, const Point& lambda, const Functional& phi, SemigroupRoute route,
                          const PairOptions& opt = {});

enum class OrbitRoute { Quadrature, Resolvent };

/// Fourier-Borel transform of e_z T(lambda .) u at zeta.
Vector fb_of_orbit(const CommutingTuple& T, const Point& lambda, const ProductSector& sectors, const Point& z,
                   const Point& zeta, const Vector& u, OrbitRoute route, double tol = 1e-11);

}  // namespace sectorcalc
